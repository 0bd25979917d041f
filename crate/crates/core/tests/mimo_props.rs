use linfb_core::blockmat::{max_abs_diff, DenseMatrix};
use linfb_core::mimo::*;
use linfb_core::siso::{mac_siso_region, mac_siso_sum_capacity};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DenseMatrix {
    DenseMatrix::from_fn(r, c, |_, _| rng.random_range(-1.5..1.5))
}

fn random_psd(rng: &mut ChaCha8Rng, n: usize) -> DenseMatrix {
    let a = random_matrix(rng, n, n);
    &a * a.transpose()
}

#[test]
fn log_det_inequalities() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let (k, n1, n2) = (rng.random_range(1..4), rng.random_range(1..4), rng.random_range(1..4));
        let g1 = random_matrix(&mut rng, k, n1);
        let g2 = random_matrix(&mut rng, k, n2);
        let cov = CovariancePair { k1: random_psd(&mut rng, n1), k2: random_psd(&mut rng, n2) };
        let p = mac_nofb_pentagon(&g1, &g2, &cov).unwrap();
        assert!(p.isum <= p.i1 + p.i2 + 1e-12);
        assert!(p.isum >= p.i1.max(p.i2) - 1e-12);
    }
}

#[test]
fn budget_accounting_is_exact() {
    let spec = ChannelSpec::new(
        DenseMatrix::from_row_slice(2, 2, &[1.0, 0.2, 0.3, 1.0]),
        DenseMatrix::from_row_slice(2, 2, &[0.5, -1.0, 1.0, 0.4]),
        3.0,
        Direction::Mac,
    )
    .unwrap();
    for seed in 0..20 {
        let d = random_design(&spec, 3, DesignForm::D, 0.5, seed).unwrap();
        let e = effective_mac_channel(&d, &spec).unwrap();
        assert!((e.budget + d.consumed_power() - 9.0).abs() < 1e-12);
        let b = mac_design_to_bc(&d).unwrap();
        let e = effective_bc_channel(&b, &spec).unwrap();
        assert!((e.budget + b.consumed_power() - 9.0).abs() < 1e-12);
    }
}

#[test]
fn whitened_bc_channel_is_reversed_mac_channel() {
    let spec = ChannelSpec::new(
        DenseMatrix::from_row_slice(2, 3, &[1.0, 0.2, 0.3, 1.0, -0.5, 0.1]),
        DenseMatrix::from_row_slice(1, 3, &[0.5, -1.0, 1.0]),
        3.0,
        Direction::Bc,
    )
    .unwrap();
    for seed in 0..10 {
        let d = random_design(&spec, 3, DesignForm::D, 0.6, seed).unwrap();
        let b = FeedbackDesign::new(DesignForm::B, d.first.reversed(), d.second.reversed()).unwrap();
        let (l1, l2) = spec.dual_mac_lifted(3);
        let mac = effective_mac_on(&d.first, &d.second, &l1, &l2, spec.power).unwrap();
        let bc = effective_bc_channel(&b, &spec).unwrap();
        for (gb, gm) in [(&bc.g1, &mac.g1), (&bc.g2, &mac.g2)] {
            let flipped = linfb_core::blockmat::reverse(gm);
            assert!(max_abs_diff(gb, &flipped) < 1e-8);
        }
    }
}

#[test]
fn zero_design_region_is_eta_invariant() {
    let spec = ChannelSpec::siso(1.0, 0.6, 10.0, Direction::Mac).unwrap();
    let one = multiletter_inner_bound(&spec, &FeedbackDesign::zeros(DesignForm::D, 1, &spec).unwrap(), 33).unwrap();
    for eta in [2, 3] {
        let f = multiletter_inner_bound(&spec, &FeedbackDesign::zeros(DesignForm::D, eta, &spec).unwrap(), 33).unwrap();
        assert!(f.hausdorff(&one) < 1e-6, "eta {eta}");
    }
}

#[test]
fn zero_design_max_sum_is_nofeedback_optimum() {
    let spec = ChannelSpec::siso(1.0, 1.0, 10.0, Direction::Mac).unwrap();
    let f = multiletter_inner_bound(&spec, &FeedbackDesign::zeros(DesignForm::D, 1, &spec).unwrap(), 65).unwrap();
    assert!((f.max_sum_rate() - 0.5 * 11f64.log2()).abs() < 1e-6);
}

#[test]
fn fixed_designs_stay_inside_ozarow_region() {
    let spec = ChannelSpec::siso(0.8, 1.0, 10.0, Direction::Mac).unwrap();
    let oz = mac_siso_region(0.8, 1.0, 10.0, 201, 201).unwrap();
    for seed in 0..6 {
        let d = random_design(&spec, 2 + (seed as usize % 2), DesignForm::D, 0.3, seed).unwrap();
        let f = multiletter_inner_bound(&spec, &d, 17).unwrap();
        assert!(oz.min_slack_over(&f) >= -1e-6, "seed {seed}");
    }
}

#[test]
fn mac_and_bc_inner_bounds_coincide() {
    let spec = ChannelSpec::new(
        DenseMatrix::from_row_slice(2, 2, &[1.0, 0.3, -0.2, 0.7]),
        DenseMatrix::from_row_slice(1, 2, &[0.4, 1.2]),
        4.0,
        Direction::Mac,
    )
    .unwrap();
    let d = random_design(&spec, 2, DesignForm::D, 0.4, 5).unwrap();
    let mac = multiletter_inner_bound(&spec, &d, 17).unwrap();
    let bc = multiletter_inner_bound(&spec.with_direction(Direction::Bc), &mac_design_to_bc(&d).unwrap(), 17).unwrap();
    assert!(mac.hausdorff(&bc) < 1e-5);
}

#[test]
fn more_iterations_never_lower_the_sum_rate() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let g1 = random_matrix(&mut rng, 3, 2);
    let g2 = random_matrix(&mut rng, 3, 2);
    let mut prev = f64::NEG_INFINITY;
    for iters in [1, 2, 4, 8, 16, 32, 64, 128] {
        let o = maximize_sum_rate(&g1, &g2, 5.0, iters, 1.0).unwrap();
        assert!(o.pentagon.isum >= prev - 1e-15);
        assert!(o.cov.total_trace() <= 5.0 + 1e-9);
        o.cov.validate().unwrap();
        prev = o.pentagon.isum;
    }
}

#[test]
fn search_is_seed_deterministic_and_bounded() {
    let spec = ChannelSpec::siso(1.0, 1.0, 10.0, Direction::Mac).unwrap();
    let a = search_feedback_design(&spec, 2, 200, 9).unwrap();
    let b = search_feedback_design(&spec, 2, 200, 9).unwrap();
    assert_eq!(a.best, b.best);
    assert_eq!(a.frontier, b.frontier);
    let cap = mac_siso_sum_capacity(1.0, 1.0, 10.0).unwrap();
    assert!(a.trial_sum_rates.iter().chain(&a.refinement_sum_rates).all(|&r| r <= cap + 1e-6));
}
