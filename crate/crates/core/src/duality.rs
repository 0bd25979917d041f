//! Parameter maps between dual BC and MAC schemes and a numerical check of
//! the identities behind the duality.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::blockmat::{
    bc_n_matrices, mac_m_matrices, max_abs_diff, psd_sqrt, reverse, solve_left, solve_right, BlockTriangularSet,
    DenseMatrix,
};
use crate::error::{LinfbError, Result};
use crate::mimo::{random_design, ChannelSpec, DesignForm, FeedbackDesign};

/// `D_i = reverse(B_i)`.
pub fn map_bc_to_mac_params(
    b1: &BlockTriangularSet,
    b2: &BlockTriangularSet,
) -> (BlockTriangularSet, BlockTriangularSet) {
    (b1.reversed(), b2.reversed())
}

/// `B_i = reverse(D_i)`; inverse of [`map_bc_to_mac_params`].
pub fn map_mac_to_bc_params(
    d1: &BlockTriangularSet,
    d2: &BlockTriangularSet,
) -> (BlockTriangularSet, BlockTriangularSet) {
    (d1.reversed(), d2.reversed())
}

/// Source index `(τ', ℓ') = (η − τ, η − ℓ + 2)` of the per-block map, or an
/// error if it leaves `1 ≤ τ' < ℓ' ≤ η`.
pub fn blockwise_source_index(tau: usize, l: usize, eta: usize) -> Result<(usize, usize)> {
    let out = Err(LinfbError::IndexOutOfRange { tau, l, eta });
    if !(1 <= tau && tau < l && l <= eta) {
        return out;
    }
    let (t2, l2) = (eta - tau, eta + 2 - l);
    if !(1 <= t2 && t2 < l2 && l2 <= eta) {
        return out;
    }
    Ok((t2, l2))
}

/// Source index of block `(τ, ℓ)` under the whole-matrix reverse image:
/// `(η + 1 − ℓ, η + 1 − τ)`. Always in range.
pub fn whole_matrix_source_index(tau: usize, l: usize, eta: usize) -> Result<(usize, usize)> {
    if !(1 <= tau && tau < l && l <= eta) {
        return Err(LinfbError::IndexOutOfRange { tau, l, eta });
    }
    Ok((eta + 1 - l, eta + 1 - tau))
}

/// Per-block map `A_{τ,ℓ} = reverse(C_{η−τ, η−ℓ+2})` for one user's C-form
/// set. Fails on the first index whose source is out of range, which
/// happens for every `η ≥ 3`.
pub fn map_scheme_params_corollary5(c: &BlockTriangularSet) -> Result<BlockTriangularSet> {
    let eta = c.eta();
    let mut a = BlockTriangularSet::zeros(eta, c.block_cols(), c.block_rows())?;
    for l in 2..=eta {
        for tau in 1..l {
            let (t2, l2) = blockwise_source_index(tau, l, eta)?;
            a.set_block(l, tau, reverse(c.block(l2, t2)?))?;
        }
    }
    Ok(a)
}

/// Whole-matrix correspondence `A^B = reverse(C^B)`.
pub fn map_scheme_params_whole(c: &BlockTriangularSet) -> BlockTriangularSet {
    c.reversed()
}

/// Max-abs residuals of the duality identities for one design.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualityReport {
    /// `max_i ‖S_i − E Q_i E‖`.
    pub residual_s_eq_eqe: f64,
    /// `max_i ‖E S_i⁻¹ H_i^B E − (H̄_i^B Q_i⁻¹)ᵀ‖`.
    pub residual_channel_identity: f64,
    /// `max_i |tr(B_iB_iᵀ) − tr(D_iD_iᵀ)|`.
    pub residual_trace_equality: f64,
    pub eta: usize,
    pub spec_digest: String,
}

/// Pass threshold for all three residuals.
pub const DUALITY_TOL: f64 = 1e-8;

impl DualityReport {
    pub fn max_residual(&self) -> f64 {
        self.residual_s_eq_eqe.max(self.residual_channel_identity).max(self.residual_trace_equality)
    }

    pub fn passed(&self) -> bool {
        self.max_residual() < DUALITY_TOL
    }

    /// Name of the largest residual.
    pub fn worst_name(&self) -> &'static str {
        let r = [
            (self.residual_s_eq_eqe, "s_eq_eqe"),
            (self.residual_channel_identity, "channel_identity"),
            (self.residual_trace_equality, "trace_equality"),
        ];
        r.iter().fold(r[0], |acc, &cur| if cur.0 > acc.0 { cur } else { acc }).1
    }
}

/// `E X E` for exchange matrices of matching sizes.
fn flip_both(x: &DenseMatrix) -> DenseMatrix {
    let (m, n) = x.shape();
    DenseMatrix::from_fn(m, n, |i, j| x[(m - 1 - i, n - 1 - j)])
}

/// Check the duality identities for a D-form design with `B_i = reverse(D_i)`.
///
/// The BC side uses the lifted channels `H_i^B`; the MAC side uses their
/// reverse images `H̄_i^B`.
pub fn verify_duality_identities(design: &FeedbackDesign, spec: &ChannelSpec) -> Result<DualityReport> {
    if design.form != DesignForm::D {
        return Err(LinfbError::WrongForm { expected: "D", found: design.form.name() });
    }
    let (b1, b2) = map_mac_to_bc_params(&design.first, &design.second);
    verify_duality_identities_with(design, &b1, &b2, spec)
}

/// Same checks with an explicitly supplied BC parameter pair.
pub fn verify_duality_identities_with(
    design: &FeedbackDesign,
    b1: &BlockTriangularSet,
    b2: &BlockTriangularSet,
    spec: &ChannelSpec,
) -> Result<DualityReport> {
    design.check_spec(spec)?;
    let eta = design.eta;
    let budget = eta as f64 * spec.power - design.consumed_power();
    if budget < 0.0 {
        return Err(LinfbError::InfeasibleBudget { budget });
    }
    let (d1, d2) = (&design.first, &design.second);
    let (h1b, h2b) = spec.lifted(eta);
    let (hbar1, hbar2) = (reverse(&h1b), reverse(&h2b));

    let (n1, n2) = bc_n_matrices(b1, b2, &h1b, &h2b)?;
    let (m1, m2) = mac_m_matrices(d1, d2, &hbar1, &hbar2)?;
    let (mut res_a, mut res_b, mut res_c) = (0.0_f64, 0.0_f64, 0.0_f64);
    for (n, m, hb, hbar, b, d) in [(n1, m1, &h1b, &hbar1, b1, d1), (n2, m2, &h2b, &hbar2, b2, d2)] {
        let s = psd_sqrt(&n)?;
        let q = psd_sqrt(&m)?;
        res_a = res_a.max(max_abs_diff(&s, &flip_both(&q)));
        let bc_side = flip_both(&solve_left(&s, hb, "verify_duality_identities")?);
        let mac_side = solve_right(hbar, &q, "verify_duality_identities")?.transpose();
        res_b = res_b.max(max_abs_diff(&bc_side, &mac_side));
        res_c = res_c.max((b.gram_trace() - d.gram_trace()).abs());
    }
    Ok(DualityReport {
        residual_s_eq_eqe: res_a,
        residual_channel_identity: res_b,
        residual_trace_equality: res_c,
        eta,
        spec_digest: spec.digest(),
    })
}

/// Outcome of a batch of random duality checks.
#[derive(Clone, Debug, Serialize)]
pub struct DualityBatch {
    pub trials: usize,
    pub passed: bool,
    pub worst: DualityReport,
    pub worst_trial: usize,
    pub worst_residual: String,
}

/// Run the identities on `trials` random feasible D-form designs.
///
/// Trial `k` uses seed `seed + k` and a consumed-power fraction in
/// `[0, 0.9)`. With `corrupt`, the BC parameters are taken from the
/// unperturbed design and then the first free entry of `D₁` is shifted by
/// `1e-3` (a negative control; needs `η ≥ 2`).
pub fn verify_random_designs(
    spec: &ChannelSpec,
    eta: usize,
    trials: usize,
    seed: u64,
    second_zero: bool,
    corrupt: bool,
) -> Result<DualityBatch> {
    if trials == 0 {
        return Err(LinfbError::InvalidArgument("trials must be at least 1".into()));
    }
    let reports: Vec<DualityReport> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let s = seed.wrapping_add(k as u64);
            let mut frac_rng = ChaCha8Rng::seed_from_u64(s);
            frac_rng.set_stream(1);
            let fraction = 0.9 * frac_rng.random::<f64>();
            let mut d = random_design(spec, eta, DesignForm::D, fraction, s)?;
            if second_zero {
                d = d.with_second_zeroed();
            }
            let (b1, b2) = map_mac_to_bc_params(&d.first, &d.second);
            if corrupt && d.first.free_len() > 0 {
                let mut v = d.first.to_vec();
                v[0] += 1e-3;
                d.first = BlockTriangularSet::from_vec(eta, d.first.block_rows(), d.first.block_cols(), &v)?;
            }
            verify_duality_identities_with(&d, &b1, &b2, spec)
        })
        .collect::<Result<_>>()?;
    let (worst_trial, worst) = reports
        .iter()
        .enumerate()
        .fold((0, &reports[0]), |acc, (k, r)| if r.max_residual() > acc.1.max_residual() { (k, r) } else { acc });
    Ok(DualityBatch {
        trials,
        passed: reports.iter().all(DualityReport::passed),
        worst_residual: worst.worst_name().to_string(),
        worst: worst.clone(),
        worst_trial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mimo::Direction;

    fn m(r: usize, c: usize, v: &[f64]) -> DenseMatrix {
        DenseMatrix::from_row_slice(r, c, v)
    }

    #[test]
    fn zero_maps_to_zero() {
        let z = BlockTriangularSet::zeros(3, 2, 1).unwrap();
        let (a, b) = map_bc_to_mac_params(&z, &z);
        assert!(a.is_zero() && b.is_zero());
        assert_eq!((a.block_rows(), a.block_cols()), (1, 2));
    }

    #[test]
    fn blockwise_indices() {
        assert_eq!(blockwise_source_index(1, 2, 2).unwrap(), (1, 2));
        assert!(matches!(
            blockwise_source_index(1, 3, 3),
            Err(LinfbError::IndexOutOfRange { tau: 1, l: 3, eta: 3 })
        ));
        assert_eq!(blockwise_source_index(2, 3, 3).unwrap(), (1, 2));
        assert_eq!(whole_matrix_source_index(1, 3, 3).unwrap(), (1, 3));
        assert_eq!(whole_matrix_source_index(1, 2, 3).unwrap(), (2, 3));
    }

    #[test]
    fn blockwise_eta2_matches_whole_matrix() {
        let mut c = BlockTriangularSet::zeros(2, 2, 3).unwrap();
        c.set_block(2, 1, m(2, 3, &[1., 2., 3., 4., 5., 6.])).unwrap();
        let a = map_scheme_params_corollary5(&c).unwrap();
        assert_eq!(a, map_scheme_params_whole(&c));
        let c3 = BlockTriangularSet::zeros(3, 1, 1).unwrap();
        assert!(map_scheme_params_corollary5(&c3).is_err());
    }

    #[test]
    fn zero_design_residuals_vanish() {
        let spec = ChannelSpec::new(m(2, 2, &[1., 0.5, -0.3, 2.]), m(2, 2, &[0.2, 1., 1., 0.]), 3.0, Direction::Mac).unwrap();
        let d = FeedbackDesign::zeros(DesignForm::D, 2, &spec).unwrap();
        let r = verify_duality_identities(&d, &spec).unwrap();
        assert_eq!(r.residual_s_eq_eqe, 0.0);
        assert_eq!(r.residual_trace_equality, 0.0);
        assert!(r.residual_channel_identity < 1e-15);
    }

    #[test]
    fn corrupt_mode_is_detected() {
        let spec = ChannelSpec::siso(1.0, 0.7, 5.0, Direction::Mac).unwrap();
        let ok = verify_random_designs(&spec, 3, 10, 1, false, false).unwrap();
        assert!(ok.passed);
        let bad = verify_random_designs(&spec, 3, 10, 1, false, true).unwrap();
        assert!(!bad.passed);
        assert!(bad.worst.residual_channel_identity > 1e-6);
    }
}
