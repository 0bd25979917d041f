use linfb_core::blockmat::{
    exchange_matrix, kron_lift, max_abs_diff, off_pattern_magnitude, omega, omega_inv, omega_tilde, omega_tilde_inv,
    reverse, BlockTriangularSet, DenseMatrix,
};
use proptest::prelude::*;

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = DenseMatrix> {
    prop::collection::vec(-3.0..3.0_f64, rows * cols).prop_map(move |v| DenseMatrix::from_row_slice(rows, cols, &v))
}

fn dims() -> impl Strategy<Value = (usize, usize, usize)> {
    (1..6usize, 1..6usize, 1..6usize)
}

fn set(eta: usize, r: usize, c: usize, scale: f64) -> impl Strategy<Value = BlockTriangularSet> {
    let n = eta * (eta - 1) / 2 * r * c;
    prop::collection::vec(-1.0..1.0_f64, n)
        .prop_map(move |v| BlockTriangularSet::from_vec(eta, r, c, &v).unwrap().scaled(scale))
}

proptest! {
    #[test]
    fn double_reverse_is_identity((r, c, _) in dims(), seed in any::<u64>()) {
        let a = DenseMatrix::from_fn(r, c, |i, j| ((seed.wrapping_add((i * 7 + j) as u64) % 1000) as f64).sin());
        prop_assert_eq!(reverse(&reverse(&a)), a);
    }

    #[test]
    fn reverse_is_exchange_conjugated_transpose(a in (1..6usize, 1..6usize).prop_flat_map(|(r, c)| matrix(r, c))) {
        let e = exchange_matrix(a.ncols()) * a.transpose() * exchange_matrix(a.nrows());
        prop_assert_eq!(reverse(&a), e);
    }

    #[test]
    fn product_rule((a, b) in dims().prop_flat_map(|(r, k, c)| (matrix(r, k), matrix(k, c)))) {
        let lhs = reverse(&(&a * &b));
        let rhs = reverse(&b) * reverse(&a);
        prop_assert!(max_abs_diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn inverse_rule(a in (1..6usize).prop_flat_map(|n| matrix(n, n))) {
        let n = a.nrows();
        let a = a + DenseMatrix::identity(n, n) * 8.0;
        let lhs = reverse(&a.clone().try_inverse().unwrap());
        let rhs = reverse(&a).try_inverse().unwrap();
        prop_assert!(max_abs_diff(&lhs, &rhs) < 1e-9);
    }

    #[test]
    fn reversed_sets_stay_strictly_lower(
        s in (1..5usize, 1..4usize, 1..4usize).prop_flat_map(|(eta, r, c)| set(eta, r, c, 1.0))
    ) {
        let rev = s.reversed();
        prop_assert_eq!((rev.block_rows(), rev.block_cols()), (s.block_cols(), s.block_rows()));
        let dense = rev.to_dense();
        prop_assert_eq!(off_pattern_magnitude(&dense, rev.eta(), rev.block_rows(), rev.block_cols()), 0.0);
        prop_assert_eq!(dense, reverse(&s.to_dense()));
        prop_assert_eq!(rev.reversed(), s);
    }

    #[test]
    fn lifted_channel_reverse_commutes(h in (1..4usize, 1..4usize).prop_flat_map(|(r, c)| matrix(r, c)), eta in 1..5usize) {
        prop_assert_eq!(reverse(&kron_lift(&h, eta)), kron_lift(&reverse(&h), eta));
    }

    #[test]
    fn omega_round_trip(
        (eta, k, n1, n2) in (1..5usize, 1..3usize, 1..3usize, 1..3usize),
        seed in any::<u64>(),
    ) {
        let h1 = DenseMatrix::from_fn(n1, k, |i, j| (seed as f64 * 1e-19 + (i + 2 * j) as f64).cos());
        let h2 = DenseMatrix::from_fn(n2, k, |i, j| (seed as f64 * 1e-19 + (3 * i + j) as f64).sin());
        let (h1b, h2b) = (kron_lift(&h1, eta), kron_lift(&h2, eta));
        let mk = |r, c, salt: f64| {
            let n = eta * (eta - 1) / 2 * r * c;
            let v: Vec<f64> = (0..n).map(|i| (salt + i as f64 * 1.7 + seed as f64 * 1e-18).sin()).collect();
            BlockTriangularSet::from_vec(eta, r, c, &v).unwrap()
        };
        let (a1, a2) = (mk(k, n1, 0.3), mk(k, n2, 1.1));
        let (b1, b2) = omega(&a1, &a2, &h1b, &h2b).unwrap();
        let (r1, r2) = omega_inv(&b1, &b2, &h1b, &h2b).unwrap();
        prop_assert!(r1.max_abs_diff(&a1) < 1e-10 && r2.max_abs_diff(&a2) < 1e-10);

        let (g1, g2) = (h1b.transpose(), h2b.transpose());
        let (c1, c2) = (mk(n1, k, 2.0), mk(n2, k, 0.7));
        let (d1, d2) = omega_tilde(&c1, &c2, &g1, &g2).unwrap();
        let (s1, s2) = omega_tilde_inv(&d1, &d2, &g1, &g2).unwrap();
        prop_assert!(s1.max_abs_diff(&c1) < 1e-10 && s2.max_abs_diff(&c2) < 1e-10);
    }
}

#[test]
fn one_sided_feedback_keeps_zero_block() {
    let h1 = DenseMatrix::from_row_slice(2, 2, &[1.0, 0.4, -0.2, 0.9]);
    let h2 = DenseMatrix::from_row_slice(1, 2, &[0.5, 1.5]);
    let eta = 3;
    let (h1b, h2b) = (kron_lift(&h1, eta), kron_lift(&h2, eta));
    let a1 = BlockTriangularSet::from_vec(eta, 2, 2, &(0..12).map(|i| (i as f64).sin()).collect::<Vec<_>>()).unwrap();
    let a2 = BlockTriangularSet::zeros(eta, 2, 1).unwrap();
    let (b1, b2) = omega(&a1, &a2, &h1b, &h2b).unwrap();
    assert!(b2.is_zero());
    assert!(!b1.is_zero());
    let (g1, g2) = (h1b.transpose(), h2b.transpose());
    let c1 = BlockTriangularSet::from_vec(eta, 2, 2, &(0..12).map(|i| (i as f64).cos()).collect::<Vec<_>>()).unwrap();
    let c2 = BlockTriangularSet::zeros(eta, 1, 2).unwrap();
    let (_, d2) = omega_tilde(&c1, &c2, &g1, &g2).unwrap();
    assert!(d2.is_zero());
}
