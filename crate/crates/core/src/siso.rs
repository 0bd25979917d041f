//! Closed-form and root-solved capacity quantities for scalar channels.
//!
//! All rates are in bits per channel use (base-2 logarithms).

use crate::error::{LinfbError, Result};
use crate::frontier::RegionFrontier;

/// `½ log₂(x)`.
pub fn half_log2(x: f64) -> f64 {
    0.5 * x.log2()
}

/// Gains and individual powers of a scalar two-user MAC.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalarMacSpec {
    pub h1: f64,
    pub h2: f64,
    pub p1: f64,
    pub p2: f64,
}

impl ScalarMacSpec {
    pub fn new(h1: f64, h2: f64, p1: f64, p2: f64) -> Result<Self> {
        if !(h1.is_finite() && h2.is_finite()) {
            return Err(LinfbError::InvalidArgument("channel gains must be finite".into()));
        }
        if !(p1 >= 0.0 && p2 >= 0.0 && p1.is_finite() && p2.is_finite()) {
            return Err(LinfbError::InvalidArgument(format!("powers must be finite and nonnegative, got {p1}, {p2}")));
        }
        Ok(Self { h1, h2, p1, p2 })
    }

    pub fn rho_star(&self) -> f64 {
        rho_star(self.h1, self.h2, self.p1, self.p2)
    }
}

/// Both sides of the correlation equation at `rho`:
/// `1 + a + b + 2√(ab)ρ` and `(1 + a(1−ρ²))(1 + b(1−ρ²))` with `a = h₁²P₁`,
/// `b = h₂²P₂`.
pub fn rho_equation_sides(h1: f64, h2: f64, p1: f64, p2: f64, rho: f64) -> (f64, f64) {
    let a = h1 * h1 * p1;
    let b = h2 * h2 * p2;
    let c = 1.0 - rho * rho;
    (1.0 + a + b + 2.0 * (a * b).sqrt() * rho, (1.0 + a * c) * (1.0 + b * c))
}

/// Relative residual `|LHS − RHS| / (1 + |LHS|)` of the correlation
/// equation.
pub fn rho_residual(h1: f64, h2: f64, p1: f64, p2: f64, rho: f64) -> f64 {
    let (lhs, rhs) = rho_equation_sides(h1, h2, p1, p2, rho);
    (lhs - rhs).abs() / (1.0 + lhs.abs())
}

const BISECTION_MAX_ITERS: usize = 200;

/// Optimal feedback correlation: the unique root in `[0, 1]` of
/// `1 + a + b + 2√(ab)ρ = (1 + a(1−ρ²))(1 + b(1−ρ²))`.
///
/// Returns 0 when `a·b = 0` (the equation then holds for every `ρ`).
/// Bisection on `g = LHS − RHS`, which satisfies `g(0) = −ab ≤ 0` and
/// `g(1) > 0`, followed by one guarded Newton step.
pub fn rho_star(h1: f64, h2: f64, p1: f64, p2: f64) -> f64 {
    let a = h1 * h1 * p1;
    let b = h2 * h2 * p2;
    if a * b == 0.0 {
        return 0.0;
    }
    let root_ab = (a * b).sqrt();
    let g = |rho: f64| {
        let c = 1.0 - rho * rho;
        1.0 + a + b + 2.0 * root_ab * rho - (1.0 + a * c) * (1.0 + b * c)
    };
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..BISECTION_MAX_ITERS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut rho = if g(lo).abs() <= g(hi).abs() { lo } else { hi };
    // g'(ρ) = 2√ab + 2ρ(a(1 + b(1−ρ²)) + b(1 + a(1−ρ²)))
    let c = 1.0 - rho * rho;
    let slope = 2.0 * root_ab + 2.0 * rho * (a * (1.0 + b * c) + b * (1.0 + a * c));
    if slope > 0.0 {
        let polished = rho - g(rho) / slope;
        if (0.0..=1.0).contains(&polished) && g(polished).abs() < g(rho).abs() {
            rho = polished;
        }
    }
    rho
}

/// Pentagon corner points for a fixed correlation `rho`.
fn pentagon_corners(c1: f64, c2: f64, sum: f64) -> [(f64, f64); 2] {
    let c1 = c1.max(0.0);
    let c2 = c2.max(0.0);
    let sum = sum.max(0.0);
    let r1 = c1.min(sum);
    let r2 = c2.min(sum);
    [(r1, c2.min(sum - r1).max(0.0)), (c1.min(sum - r2).max(0.0), r2)]
}

/// Bounds `(R1 max, R2 max, sum max)` of the Ozarow pentagon.
pub fn ozarow_bounds(h1: f64, h2: f64, p1: f64, p2: f64, rho: f64) -> (f64, f64, f64) {
    let a = h1 * h1 * p1;
    let b = h2 * h2 * p2;
    let c = 1.0 - rho * rho;
    (
        half_log2(1.0 + a * c),
        half_log2(1.0 + b * c),
        half_log2(1.0 + a + b + 2.0 * (a * b).sqrt() * rho),
    )
}

pub fn ozarow_pentagon(h1: f64, h2: f64, p1: f64, p2: f64, rho: f64) -> RegionFrontier {
    let (c1, c2, s) = ozarow_bounds(h1, h2, p1, p2, rho);
    RegionFrontier::from_points(pentagon_corners(c1, c2, s))
        .with_meta("kind", "ozarow-pentagon")
        .with_meta("rho", rho)
}

/// `n` evenly spaced points on `[lo, hi]`, endpoints exact.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n)
            .map(|k| {
                if k == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * (k as f64) / ((n - 1) as f64)
                }
            })
            .collect(),
    }
}

fn check_grid(name: &str, n: usize) -> Result<()> {
    if n < 2 {
        return Err(LinfbError::InvalidArgument(format!("{name} must be at least 2, got {n}")));
    }
    Ok(())
}

fn check_power(p: f64) -> Result<()> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(LinfbError::InvalidArgument(format!("total power must be positive and finite, got {p}")));
    }
    Ok(())
}

/// Correlation values swept for one power split: the uniform grid plus the
/// split's own `ρ*`, so the sum-rate-optimal pentagon is always present.
fn rho_values(rho_grid: usize, h1: f64, h2: f64, p1: f64, p2: f64) -> Vec<f64> {
    let mut v = linspace(0.0, 1.0, rho_grid);
    v.push(rho_star(h1, h2, p1, p2));
    v
}

/// Linear-feedback capacity region of the scalar MAC under a sum-power
/// constraint: union of Ozarow pentagons over power splits and correlations.
pub fn mac_siso_region(h1: f64, h2: f64, p: f64, alpha_grid: usize, rho_grid: usize) -> Result<RegionFrontier> {
    check_power(p)?;
    check_grid("alpha_grid", alpha_grid)?;
    check_grid("rho_grid", rho_grid)?;
    let mut pts = Vec::with_capacity(alpha_grid * (rho_grid + 1) * 2);
    for alpha in linspace(0.0, 1.0, alpha_grid) {
        let (p1, p2) = (alpha * p, (1.0 - alpha) * p);
        for rho in rho_values(rho_grid, h1, h2, p1, p2) {
            let (c1, c2, s) = ozarow_bounds(h1, h2, p1, p2, rho);
            pts.extend(pentagon_corners(c1, c2, s));
        }
    }
    Ok(RegionFrontier::from_points(pts)
        .with_meta("kind", "mac-siso-linfb")
        .with_meta("h1", h1)
        .with_meta("h2", h2)
        .with_meta("power", p)
        .with_meta("alpha_grid", alpha_grid)
        .with_meta("rho_grid", rho_grid))
}

/// Same union with the correlation pinned to 0: the no-feedback sum-power
/// MAC region.
pub fn mac_siso_nofb_region(h1: f64, h2: f64, p: f64, alpha_grid: usize) -> Result<RegionFrontier> {
    check_power(p)?;
    check_grid("alpha_grid", alpha_grid)?;
    let pts = linspace(0.0, 1.0, alpha_grid).into_iter().flat_map(|alpha| {
        let (c1, c2, s) = ozarow_bounds(h1, h2, alpha * p, (1.0 - alpha) * p, 0.0);
        pentagon_corners(c1, c2, s)
    });
    Ok(RegionFrontier::from_points(pts)
        .with_meta("kind", "mac-siso-nofb")
        .with_meta("alpha_grid", alpha_grid))
}

/// Sum-rate of Ozarow's scheme at power split `alpha`.
pub fn split_sum_rate(h1: f64, h2: f64, p: f64, alpha: f64) -> f64 {
    let (p1, p2) = (alpha * p, (1.0 - alpha) * p);
    let rho = rho_star(h1, h2, p1, p2);
    ozarow_bounds(h1, h2, p1, p2, rho).2
}

const SPLIT_COARSE_GRID: usize = 129;
const SPLIT_INTERVAL_TOL: f64 = 1e-10;

/// Linear-feedback sum-capacity of the scalar MAC under total power `p`.
///
/// Coarse 129-point grid over the split, then golden-section refinement of
/// the best bracket down to a `1e-10` interval.
pub fn mac_siso_sum_capacity(h1: f64, h2: f64, p: f64) -> Result<f64> {
    check_power(p)?;
    let f = |alpha: f64| split_sum_rate(h1, h2, p, alpha);
    let grid = linspace(0.0, 1.0, SPLIT_COARSE_GRID);
    let (best_k, best_val) = grid
        .iter()
        .enumerate()
        .map(|(k, &a)| (k, f(a)))
        .fold((0, f64::NEG_INFINITY), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
    let lo = grid[best_k.saturating_sub(1)];
    let hi = grid[(best_k + 1).min(grid.len() - 1)];
    let refined = golden_section_max(f, lo, hi, SPLIT_INTERVAL_TOL);
    Ok(best_val.max(refined.1))
}

/// Golden-section search for a maximum on `[lo, hi]`; returns `(x, f(x))`.
pub fn golden_section_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    let (flo, fhi) = (f(lo), f(hi));
    [(x1, f1), (x2, f2), (lo, flo), (hi, fhi)]
        .into_iter()
        .fold((lo, f64::NEG_INFINITY), |acc, cur| if cur.1 > acc.1 { cur } else { acc })
}

/// Symmetric-gain sum-capacity `½ log₂(1 + h²P(1 + ρ*(h,h;P/2,P/2)))`.
pub fn symmetric_sum_capacity(h: f64, p: f64) -> Result<f64> {
    check_power(p)?;
    let rho = rho_star(h, h, p / 2.0, p / 2.0);
    Ok(half_log2(1.0 + h * h * p * (1.0 + rho)))
}

/// `√(α(1−α)) · ρ*(h,h;αP,(1−α)P)`.
pub fn zeta(alpha: f64, h: f64, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(LinfbError::InvalidArgument(format!("alpha must lie in [0,1], got {alpha}")));
    }
    if alpha == 0.0 || alpha == 1.0 {
        return Ok(0.0);
    }
    Ok((alpha * (1.0 - alpha)).sqrt() * rho_star(h, h, alpha * p, (1.0 - alpha) * p))
}

fn norm(v: &[f64]) -> Result<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n == 0.0 || v.is_empty() {
        return Err(LinfbError::ZeroVector);
    }
    Ok(n)
}

/// MISO MAC region: the scalar region with gains `‖h₁‖`, `‖h₂‖`.
pub fn miso_mac_region(h1: &[f64], h2: &[f64], p: f64, alpha_grid: usize, rho_grid: usize) -> Result<RegionFrontier> {
    let (g1, g2) = (norm(h1)?, norm(h2)?);
    Ok(mac_siso_region(g1, g2, p, alpha_grid, rho_grid)?.with_meta("kind", "mac-miso-linfb"))
}

/// How the cross-correlation term `β` of the SIMO sum bound is chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SimoBeta {
    /// `β = |h₁ᵀh₂| / (‖h₁‖‖h₂‖)`, the cosine between the receive vectors.
    FromChannel,
    /// Union over `n` evenly spaced values in `[−1, 1]`.
    Union(usize),
}

/// Sum bound of the SIMO pentagon.
pub fn simo_sum_bound(n1sq: f64, n2sq: f64, p1: f64, p2: f64, rho: f64, beta: f64) -> f64 {
    let (a, b) = (n1sq * p1, n2sq * p2);
    half_log2(1.0 + a + b + 2.0 * rho * beta * (a * b).sqrt() + a * b * (1.0 - rho * rho) * (1.0 - beta * beta))
}

/// SIMO MAC region (receiver with `κ` antennas, single-antenna users).
pub fn simo_mac_region(
    h1: &[f64],
    h2: &[f64],
    p: f64,
    alpha_grid: usize,
    rho_grid: usize,
    beta: SimoBeta,
) -> Result<RegionFrontier> {
    check_power(p)?;
    check_grid("alpha_grid", alpha_grid)?;
    check_grid("rho_grid", rho_grid)?;
    let (g1, g2) = (norm(h1)?, norm(h2)?);
    if h1.len() != h2.len() {
        return Err(crate::error::mismatch("simo_mac_region", h1.len(), h2.len()));
    }
    let betas = match beta {
        SimoBeta::FromChannel => {
            let dot: f64 = h1.iter().zip(h2).map(|(x, y)| x * y).sum();
            vec![(dot.abs() / (g1 * g2)).min(1.0)]
        }
        SimoBeta::Union(n) => {
            check_grid("beta_grid", n)?;
            linspace(-1.0, 1.0, n)
        }
    };
    let (n1sq, n2sq) = (g1 * g1, g2 * g2);
    let mut pts = Vec::new();
    for alpha in linspace(0.0, 1.0, alpha_grid) {
        let (p1, p2) = (alpha * p, (1.0 - alpha) * p);
        for rho in rho_values(rho_grid, g1, g2, p1, p2) {
            let c = 1.0 - rho * rho;
            let c1 = half_log2(1.0 + n1sq * p1 * c);
            let c2 = half_log2(1.0 + n2sq * p2 * c);
            for &bt in &betas {
                pts.extend(pentagon_corners(c1, c2, simo_sum_bound(n1sq, n2sq, p1, p2, rho, bt)));
            }
        }
    }
    let beta_meta = match beta {
        SimoBeta::FromChannel => format!("channel:{}", betas[0]),
        SimoBeta::Union(n) => format!("union:{n}"),
    };
    Ok(RegionFrontier::from_points(pts)
        .with_meta("kind", "mac-simo-linfb")
        .with_meta("alpha_grid", alpha_grid)
        .with_meta("rho_grid", rho_grid)
        .with_meta("beta", beta_meta))
}

/// Which form of the K-user fixed-point equation to solve.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhiVariant {
    /// `(1+Pφ)^{K−1} = 1 + (P/K)φ(K−φ)`.
    Printed,
    /// `(1+Pφ)^{K−1} = (1 + (P/K)φ(K−φ))^K`.
    ExponentK,
}

impl PhiVariant {
    pub fn name(self) -> &'static str {
        match self {
            PhiVariant::Printed => "printed",
            PhiVariant::ExponentK => "exponent-K",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "printed" => Some(PhiVariant::Printed),
            "exponent-K" | "exponent-k" => Some(PhiVariant::ExponentK),
            _ => None,
        }
    }
}

/// Log-domain residual `(K−1)ln(1+Pφ) − e·ln(1 + (P/K)φ(K−φ))` with
/// `e = 1` (printed) or `e = K`.
pub fn phi_residual(k: usize, p: f64, phi: f64, variant: PhiVariant) -> f64 {
    let kf = k as f64;
    let exponent = match variant {
        PhiVariant::Printed => 1.0,
        PhiVariant::ExponentK => kf,
    };
    (kf - 1.0) * (p * phi).ln_1p() - exponent * ((p / kf) * phi * (kf - phi)).ln_1p()
}

/// Endpoint residuals of the fixed-point equation on `[1, K]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhiDiagnostic {
    pub variant: PhiVariant,
    pub k: usize,
    pub power: f64,
    pub residual_at_1: f64,
    pub residual_at_k: f64,
    /// Smallest `|residual|` on a 1001-point scan of `[1, K]`.
    pub min_abs_residual: f64,
    pub argmin: f64,
}

pub fn phi_diagnostic(k: usize, p: f64, variant: PhiVariant) -> PhiDiagnostic {
    let kf = k as f64;
    let (argmin, min_abs_residual) = linspace(1.0, kf, 1001)
        .into_iter()
        .map(|phi| (phi, phi_residual(k, p, phi, variant).abs()))
        .fold((1.0, f64::INFINITY), |acc, cur| if cur.1 < acc.1 { cur } else { acc });
    PhiDiagnostic {
        variant,
        k,
        power: p,
        residual_at_1: phi_residual(k, p, 1.0, variant),
        residual_at_k: phi_residual(k, p, kf, variant),
        min_abs_residual,
        argmin,
    }
}

/// Root of the K-user fixed-point equation in `[1, K]`, by bisection on the
/// log-domain residual.
pub fn phi_k(k: usize, p: f64, variant: PhiVariant) -> Result<f64> {
    if k < 2 {
        return Err(LinfbError::InvalidArgument(format!("K must be at least 2, got {k}")));
    }
    check_power(p)?;
    let kf = k as f64;
    let f = |phi: f64| phi_residual(k, p, phi, variant);
    let (f_lo, f_hi) = (f(1.0), f(kf));
    if f_lo == 0.0 {
        return Ok(1.0);
    }
    if f_hi == 0.0 {
        return Ok(kf);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(LinfbError::NoRoot { variant: variant.name(), k });
    }
    let (mut lo, mut hi) = (1.0_f64, kf);
    let lo_negative = f_lo < 0.0;
    for _ in 0..BISECTION_MAX_ITERS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(if f(lo).abs() <= f(hi).abs() { lo } else { hi })
}

/// `½ log₂(1 + P·φ(K,P))`. Here `P` is the effective per-channel SNR
/// `h²P` of the equal-gain channel.
pub fn k_user_symmetric_sum_capacity(k: usize, p: f64, variant: PhiVariant) -> Result<f64> {
    let phi = phi_k(k, p, variant)?;
    Ok(half_log2(1.0 + p * phi))
}

/// No-feedback scalar BC region (degraded, superposition coding).
///
/// `alpha` is the power share of the stronger user, who decodes and strips
/// the weaker user's layer.
pub fn nofb_bc_siso_region(h1: f64, h2: f64, p: f64, grid: usize) -> Result<RegionFrontier> {
    check_power(p)?;
    check_grid("grid", grid)?;
    let user1_strong = h1.abs() >= h2.abs();
    let (g2, w2) = if user1_strong { (h1 * h1, h2 * h2) } else { (h2 * h2, h1 * h1) };
    let pts = linspace(0.0, 1.0, grid).into_iter().map(|alpha| {
        let strong = half_log2(1.0 + g2 * alpha * p);
        let weak = half_log2(1.0 + w2 * (1.0 - alpha) * p / (1.0 + w2 * alpha * p));
        if user1_strong {
            (strong, weak)
        } else {
            (weak, strong)
        }
    });
    Ok(RegionFrontier::from_points(pts)
        .with_meta("kind", "bc-siso-nofb")
        .with_meta("grid", grid))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Plain bisection on the unscaled residual, independent of `rho_star`.
    fn rho_oracle(h1: f64, h2: f64, p1: f64, p2: f64) -> f64 {
        let g = |r: f64| {
            let (l, rr) = rho_equation_sides(h1, h2, p1, p2, r);
            l - rr
        };
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if g(mid) < 0.0 {
                lo = mid
            } else {
                hi = mid
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn rho_star_degenerate_inputs() {
        assert_eq!(rho_star(1.0, 1.0, 0.0, 5.0), 0.0);
        assert_eq!(rho_star(1.0, 1.0, 0.0, 0.0), 0.0);
        assert_eq!(rho_star(0.0, 1.0, 3.0, 5.0), 0.0);
    }

    #[test]
    fn rho_star_symmetric_p5() {
        // 11 + 10ρ = (6 − 5ρ²)²
        let rho = rho_star(1.0, 1.0, 5.0, 5.0);
        assert!((rho - rho_oracle(1.0, 1.0, 5.0, 5.0)).abs() < 1e-14);
        let lhs = 11.0 + 10.0 * rho;
        let rhs = (6.0 - 5.0 * rho * rho).powi(2);
        assert!((lhs - rhs).abs() < 1e-12 * (1.0 + lhs));
        assert!(rho_residual(1.0, 1.0, 5.0, 5.0, rho) < 1e-12);
    }

    #[test]
    fn rho_star_monotone_in_power() {
        let mut prev = 0.0;
        for k in 1..200 {
            let p = 0.25 * k as f64;
            let r = rho_star(1.0, 1.0, p / 2.0, p / 2.0);
            assert!(r >= prev - 1e-15, "rho* decreased at P={p}");
            prev = r;
        }
    }

    #[test]
    fn pentagon_special_rhos() {
        let full = ozarow_pentagon(1.0, 1.0, 5.0, 5.0, 1.0);
        assert_eq!(full.points, vec![(0.0, 0.0)]);
        let indep = ozarow_pentagon(1.0, 2.0, 3.0, 1.0, 0.0);
        let s = indep.max_sum_rate();
        assert!((s - half_log2(1.0 + 3.0 + 4.0)).abs() < 1e-14);
        assert_eq!(indep.points.len(), 2);
    }

    #[test]
    fn pentagon_at_rho_star_meets_sum_capacity() {
        let rho = rho_star(1.0, 1.0, 5.0, 5.0);
        let pent = ozarow_pentagon(1.0, 1.0, 5.0, 5.0, rho);
        let cap = symmetric_sum_capacity(1.0, 10.0).unwrap();
        assert!((pent.max_sum_rate() - cap).abs() < 1e-12);
    }

    #[test]
    fn silent_second_user_region() {
        let f = mac_siso_region(2.0, 0.0, 3.0, 11, 11).unwrap();
        assert_eq!(f.points.len(), 1);
        assert!((f.points[0].0 - half_log2(1.0 + 12.0)).abs() < 1e-14);
        assert_eq!(f.points[0].1, 0.0);
    }

    #[test]
    fn sum_capacity_edge_cases() {
        assert!((mac_siso_sum_capacity(1.0, 0.0, 10.0).unwrap() - half_log2(11.0)).abs() < 1e-12);
        let sym = symmetric_sum_capacity(1.0, 10.0).unwrap();
        assert!((mac_siso_sum_capacity(1.0, 1.0, 10.0).unwrap() - sym).abs() < 1e-8);
        assert_eq!(symmetric_sum_capacity(0.0, 10.0).unwrap(), 0.0);
        assert!(mac_siso_sum_capacity(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn asymmetric_sum_capacity_matches_dense_grid() {
        let h1 = 1.0 / 5.0_f64.sqrt();
        let opt = mac_siso_sum_capacity(h1, 1.0, 10.0).unwrap();
        let dense = linspace(0.0, 1.0, 10_001)
            .into_iter()
            .map(|a| split_sum_rate(h1, 1.0, 10.0, a))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(opt >= dense - 1e-12);
        assert!((opt - dense).abs() < 1e-6);
    }

    #[test]
    fn zeta_edges_and_symmetry() {
        assert_eq!(zeta(0.0, 1.0, 10.0).unwrap(), 0.0);
        assert_eq!(zeta(1.0, 1.0, 10.0).unwrap(), 0.0);
        for a in linspace(0.0, 1.0, 101) {
            let d = zeta(a, 0.7, 3.0).unwrap() - zeta(1.0 - a, 0.7, 3.0).unwrap();
            assert!(d.abs() < 1e-10);
        }
        assert!(zeta(1.5, 1.0, 1.0).is_err());
    }

    #[test]
    fn miso_uses_vector_norms() {
        let a = miso_mac_region(&[3.0, 4.0], &[1.0], 2.0, 9, 9).unwrap();
        let b = mac_siso_region(5.0, 1.0, 2.0, 9, 9).unwrap();
        assert_eq!(a.points, b.points);
        assert!(matches!(miso_mac_region(&[0.0, 0.0], &[1.0], 2.0, 9, 9), Err(LinfbError::ZeroVector)));
    }

    #[test]
    fn simo_sum_bound_reductions() {
        let (n1, n2, p1, p2): (f64, f64, f64, f64) = (2.0, 0.5, 3.0, 4.0);
        for rho in [0.0, 0.3, 0.9] {
            let oz = ozarow_bounds(n1.sqrt(), n2.sqrt(), p1, p2, rho).2;
            assert!((simo_sum_bound(n1, n2, p1, p2, rho, 1.0) - oz).abs() < 1e-14);
        }
        let indep = half_log2((1.0 + n1 * p1) * (1.0 + n2 * p2));
        assert!((simo_sum_bound(n1, n2, p1, p2, 0.0, 0.0) - indep).abs() < 1e-14);
    }

    #[test]
    fn simo_sum_bound_is_the_log_det() {
        // ½log det(I + H K Hᵀ) with H = [h1 h2] and input correlation ρ
        let h1: [f64; 3] = [0.8, -0.3, 1.1];
        let h2 = [0.2, 0.9, 0.4];
        let (p1, p2, rho): (f64, f64, f64) = (2.0, 3.0, 0.45);
        let h = nalgebra::DMatrix::from_fn(3, 2, |i, j| if j == 0 { h1[i] } else { h2[i] });
        let c = rho * (p1 * p2).sqrt();
        let k = nalgebra::DMatrix::from_row_slice(2, 2, &[p1, c, c, p2]);
        let det = (nalgebra::DMatrix::identity(3, 3) + &h * k * h.transpose()).determinant();
        let n1sq: f64 = h1.iter().map(|x| x * x).sum();
        let n2sq: f64 = h2.iter().map(|x| x * x).sum();
        let dot: f64 = h1.iter().zip(&h2).map(|(x, y)| x * y).sum();
        let beta = dot / (n1sq * n2sq).sqrt();
        assert!((simo_sum_bound(n1sq, n2sq, p1, p2, rho, beta) - half_log2(det)).abs() < 1e-13);
    }

    #[test]
    fn simo_colinear_equals_siso() {
        let a = simo_mac_region(&[1.0, 2.0], &[-0.5, -1.0], 4.0, 21, 21, SimoBeta::FromChannel).unwrap();
        let b = mac_siso_region(5.0_f64.sqrt(), 1.25_f64.sqrt(), 4.0, 21, 21).unwrap();
        assert!(a.hausdorff(&b) < 1e-12);
    }

    #[test]
    fn phi_exponent_k_matches_ozarow_at_two_users() {
        for p in [1.0, 10.0, 100.0] {
            let phi = phi_k(2, p, PhiVariant::ExponentK).unwrap();
            let rho = rho_star(1.0, 1.0, p / 2.0, p / 2.0);
            assert!((phi - (1.0 + rho)).abs() < 1e-8);
            assert!(phi_residual(2, p, phi, PhiVariant::ExponentK).abs() < 1e-11);
        }
    }

    #[test]
    fn phi_printed_has_no_root_at_two_users() {
        let err = phi_k(2, 10.0, PhiVariant::Printed).unwrap_err();
        assert!(matches!(err, LinfbError::NoRoot { variant: "printed", k: 2 }));
        let d = phi_diagnostic(2, 10.0, PhiVariant::Printed);
        assert!(d.residual_at_1 > 0.0 && d.residual_at_k > 0.0);
    }

    #[test]
    fn phi_rejects_bad_k() {
        assert!(phi_k(1, 10.0, PhiVariant::ExponentK).is_err());
    }

    #[test]
    fn nofb_bc_endpoints_and_symmetry() {
        let f = nofb_bc_siso_region(1.0, 0.5, 10.0, 11).unwrap();
        assert_eq!(f.points.first().unwrap().0, 0.0);
        assert!((f.points.first().unwrap().1 - half_log2(1.0 + 0.25 * 10.0)).abs() < 1e-14);
        assert!((f.points.last().unwrap().0 - half_log2(11.0)).abs() < 1e-14);
        let sym = nofb_bc_siso_region(1.0, 1.0, 10.0, 51).unwrap();
        for &(a, b) in &sym.points {
            assert!(sym.slack((b, a)).abs() < 1e-10);
        }
    }
}
