//! Sample-level simulation of the inner codes.
//!
//! Gaussian draws use `rand_distr::StandardNormal` (ziggurat) on ChaCha8
//! streams: a [`RngSpec`] seeds the generator with `seed` and selects the
//! stream from an FNV-1a hash of its label.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::blockmat::{inverse, mac_m_matrices, psd_sqrt, BlockTriangularSet, DenseMatrix};
use crate::error::{mismatch, LinfbError, Result};
use crate::mimo::{ChannelSpec, CovariancePair, DesignForm, FeedbackDesign};

pub type Vector = DVector<f64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RngSpec {
    pub seed: u64,
    pub stream: String,
}

impl RngSpec {
    pub fn new(seed: u64, stream: &str) -> Self {
        Self { seed, stream: stream.to_string() }
    }

    fn stream_id(&self) -> u64 {
        self.stream.bytes().fold(0xcbf2_9ce4_8422_2325_u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
    }

    /// Generator for sub-stream `index` of this spec.
    pub fn rng(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id().wrapping_add(index));
        rng
    }
}

pub fn standard_normal(rng: &mut impl Rng, n: usize) -> Vector {
    Vector::from_fn(n, |_, _| rng.sample(StandardNormal))
}

/// One block of the BC inner code.
#[derive(Clone, Debug, PartialEq)]
pub struct BcBlockSample {
    pub u: Vector,
    pub z1: Vector,
    pub z2: Vector,
    pub x: Vector,
    pub y1: Vector,
    pub y2: Vector,
}

/// One block of the MAC inner code.
#[derive(Clone, Debug, PartialEq)]
pub struct MacBlockSample {
    pub u1: Vector,
    pub u2: Vector,
    pub z: Vector,
    pub x1: Vector,
    pub x2: Vector,
    pub y: Vector,
}

impl BcBlockSample {
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        [(&self.x, &other.x), (&self.y1, &other.y1), (&self.y2, &other.y2)]
            .iter()
            .map(|(a, b)| (*a - *b).amax())
            .fold(0.0, f64::max)
    }
}

impl MacBlockSample {
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        [(&self.x1, &other.x1), (&self.x2, &other.x2), (&self.y, &other.y)]
            .iter()
            .map(|(a, b)| (*a - *b).amax())
            .fold(0.0, f64::max)
    }
}

fn check_len(v: &Vector, n: usize, ctx: &'static str) -> Result<()> {
    if v.len() != n {
        return Err(mismatch(ctx, n, v.len()));
    }
    Ok(())
}

fn expect_form(design: &FeedbackDesign, form: DesignForm) -> Result<()> {
    if design.form != form {
        return Err(LinfbError::WrongForm { expected: form.name(), found: design.form.name() });
    }
    Ok(())
}

/// `Σ_{τ<t} block(t, τ) · y[τ]`, with `y` split into `eta` equal pieces.
fn feedback_sum(set: &BlockTriangularSet, t: usize, y: &Vector, out: &mut Vector) -> Result<()> {
    let n = set.block_cols();
    for tau in 1..t {
        let piece = y.rows((tau - 1) * n, n);
        *out += set.block(t, tau)? * piece;
    }
    Ok(())
}

/// Run the BC encoder sub-block by sub-block: sub-block `t` uses only the
/// outputs of sub-blocks `< t`.
///
/// `X = (I − A₁H₁ − A₂H₂)U + A₁Y₁ + A₂Y₂`, `Y_i = H_i^B X + Z_i`.
pub fn simulate_bc_block(design: &FeedbackDesign, spec: &ChannelSpec, u: &Vector, z1: &Vector, z2: &Vector) -> Result<BcBlockSample> {
    expect_form(design, DesignForm::A)?;
    design.check_spec(spec)?;
    let eta = design.eta;
    let (k, n1, n2) = (spec.kappa(), spec.nu1(), spec.nu2());
    check_len(u, eta * k, "simulate_bc_block U")?;
    check_len(z1, eta * n1, "simulate_bc_block Z1")?;
    check_len(z2, eta * n2, "simulate_bc_block Z2")?;
    let (h1b, h2b) = spec.lifted(eta);
    let (a1, a2) = (design.first.to_dense(), design.second.to_dense());
    // message-only precoding, available before transmission starts
    let v = u - (&a1 * &h1b + &a2 * &h2b) * u;
    let mut x = Vector::zeros(eta * k);
    let mut y1 = Vector::zeros(eta * n1);
    let mut y2 = Vector::zeros(eta * n2);
    for t in 1..=eta {
        let mut xt: Vector = v.rows((t - 1) * k, k).into_owned();
        feedback_sum(&design.first, t, &y1, &mut xt)?;
        feedback_sum(&design.second, t, &y2, &mut xt)?;
        let y1t = &spec.h1 * &xt + z1.rows((t - 1) * n1, n1);
        let y2t = &spec.h2 * &xt + z2.rows((t - 1) * n2, n2);
        x.rows_mut((t - 1) * k, k).copy_from(&xt);
        y1.rows_mut((t - 1) * n1, n1).copy_from(&y1t);
        y2.rows_mut((t - 1) * n2, n2).copy_from(&y2t);
    }
    Ok(BcBlockSample { u: u.clone(), z1: z1.clone(), z2: z2.clone(), x, y1, y2 })
}

/// Noise-form expressions: `X = U + B₁Z₁ + B₂Z₂` and
/// `Y_i = H_i U + (I + H_iB_i)Z_i + H_iB_jZ_j` with `B = ω(A)`.
pub fn bc_closed_form(design: &FeedbackDesign, spec: &ChannelSpec, u: &Vector, z1: &Vector, z2: &Vector) -> Result<BcBlockSample> {
    let b = design.to_noise_form(spec)?;
    expect_form(&b, DesignForm::B)?;
    let (h1b, h2b) = spec.lifted(b.eta);
    let (b1, b2) = (b.first.to_dense(), b.second.to_dense());
    let x = u + &b1 * z1 + &b2 * z2;
    let y1 = &h1b * u + z1 + &h1b * (&b1 * z1) + &h1b * (&b2 * z2);
    let y2 = &h2b * u + z2 + &h2b * (&b2 * z2) + &h2b * (&b1 * z1);
    Ok(BcBlockSample { u: u.clone(), z1: z1.clone(), z2: z2.clone(), x, y1, y2 })
}

/// Whitening factors `Q_i⁻¹` of a D-form design.
pub fn mac_whitening_inverses(d: &FeedbackDesign, spec: &ChannelSpec) -> Result<(DenseMatrix, DenseMatrix)> {
    expect_form(d, DesignForm::D)?;
    let (g1, g2) = spec.mac_lifted(d.eta);
    let (m1, m2) = mac_m_matrices(&d.first, &d.second, &g1, &g2)?;
    Ok((inverse(&psd_sqrt(&m1)?, "Q1")?, inverse(&psd_sqrt(&m2)?, "Q2")?))
}

/// Run both MAC encoders sub-block by sub-block:
/// `X_i = Q_i⁻¹U_i + C_i Y`, `Y = H₁ᵀX₁ + H₂ᵀX₂ + Z` per sub-block, with
/// `Q_i` from the induced D-form design.
pub fn simulate_mac_block(design: &FeedbackDesign, spec: &ChannelSpec, u1: &Vector, u2: &Vector, z: &Vector) -> Result<MacBlockSample> {
    expect_form(design, DesignForm::C)?;
    design.check_spec(spec)?;
    let eta = design.eta;
    let (k, n1, n2) = (spec.kappa(), spec.nu1(), spec.nu2());
    check_len(u1, eta * n1, "simulate_mac_block U1")?;
    check_len(u2, eta * n2, "simulate_mac_block U2")?;
    check_len(z, eta * k, "simulate_mac_block Z")?;
    let d = design.to_noise_form(spec)?;
    let (qi1, qi2) = mac_whitening_inverses(&d, spec)?;
    let (w1, w2) = (&qi1 * u1, &qi2 * u2);
    let (h1t, h2t) = (spec.h1.transpose(), spec.h2.transpose());
    let mut x1 = Vector::zeros(eta * n1);
    let mut x2 = Vector::zeros(eta * n2);
    let mut y = Vector::zeros(eta * k);
    for t in 1..=eta {
        let mut x1t: Vector = w1.rows((t - 1) * n1, n1).into_owned();
        let mut x2t: Vector = w2.rows((t - 1) * n2, n2).into_owned();
        feedback_sum(&design.first, t, &y, &mut x1t)?;
        feedback_sum(&design.second, t, &y, &mut x2t)?;
        let yt = &h1t * &x1t + &h2t * &x2t + z.rows((t - 1) * k, k);
        x1.rows_mut((t - 1) * n1, n1).copy_from(&x1t);
        x2.rows_mut((t - 1) * n2, n2).copy_from(&x2t);
        y.rows_mut((t - 1) * k, k).copy_from(&yt);
    }
    Ok(MacBlockSample { u1: u1.clone(), u2: u2.clone(), z: z.clone(), x1, x2, y })
}

/// Closed forms `Y = (I − G₁C₁ − G₂C₂)⁻¹(G₁Q₁⁻¹U₁ + G₂Q₂⁻¹U₂ + Z)` and
/// `X_i = Q_i⁻¹U_i + D_i(G₁Q₁⁻¹U₁ + G₂Q₂⁻¹U₂ + Z)`.
pub fn mac_closed_form(design: &FeedbackDesign, spec: &ChannelSpec, u1: &Vector, u2: &Vector, z: &Vector) -> Result<MacBlockSample> {
    expect_form(design, DesignForm::C)?;
    let d = design.to_noise_form(spec)?;
    let (qi1, qi2) = mac_whitening_inverses(&d, spec)?;
    let (g1, g2) = spec.mac_lifted(d.eta);
    let (c1, c2) = (design.first.to_dense(), design.second.to_dense());
    let n = g1.nrows();
    let t = DenseMatrix::identity(n, n) - &g1 * &c1 - &g2 * &c2;
    let (w1, w2) = (&qi1 * u1, &qi2 * u2);
    let inner = &g1 * &w1 + &g2 * &w2 + z;
    let y = t.lu().solve(&inner).ok_or(LinfbError::Singular("mac_closed_form"))?;
    let x1 = &w1 + d.first.to_dense() * &inner;
    let x2 = &w2 + d.second.to_dense() * &inner;
    Ok(MacBlockSample { u1: u1.clone(), u2: u2.clone(), z: z.clone(), x1, x2, y })
}

/// `F` with `F Fᵀ = K` for a symmetric PSD `K`.
fn cov_factor(k: &DenseMatrix) -> DenseMatrix {
    let e = ((k + k.transpose()) * 0.5).symmetric_eigen();
    let d = DenseMatrix::from_diagonal(&e.eigenvalues.map(|l| l.max(0.0).sqrt()));
    &e.eigenvectors * d
}

/// Result of [`verify_power_lemma`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PowerReport {
    pub form: String,
    pub eta: usize,
    pub trials: usize,
    /// Monte-Carlo mean of the total block input energy.
    pub empirical: f64,
    /// `E‖U₁‖² + E‖U₂‖² + tr(M₁M₁ᵀ) + tr(M₂M₂ᵀ)` (one `U` on the BC).
    pub analytic: f64,
    /// The same energy from the input covariance of the realized `X`.
    pub covariance_energy: f64,
    /// `|covariance_energy − analytic|`.
    pub identity_residual: f64,
    pub standard_error: f64,
    pub gap: f64,
    pub relative_gap: f64,
    pub passed: bool,
}

/// Default input covariances: the remaining budget spread evenly over all
/// input coordinates.
pub fn default_covariances(design: &FeedbackDesign, spec: &ChannelSpec) -> Result<CovariancePair> {
    let eta = design.eta;
    let budget = eta as f64 * spec.power - design.to_noise_form(spec)?.consumed_power();
    if budget < 0.0 {
        return Err(LinfbError::InfeasibleBudget { budget });
    }
    if design.form.is_bc() {
        let n = eta * spec.kappa();
        Ok(CovariancePair { k1: DenseMatrix::identity(n, n) * (budget / n as f64), k2: DenseMatrix::zeros(0, 0) })
    } else {
        let (n1, n2) = (eta * spec.nu1(), eta * spec.nu2());
        let share = budget / (n1 + n2) as f64;
        Ok(CovariancePair { k1: DenseMatrix::identity(n1, n1) * share, k2: DenseMatrix::identity(n2, n2) * share })
    }
}

/// Linear map from the stacked Gaussian sources to the stacked inputs:
/// `X = T · [U-sources; noises]`, along with the source dims and the
/// analytic energy.
struct InputMap {
    /// Columns act on `[U₁; U₂; Z]` (MAC) or `[U; Z₁; Z₂]` (BC).
    t: DenseMatrix,
    /// Covariance of the stacked sources, as a factor.
    source_factor: DenseMatrix,
    analytic: f64,
}

fn block_diag(parts: &[&DenseMatrix]) -> DenseMatrix {
    let n: usize = parts.iter().map(|p| p.nrows()).sum();
    let m: usize = parts.iter().map(|p| p.ncols()).sum();
    let mut out = DenseMatrix::zeros(n, m);
    let (mut r, mut c) = (0, 0);
    for p in parts {
        out.view_mut((r, c), p.shape()).copy_from(p);
        r += p.nrows();
        c += p.ncols();
    }
    out
}

fn input_map(design: &FeedbackDesign, spec: &ChannelSpec, cov: &CovariancePair) -> Result<InputMap> {
    let noise = design.to_noise_form(spec)?;
    let eta = noise.eta;
    let consumed = noise.consumed_power();
    if noise.form == DesignForm::B {
        let n = eta * spec.kappa();
        if cov.k1.shape() != (n, n) {
            return Err(mismatch("verify_power_lemma covariance", n, cov.k1.nrows()));
        }
        let (b1, b2) = (noise.first.to_dense(), noise.second.to_dense());
        let t = {
            let mut t = DenseMatrix::zeros(n, n + b1.ncols() + b2.ncols());
            t.view_mut((0, 0), (n, n)).copy_from(&DenseMatrix::identity(n, n));
            t.view_mut((0, n), b1.shape()).copy_from(&b1);
            t.view_mut((0, n + b1.ncols()), b2.shape()).copy_from(&b2);
            t
        };
        let (e1, e2) = (DenseMatrix::identity(b1.ncols(), b1.ncols()), DenseMatrix::identity(b2.ncols(), b2.ncols()));
        return Ok(InputMap { t, source_factor: block_diag(&[&cov_factor(&cov.k1), &e1, &e2]), analytic: cov.k1.trace() + consumed });
    }
    let (n1, n2) = (eta * spec.nu1(), eta * spec.nu2());
    if cov.k1.shape() != (n1, n1) || cov.k2.shape() != (n2, n2) {
        return Err(mismatch("verify_power_lemma covariances", format!("{n1} and {n2}"), format!("{} and {}", cov.k1.nrows(), cov.k2.nrows())));
    }
    let (qi1, qi2) = mac_whitening_inverses(&noise, spec)?;
    let (g1, g2) = spec.mac_lifted(eta);
    let (d1, d2) = (noise.first.to_dense(), noise.second.to_dense());
    let k = g1.nrows();
    // X = [Q₁⁻¹ 0 0; 0 Q₂⁻¹ 0] [U₁;U₂;Z] + [D₁; D₂](G₁Q₁⁻¹U₁ + G₂Q₂⁻¹U₂ + Z)
    let mut inner = DenseMatrix::zeros(k, n1 + n2 + k);
    inner.view_mut((0, 0), (k, n1)).copy_from(&(&g1 * &qi1));
    inner.view_mut((0, n1), (k, n2)).copy_from(&(&g2 * &qi2));
    inner.view_mut((0, n1 + n2), (k, k)).copy_from(&DenseMatrix::identity(k, k));
    let mut direct = DenseMatrix::zeros(n1 + n2, n1 + n2 + k);
    direct.view_mut((0, 0), (n1, n1)).copy_from(&qi1);
    direct.view_mut((n1, n1), (n2, n2)).copy_from(&qi2);
    let mut stacked_d = DenseMatrix::zeros(n1 + n2, k);
    stacked_d.view_mut((0, 0), (n1, k)).copy_from(&d1);
    stacked_d.view_mut((n1, 0), (n2, k)).copy_from(&d2);
    let t = direct + stacked_d * inner;
    let eye = DenseMatrix::identity(k, k);
    Ok(InputMap {
        t,
        source_factor: block_diag(&[&cov_factor(&cov.k1), &cov_factor(&cov.k2), &eye]),
        analytic: cov.k1.trace() + cov.k2.trace() + consumed,
    })
}

/// Samples per Monte-Carlo chunk; chunk `c` draws from sub-stream `c`.
const CHUNK: usize = 4096;

/// Count, mean and centered sum of squares of one chunk.
#[derive(Clone, Copy)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn merge(a: Moments, b: Moments) -> Moments {
        let n = a.n + b.n;
        if n == 0.0 {
            return a;
        }
        let delta = b.mean - a.mean;
        Moments { n, mean: a.mean + delta * b.n / n, m2: a.m2 + b.m2 + delta * delta * a.n * b.n / n }
    }
}

fn pairwise_merge(parts: &[Moments]) -> Moments {
    match parts.len() {
        0 => Moments { n: 0.0, mean: 0.0, m2: 0.0 },
        1 => parts[0],
        len => Moments::merge(pairwise_merge(&parts[..len / 2]), pairwise_merge(&parts[len / 2..])),
    }
}

/// Power accounting of an inner code: analytic identity plus a Monte-Carlo
/// estimate of `E‖X₁‖² + E‖X₂‖²` (or `E‖X‖²` on the BC).
///
/// `cov` defaults to [`default_covariances`]. Passes when the identity
/// residual is below `1e-9·(1 + analytic)` and the Monte-Carlo gap is below
/// three standard errors.
pub fn verify_power_lemma(
    design: &FeedbackDesign,
    spec: &ChannelSpec,
    trials: usize,
    rng: &RngSpec,
    cov: Option<&CovariancePair>,
) -> Result<PowerReport> {
    if trials < 2 {
        return Err(LinfbError::InvalidArgument(format!("trials must be at least 2, got {trials}")));
    }
    let default;
    let cov = match cov {
        Some(c) => c,
        None => {
            default = default_covariances(design, spec)?;
            &default
        }
    };
    let map = input_map(design, spec, cov)?;
    let mixed = &map.t * &map.source_factor;
    let covariance_energy = mixed.iter().map(|x| x * x).sum::<f64>();
    let identity_residual = (covariance_energy - map.analytic).abs();

    let chunks = trials.div_ceil(CHUNK);
    let dim = mixed.ncols();
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut g = rng.rng(c as u64);
            let count = CHUNK.min(trials - c * CHUNK);
            let mut m = Moments { n: 0.0, mean: 0.0, m2: 0.0 };
            for _ in 0..count {
                let s = standard_normal(&mut g, dim);
                let x = &mixed * s;
                let e = x.norm_squared();
                m.n += 1.0;
                let delta = e - m.mean;
                m.mean += delta / m.n;
                m.m2 += delta * (e - m.mean);
            }
            m
        })
        .collect();
    let total = pairwise_merge(&parts);
    let variance = total.m2 / (total.n - 1.0);
    let standard_error = (variance / total.n).sqrt();
    let gap = (total.mean - map.analytic).abs();
    let relative_gap = if map.analytic > 0.0 { gap / map.analytic } else { gap };
    let passed = identity_residual < 1e-9 * (1.0 + map.analytic) && gap <= 3.0 * standard_error;
    Ok(PowerReport {
        form: design.form.name().to_string(),
        eta: design.eta,
        trials,
        empirical: total.mean,
        analytic: map.analytic,
        covariance_energy,
        identity_residual,
        standard_error,
        gap,
        relative_gap,
        passed,
    })
}

/// Worst per-sample discrepancy between causal recursion and closed form.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecursionReport {
    pub samples: usize,
    pub max_error: f64,
}

/// Draw `samples` blocks and compare the causal recursion with the closed
/// form. A- and C-form designs only.
pub fn verify_recursions(design: &FeedbackDesign, spec: &ChannelSpec, samples: usize, rng: &RngSpec) -> Result<RecursionReport> {
    let eta = design.eta;
    let mut g = rng.rng(0);
    let mut max_error = 0.0_f64;
    for _ in 0..samples {
        let err = match design.form {
            DesignForm::A => {
                let u = standard_normal(&mut g, eta * spec.kappa());
                let z1 = standard_normal(&mut g, eta * spec.nu1());
                let z2 = standard_normal(&mut g, eta * spec.nu2());
                simulate_bc_block(design, spec, &u, &z1, &z2)?.max_abs_diff(&bc_closed_form(design, spec, &u, &z1, &z2)?)
            }
            DesignForm::C => {
                let u1 = standard_normal(&mut g, eta * spec.nu1());
                let u2 = standard_normal(&mut g, eta * spec.nu2());
                let z = standard_normal(&mut g, eta * spec.kappa());
                simulate_mac_block(design, spec, &u1, &u2, &z)?.max_abs_diff(&mac_closed_form(design, spec, &u1, &u2, &z)?)
            }
            f => return Err(LinfbError::WrongForm { expected: "A or C", found: f.name() }),
        };
        max_error = max_error.max(err);
    }
    Ok(RecursionReport { samples, max_error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mimo::Direction;

    fn spec() -> ChannelSpec {
        ChannelSpec::new(
            DenseMatrix::from_row_slice(2, 2, &[1.0, 0.3, -0.4, 0.8]),
            DenseMatrix::from_row_slice(1, 2, &[0.6, 1.1]),
            2.0,
            Direction::Mac,
        )
        .unwrap()
    }

    #[test]
    fn zero_bc_design_passes_input_through() {
        let s = spec();
        let d = FeedbackDesign::zeros(DesignForm::A, 3, &s).unwrap();
        let mut g = RngSpec::new(1, "t").rng(0);
        let u = standard_normal(&mut g, 6);
        let z1 = standard_normal(&mut g, 6);
        let z2 = standard_normal(&mut g, 3);
        let out = simulate_bc_block(&d, &s, &u, &z1, &z2).unwrap();
        assert_eq!(out.x, u);
    }

    #[test]
    fn zero_mac_design_passes_input_through() {
        let s = spec();
        let d = FeedbackDesign::zeros(DesignForm::C, 2, &s).unwrap();
        let mut g = RngSpec::new(1, "t").rng(0);
        let u1 = standard_normal(&mut g, 4);
        let u2 = standard_normal(&mut g, 2);
        let z = standard_normal(&mut g, 4);
        let out = simulate_mac_block(&d, &s, &u1, &u2, &z).unwrap();
        assert!((&out.x1 - &u1).amax() < 1e-15);
        assert!((&out.x2 - &u2).amax() < 1e-15);
    }

    #[test]
    fn rng_streams_are_reproducible_and_distinct() {
        let a = standard_normal(&mut RngSpec::new(5, "x").rng(0), 4);
        let b = standard_normal(&mut RngSpec::new(5, "x").rng(0), 4);
        let c = standard_normal(&mut RngSpec::new(5, "y").rng(0), 4);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn zero_design_power_is_input_power() {
        let s = spec();
        let d = FeedbackDesign::zeros(DesignForm::D, 2, &s).unwrap();
        let r = verify_power_lemma(&d, &s, 20_000, &RngSpec::new(3, "power"), None).unwrap();
        assert!((r.analytic - 4.0).abs() < 1e-12);
        assert!(r.identity_residual < 1e-12);
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn bad_lengths_are_rejected() {
        let s = spec();
        let d = FeedbackDesign::zeros(DesignForm::A, 2, &s).unwrap();
        let v = Vector::zeros(3);
        assert!(simulate_bc_block(&d, &s, &v, &v, &v).is_err());
    }
}
