//! Multi-letter MIMO regions: effective channels of the inner codes,
//! no-feedback log-det bounds, covariance optimization and design search.

use std::f64::consts::{FRAC_PI_2, LN_2};

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blockmat::{
    self, bc_n_matrices, kron_lift, mac_m_matrices, max_abs, omega, omega_tilde, psd_sqrt, reverse, solve_left,
    solve_right, BlockTriangularSet, DenseMatrix,
};
use crate::error::{mismatch, LinfbError, Result};
use crate::frontier::RegionFrontier;
use crate::siso::linspace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Mac,
    Bc,
}

impl Direction {
    pub fn name(self) -> &'static str {
        match self {
            Direction::Mac => "mac",
            Direction::Bc => "bc",
        }
    }
}

/// Two-user channel. `h1` is `ν₁ × κ`, `h2` is `ν₂ × κ`.
///
/// On the BC receiver `i` sees `H_i X + Z_i`; on the MAC the receiver sees
/// `H₁ᵀX₁ + H₂ᵀX₂ + Z`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelSpec {
    pub h1: DenseMatrix,
    pub h2: DenseMatrix,
    pub power: f64,
    pub direction: Direction,
}

impl ChannelSpec {
    pub fn new(h1: DenseMatrix, h2: DenseMatrix, power: f64, direction: Direction) -> Result<Self> {
        if !(power > 0.0 && power.is_finite()) {
            return Err(LinfbError::InvalidArgument(format!("power must be positive and finite, got {power}")));
        }
        if h1.ncols() != h2.ncols() {
            return Err(mismatch("ChannelSpec", format!("{} columns", h1.ncols()), h2.ncols()));
        }
        if h1.is_empty() || h2.is_empty() {
            return Err(LinfbError::InvalidArgument("channel matrices must be non-empty".into()));
        }
        if !blockmat::all_finite(&h1) || !blockmat::all_finite(&h2) {
            return Err(LinfbError::InvalidArgument("channel entries must be finite".into()));
        }
        if max_abs(&h1) == 0.0 || max_abs(&h2) == 0.0 {
            return Err(LinfbError::InvalidArgument("channel matrices must be nonzero".into()));
        }
        Ok(Self { h1, h2, power, direction })
    }

    /// Scalar gains `h1`, `h2`.
    pub fn siso(h1: f64, h2: f64, power: f64, direction: Direction) -> Result<Self> {
        Self::new(
            DenseMatrix::from_element(1, 1, h1),
            DenseMatrix::from_element(1, 1, h2),
            power,
            direction,
        )
    }

    pub fn kappa(&self) -> usize {
        self.h1.ncols()
    }

    pub fn nu1(&self) -> usize {
        self.h1.nrows()
    }

    pub fn nu2(&self) -> usize {
        self.h2.nrows()
    }

    pub fn with_direction(&self, direction: Direction) -> Self {
        Self { direction, ..self.clone() }
    }

    /// `(H₁^B, H₂^B)`.
    pub fn lifted(&self, eta: usize) -> (DenseMatrix, DenseMatrix) {
        (kron_lift(&self.h1, eta), kron_lift(&self.h2, eta))
    }

    /// `((H₁^B)ᵀ, (H₂^B)ᵀ)`, the lifted MAC channels.
    pub fn mac_lifted(&self, eta: usize) -> (DenseMatrix, DenseMatrix) {
        let (a, b) = self.lifted(eta);
        (a.transpose(), b.transpose())
    }

    /// Reverse images of the lifted BC channels, the MAC channels of the
    /// dual pair.
    pub fn dual_mac_lifted(&self, eta: usize) -> (DenseMatrix, DenseMatrix) {
        let (a, b) = self.lifted(eta);
        (reverse(&a), reverse(&b))
    }

    /// FNV-1a digest of dims, entries, power and direction.
    pub fn digest(&self) -> String {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |bytes: &[u8]| {
            for &b in bytes {
                h ^= b as u64;
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        };
        for m in [&self.h1, &self.h2] {
            eat(&(m.nrows() as u64).to_le_bytes());
            eat(&(m.ncols() as u64).to_le_bytes());
            for r in 0..m.nrows() {
                for c in 0..m.ncols() {
                    eat(&m[(r, c)].to_bits().to_le_bytes());
                }
            }
        }
        eat(&self.power.to_bits().to_le_bytes());
        eat(self.direction.name().as_bytes());
        format!("{h:016x}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DesignForm {
    /// BC output-feedback gains.
    A,
    /// BC noise-feedback gains.
    B,
    /// MAC output-feedback gains.
    C,
    /// MAC noise-feedback gains.
    D,
}

impl DesignForm {
    pub fn name(self) -> &'static str {
        match self {
            DesignForm::A => "A",
            DesignForm::B => "B",
            DesignForm::C => "C",
            DesignForm::D => "D",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "A" | "a" => Some(DesignForm::A),
            "B" | "b" => Some(DesignForm::B),
            "C" | "c" => Some(DesignForm::C),
            "D" | "d" => Some(DesignForm::D),
            _ => None,
        }
    }

    pub fn is_bc(self) -> bool {
        matches!(self, DesignForm::A | DesignForm::B)
    }
}

/// Pair of feedback gain sets. A/B-form blocks are `κ × ν_i`, C/D-form
/// blocks are `ν_i × κ`.
#[derive(Clone, Debug, PartialEq)]
pub struct FeedbackDesign {
    pub eta: usize,
    pub form: DesignForm,
    pub first: BlockTriangularSet,
    pub second: BlockTriangularSet,
}

impl FeedbackDesign {
    pub fn new(form: DesignForm, first: BlockTriangularSet, second: BlockTriangularSet) -> Result<Self> {
        if first.eta() != second.eta() {
            return Err(mismatch("FeedbackDesign", format!("eta {}", first.eta()), second.eta()));
        }
        let (shared_a, shared_b) = if form.is_bc() {
            (first.block_rows(), second.block_rows())
        } else {
            (first.block_cols(), second.block_cols())
        };
        if shared_a != shared_b {
            return Err(mismatch("FeedbackDesign", format!("kappa {shared_a}"), shared_b));
        }
        Ok(Self { eta: first.eta(), form, first, second })
    }

    pub fn zeros(form: DesignForm, eta: usize, spec: &ChannelSpec) -> Result<Self> {
        let (r1, c1, r2, c2) = Self::block_dims(form, spec);
        Self::new(form, BlockTriangularSet::zeros(eta, r1, c1)?, BlockTriangularSet::zeros(eta, r2, c2)?)
    }

    /// `(rows₁, cols₁, rows₂, cols₂)` of the blocks of a `form` design on `spec`.
    pub fn block_dims(form: DesignForm, spec: &ChannelSpec) -> (usize, usize, usize, usize) {
        let (k, n1, n2) = (spec.kappa(), spec.nu1(), spec.nu2());
        if form.is_bc() {
            (k, n1, k, n2)
        } else {
            (n1, k, n2, k)
        }
    }

    pub fn check_spec(&self, spec: &ChannelSpec) -> Result<()> {
        let (r1, c1, r2, c2) = Self::block_dims(self.form, spec);
        let found = (self.first.block_rows(), self.first.block_cols(), self.second.block_rows(), self.second.block_cols());
        if found != (r1, c1, r2, c2) {
            return Err(mismatch("FeedbackDesign vs ChannelSpec", format!("{:?}", (r1, c1, r2, c2)), format!("{found:?}")));
        }
        Ok(())
    }

    fn expect_form(&self, form: DesignForm) -> Result<()> {
        if self.form != form {
            return Err(LinfbError::WrongForm { expected: form.name(), found: self.form.name() });
        }
        Ok(())
    }

    /// `tr(M₁M₁ᵀ) + tr(M₂M₂ᵀ)`.
    pub fn consumed_power(&self) -> f64 {
        self.first.gram_trace() + self.second.gram_trace()
    }

    pub fn with_second_zeroed(&self) -> Self {
        let z = BlockTriangularSet::zeros(self.eta, self.second.block_rows(), self.second.block_cols())
            .expect("dims come from an existing set");
        Self { second: z, ..self.clone() }
    }

    /// Noise-form equivalent: B-form for A/B designs, D-form for C/D designs.
    pub fn to_noise_form(&self, spec: &ChannelSpec) -> Result<Self> {
        self.check_spec(spec)?;
        match self.form {
            DesignForm::B | DesignForm::D => Ok(self.clone()),
            DesignForm::A => {
                let (h1b, h2b) = spec.lifted(self.eta);
                let (b1, b2) = omega(&self.first, &self.second, &h1b, &h2b)?;
                Self::new(DesignForm::B, b1, b2)
            }
            DesignForm::C => {
                let (g1, g2) = spec.mac_lifted(self.eta);
                let (d1, d2) = omega_tilde(&self.first, &self.second, &g1, &g2)?;
                Self::new(DesignForm::D, d1, d2)
            }
        }
    }

    pub fn to_json(&self) -> String {
        let mut blocks = Vec::new();
        for (i, set) in [(1, &self.first), (2, &self.second)] {
            for (l, tau, m) in set.iter() {
                let entries = (0..m.nrows()).flat_map(|r| (0..m.ncols()).map(move |c| m[(r, c)])).collect();
                blocks.push(BlockRecord { i, l, tau, rows: m.nrows(), cols: m.ncols(), entries });
            }
        }
        let rec = DesignRecord { eta: self.eta, form: self.form.name().to_string(), blocks };
        serde_json::to_string_pretty(&rec).expect("design records always serialize")
    }

    /// Parse a design file. Block dimensions come from `spec`; blocks absent
    /// from the file are zero.
    pub fn from_json(text: &str, spec: &ChannelSpec) -> Result<Self> {
        let rec: DesignRecord = serde_json::from_str(text)?;
        let form = DesignForm::parse(&rec.form)
            .ok_or_else(|| LinfbError::InvalidArgument(format!("unknown design form {:?}", rec.form)))?;
        let mut d = Self::zeros(form, rec.eta, spec)?;
        for b in rec.blocks {
            let set = match b.i {
                1 => &mut d.first,
                2 => &mut d.second,
                other => return Err(LinfbError::InvalidArgument(format!("user index must be 1 or 2, got {other}"))),
            };
            if b.rows * b.cols != b.entries.len() {
                return Err(mismatch("design block entries", b.rows * b.cols, b.entries.len()));
            }
            set.set_block(b.l, b.tau, DenseMatrix::from_row_slice(b.rows, b.cols, &b.entries))?;
        }
        Ok(d)
    }
}

#[derive(Serialize, Deserialize)]
struct DesignRecord {
    eta: usize,
    form: String,
    blocks: Vec<BlockRecord>,
}

#[derive(Serialize, Deserialize)]
struct BlockRecord {
    i: usize,
    l: usize,
    tau: usize,
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

/// White-noise equivalent channels of an inner code and the power left for
/// the outer code.
#[derive(Clone, Debug)]
pub struct EffectiveChannel {
    pub g1: DenseMatrix,
    pub g2: DenseMatrix,
    pub budget: f64,
}

fn remaining_budget(eta: usize, power: f64, first: &BlockTriangularSet, second: &BlockTriangularSet) -> Result<f64> {
    let budget = eta as f64 * power - first.gram_trace() - second.gram_trace();
    if budget < 0.0 {
        return Err(LinfbError::InfeasibleBudget { budget });
    }
    Ok(budget)
}

/// `G_i = (H_i^B)ᵀ Q_i⁻¹` for a D-form design; the invertible output
/// multiplier `(I − G₁C₁ − G₂C₂)⁻¹` is dropped.
pub fn effective_mac_channel(design: &FeedbackDesign, spec: &ChannelSpec) -> Result<EffectiveChannel> {
    design.expect_form(DesignForm::D)?;
    design.check_spec(spec)?;
    let (l1, l2) = spec.mac_lifted(design.eta);
    effective_mac_on(&design.first, &design.second, &l1, &l2, spec.power)
}

/// Same construction on explicit lifted MAC channels.
pub fn effective_mac_on(
    d1: &BlockTriangularSet,
    d2: &BlockTriangularSet,
    l1: &DenseMatrix,
    l2: &DenseMatrix,
    power: f64,
) -> Result<EffectiveChannel> {
    let budget = remaining_budget(d1.eta(), power, d1, d2)?;
    let (m1, m2) = mac_m_matrices(d1, d2, l1, l2)?;
    let (q1, q2) = (psd_sqrt(&m1)?, psd_sqrt(&m2)?);
    Ok(EffectiveChannel {
        g1: solve_right(l1, &q1, "effective_mac_channel")?,
        g2: solve_right(l2, &q2, "effective_mac_channel")?,
        budget,
    })
}

/// `G_i = S_i⁻¹ H_i^B` for a B-form design, `S_i = N_i^{1/2}`.
pub fn effective_bc_channel(design: &FeedbackDesign, spec: &ChannelSpec) -> Result<EffectiveChannel> {
    design.expect_form(DesignForm::B)?;
    design.check_spec(spec)?;
    let budget = remaining_budget(design.eta, spec.power, &design.first, &design.second)?;
    let (h1b, h2b) = spec.lifted(design.eta);
    let (n1, n2) = bc_n_matrices(&design.first, &design.second, &h1b, &h2b)?;
    let (s1, s2) = (psd_sqrt(&n1)?, psd_sqrt(&n2)?);
    Ok(EffectiveChannel {
        g1: solve_left(&s1, &h1b, "effective_bc_channel")?,
        g2: solve_left(&s2, &h2b, "effective_bc_channel")?,
        budget,
    })
}

/// Input covariances of the two transmitters (or the two BC streams).
#[derive(Clone, Debug, PartialEq)]
pub struct CovariancePair {
    pub k1: DenseMatrix,
    pub k2: DenseMatrix,
}

const PSD_TOL: f64 = 1e-9;

impl CovariancePair {
    pub fn zeros(n1: usize, n2: usize) -> Self {
        Self { k1: DenseMatrix::zeros(n1, n1), k2: DenseMatrix::zeros(n2, n2) }
    }

    pub fn total_trace(&self) -> f64 {
        self.k1.trace() + self.k2.trace()
    }

    /// Symmetric and PSD within `1e-9`.
    pub fn validate(&self) -> Result<()> {
        for k in [&self.k1, &self.k2] {
            if !k.is_square() {
                return Err(mismatch("covariance", "square matrix", format!("{}x{}", k.nrows(), k.ncols())));
            }
            let asym = blockmat::asymmetry(k);
            if asym > PSD_TOL * (1.0 + max_abs(k)) {
                return Err(LinfbError::NotSymmetric { asymmetry: asym });
            }
            if k.nrows() > 0 {
                let min = ((k + k.transpose()) * 0.5).symmetric_eigenvalues().min();
                if min < -PSD_TOL * (1.0 + max_abs(k)) {
                    return Err(LinfbError::NotPositiveDefinite { min_eigenvalue: min, floor: 0.0 });
                }
            }
        }
        Ok(())
    }
}

/// No-feedback MAC log-det bounds, in bits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Pentagon {
    pub i1: f64,
    pub i2: f64,
    pub isum: f64,
}

impl Pentagon {
    pub fn corners(&self) -> [(f64, f64); 2] {
        [(self.i1, self.isum - self.i1), (self.isum - self.i2, self.i2)]
    }
}

/// `½ log₂ det(m)` for a symmetric positive-definite `m`.
fn half_log2_det(m: &DenseMatrix) -> f64 {
    match m.clone().cholesky() {
        Some(c) => c.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>() / LN_2,
        None => 0.5 * m.determinant().max(f64::MIN_POSITIVE).log2(),
    }
}

fn gram(g: &DenseMatrix, k: &DenseMatrix) -> DenseMatrix {
    g * k * g.transpose()
}

pub fn mac_nofb_pentagon(g1: &DenseMatrix, g2: &DenseMatrix, cov: &CovariancePair) -> Result<Pentagon> {
    if g1.nrows() != g2.nrows() {
        return Err(mismatch("mac_nofb_pentagon", format!("{} output rows", g1.nrows()), g2.nrows()));
    }
    if cov.k1.nrows() != g1.ncols() || cov.k2.nrows() != g2.ncols() {
        return Err(mismatch(
            "mac_nofb_pentagon",
            format!("covariances {}x{} and {}x{}", g1.ncols(), g1.ncols(), g2.ncols(), g2.ncols()),
            format!("{:?} and {:?}", cov.k1.shape(), cov.k2.shape()),
        ));
    }
    cov.validate()?;
    Ok(pentagon_unchecked(g1, g2, &cov.k1, &cov.k2))
}

fn pentagon_unchecked(g1: &DenseMatrix, g2: &DenseMatrix, k1: &DenseMatrix, k2: &DenseMatrix) -> Pentagon {
    let n = g1.nrows();
    let eye = DenseMatrix::identity(n, n);
    let a = gram(g1, k1);
    let b = gram(g2, k2);
    Pentagon {
        i1: half_log2_det(&(&eye + &a)),
        i2: half_log2_det(&(&eye + &b)),
        isum: half_log2_det(&(eye + a + b)),
    }
}

/// Result of a covariance optimization.
#[derive(Clone, Debug)]
pub struct OptimizedCovariances {
    pub cov: CovariancePair,
    /// Weighted objective at `cov`.
    pub objective: f64,
    pub pentagon: Pentagon,
    pub iterations: usize,
    pub converged: bool,
    /// Final projected-gradient norm.
    pub gradient_norm: f64,
}

/// Default iteration cap of the covariance optimizers.
pub const DEFAULT_ITERS: usize = 5000;
/// Default initial step of the covariance optimizers.
pub const DEFAULT_STEP: f64 = 1.0;
const PG_TOL: f64 = 1e-9;

/// Euclidean projection of a symmetric pair onto
/// `{K₁, K₂ ⪰ 0, tr K₁ + tr K₂ ≤ budget}`.
pub fn project_covariances(k1: &DenseMatrix, k2: &DenseMatrix, budget: f64) -> CovariancePair {
    let e1 = ((k1 + k1.transpose()) * 0.5).symmetric_eigen();
    let e2 = ((k2 + k2.transpose()) * 0.5).symmetric_eigen();
    let mut lambda: Vec<f64> = e1.eigenvalues.iter().chain(e2.eigenvalues.iter()).copied().collect();
    project_capped_simplex(&mut lambda, budget.max(0.0));
    let n1 = k1.nrows();
    let rebuild = |vecs: &DenseMatrix, vals: &[f64]| {
        let d = DenseMatrix::from_diagonal(&DVector::from_column_slice(vals));
        let k = vecs * d * vecs.transpose();
        (&k + k.transpose()) * 0.5
    };
    CovariancePair { k1: rebuild(&e1.eigenvectors, &lambda[..n1]), k2: rebuild(&e2.eigenvectors, &lambda[n1..]) }
}

/// Project onto `{λ ≥ 0, Σλ ≤ budget}` in place.
fn project_capped_simplex(lambda: &mut [f64], budget: f64) {
    let clipped: f64 = lambda.iter().map(|l| l.max(0.0)).sum();
    if clipped <= budget {
        lambda.iter_mut().for_each(|l| *l = l.max(0.0));
        return;
    }
    let mut sorted: Vec<f64> = lambda.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut acc = sorted[0];
    let mut theta = sorted[0] - budget;
    for (k, &v) in sorted.iter().enumerate().skip(1) {
        acc += v;
        let t = (acc - budget) / (k + 1) as f64;
        if v - t > 0.0 {
            theta = t;
        } else {
            break;
        }
    }
    lambda.iter_mut().for_each(|l| *l = (*l - theta).max(0.0));
}

/// Weighted objective `μ₁R₁ + μ₂R₂` at the best decoding order, with its
/// gradients with respect to `K₁`, `K₂`.
struct Weighted<'a> {
    g1: &'a DenseMatrix,
    g2: &'a DenseMatrix,
    mu1: f64,
    mu2: f64,
}

impl Weighted<'_> {
    /// For `μ₁ ≥ μ₂`: `μ₂·I_sum + (μ₁ − μ₂)·I₁`; symmetric otherwise.
    fn value(&self, k1: &DenseMatrix, k2: &DenseMatrix) -> (f64, Pentagon) {
        let p = pentagon_unchecked(self.g1, self.g2, k1, k2);
        let v = if self.mu1 >= self.mu2 {
            self.mu2 * p.isum + (self.mu1 - self.mu2) * p.i1
        } else {
            self.mu1 * p.isum + (self.mu2 - self.mu1) * p.i2
        };
        (v, p)
    }

    fn gradient(&self, k1: &DenseMatrix, k2: &DenseMatrix) -> (DenseMatrix, DenseMatrix) {
        let n = self.g1.nrows();
        let eye = DenseMatrix::identity(n, n);
        let a = gram(self.g1, k1);
        let b = gram(self.g2, k2);
        let inv = |m: DenseMatrix| m.cholesky().map(|c| c.inverse()).unwrap_or_else(|| DenseMatrix::identity(n, n));
        let sum_inv = inv(&eye + &a + &b);
        let scale = 0.5 / LN_2;
        let grad = |g: &DenseMatrix, s: &DenseMatrix| g.transpose() * s * g * scale;
        let (lo, hi) = (self.mu1.min(self.mu2), (self.mu1 - self.mu2).abs());
        let mut d1 = grad(self.g1, &sum_inv) * lo;
        let mut d2 = grad(self.g2, &sum_inv) * lo;
        if self.mu1 >= self.mu2 {
            d1 += grad(self.g1, &inv(&eye + &a)) * hi;
        } else {
            d2 += grad(self.g2, &inv(&eye + &b)) * hi;
        }
        (d1, d2)
    }
}

fn frob2(a: &DenseMatrix) -> f64 {
    a.iter().map(|x| x * x).sum()
}

fn inner(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// Maximize `μ₁R₁ + μ₂R₂` over the no-feedback MAC region of `(g1, g2)`
/// under `tr K₁ + tr K₂ ≤ budget`.
///
/// Projected gradient ascent with backtracking; the objective never
/// decreases along the trajectory. Stops when the projected-gradient norm
/// drops below `1e-6` or after `iters` accepted steps.
pub fn maximize_weighted_sum(
    g1: &DenseMatrix,
    g2: &DenseMatrix,
    budget: f64,
    mu1: f64,
    mu2: f64,
    iters: usize,
    step: f64,
) -> Result<OptimizedCovariances> {
    if g1.nrows() != g2.nrows() {
        return Err(mismatch("maximize_weighted_sum", format!("{} output rows", g1.nrows()), g2.nrows()));
    }
    if !(budget >= 0.0 && budget.is_finite()) {
        return Err(LinfbError::InvalidArgument(format!("budget must be finite and nonnegative, got {budget}")));
    }
    if !(mu1 >= 0.0 && mu2 >= 0.0) {
        return Err(LinfbError::InvalidArgument("weights must be nonnegative".into()));
    }
    let (n1, n2) = (g1.ncols(), g2.ncols());
    let f = Weighted { g1, g2, mu1, mu2 };
    let mut cov = if budget == 0.0 || n1 + n2 == 0 {
        CovariancePair::zeros(n1, n2)
    } else {
        let share = budget / (n1 + n2) as f64;
        CovariancePair { k1: DenseMatrix::identity(n1, n1) * share, k2: DenseMatrix::identity(n2, n2) * share }
    };
    let (mut value, mut pent) = f.value(&cov.k1, &cov.k2);
    let mut s = if step > 0.0 { step } else { DEFAULT_STEP };
    let mut converged = false;
    let mut gradient_norm = f64::INFINITY;
    let mut iterations = 0;
    while iterations < iters {
        let (d1, d2) = f.gradient(&cov.k1, &cov.k2);
        // gradient mapping at unit step as the stationarity measure
        let unit = project_covariances(&(&cov.k1 + &d1), &(&cov.k2 + &d2), budget);
        gradient_norm = (frob2(&(&unit.k1 - &cov.k1)) + frob2(&(&unit.k2 - &cov.k2))).sqrt();
        if gradient_norm < PG_TOL {
            converged = true;
            break;
        }
        let mut accepted = false;
        for _ in 0..60 {
            let cand = project_covariances(&(&cov.k1 + &d1 * s), &(&cov.k2 + &d2 * s), budget);
            let (x1, x2) = (&cand.k1 - &cov.k1, &cand.k2 - &cov.k2);
            let (v, p) = f.value(&cand.k1, &cand.k2);
            let model = value + inner(&d1, &x1) + inner(&d2, &x2) - (frob2(&x1) + frob2(&x2)) / (2.0 * s);
            if v >= model && v >= value {
                cov = cand;
                value = v;
                pent = p;
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        iterations += 1;
        if !accepted {
            break;
        }
        s *= 2.0;
    }
    Ok(OptimizedCovariances { cov, objective: value, pentagon: pent, iterations, converged, gradient_norm })
}

/// Maximize `I_sum` under the trace budget.
pub fn maximize_sum_rate(
    g1: &DenseMatrix,
    g2: &DenseMatrix,
    budget: f64,
    iters: usize,
    step: f64,
) -> Result<OptimizedCovariances> {
    maximize_weighted_sum(g1, g2, budget, 1.0, 1.0, iters, step)
}

/// Default number of weight angles tracing a frontier.
pub const DEFAULT_RATE_GRID: usize = 65;

/// Frontier of `(1/η)·R` for the no-feedback region `R` of an effective
/// channel, traced by weighted-sum optima over `rate_grid` weight angles.
pub fn effective_region(eff: &EffectiveChannel, eta: usize, rate_grid: usize) -> Result<RegionFrontier> {
    if rate_grid < 2 {
        return Err(LinfbError::InvalidArgument(format!("rate_grid must be at least 2, got {rate_grid}")));
    }
    let scale = 1.0 / eta as f64;
    let corners: Vec<[(f64, f64); 2]> = linspace(0.0, FRAC_PI_2, rate_grid)
        .par_iter()
        .map(|&theta| {
            let (mu1, mu2) = (theta.cos().max(0.0), theta.sin().max(0.0));
            maximize_weighted_sum(&eff.g1, &eff.g2, eff.budget, mu1, mu2, DEFAULT_ITERS, DEFAULT_STEP)
                .map(|o| o.pentagon.corners())
        })
        .collect::<Result<_>>()?;
    Ok(RegionFrontier::from_points(corners.into_iter().flatten().map(|(a, b)| (a * scale, b * scale))))
}

/// Inner bound of the linear-feedback region achieved by one fixed design.
///
/// MAC specs take C- or D-form designs and evaluate directly. BC specs take
/// A- or B-form designs and evaluate on the dual MAC (reversed channels,
/// `D = reverse(B)`).
pub fn multiletter_inner_bound(spec: &ChannelSpec, design: &FeedbackDesign, rate_grid: usize) -> Result<RegionFrontier> {
    let noise = design.to_noise_form(spec)?;
    let eta = noise.eta;
    let (eff, via) = match (spec.direction, noise.form) {
        (Direction::Mac, DesignForm::D) => (effective_mac_channel(&noise, spec)?, "direct"),
        (Direction::Bc, DesignForm::B) => {
            let (d1, d2) = (noise.first.reversed(), noise.second.reversed());
            let (l1, l2) = spec.dual_mac_lifted(eta);
            (effective_mac_on(&d1, &d2, &l1, &l2, spec.power)?, "duality")
        }
        (Direction::Mac, f) => return Err(LinfbError::WrongForm { expected: "C or D", found: f.name() }),
        (Direction::Bc, f) => return Err(LinfbError::WrongForm { expected: "A or B", found: f.name() }),
    };
    Ok(effective_region(&eff, eta, rate_grid)?
        .with_meta("kind", "multiletter-inner-bound")
        .with_meta("direction", spec.direction.name())
        .with_meta("via", via)
        .with_meta("eta", eta)
        .with_meta("rate_grid", rate_grid)
        .with_meta("budget", eff.budget)
        .with_meta("output_transform", "invertible multiplier dropped")
        .with_meta("spec_digest", spec.digest()))
}

/// B-form design on the BC of `spec` that is equivalent to the D-form
/// design on the MAC of `spec`: `B = reverse(flip_blocks(D))`.
pub fn mac_design_to_bc(design: &FeedbackDesign) -> Result<FeedbackDesign> {
    design.expect_form(DesignForm::D)?;
    FeedbackDesign::new(DesignForm::B, design.first.flip_blocks().reversed(), design.second.flip_blocks().reversed())
}

/// Inverse of [`mac_design_to_bc`].
pub fn bc_design_to_mac(design: &FeedbackDesign) -> Result<FeedbackDesign> {
    design.expect_form(DesignForm::B)?;
    FeedbackDesign::new(DesignForm::D, design.first.reversed().flip_blocks(), design.second.reversed().flip_blocks())
}

/// Outcome of [`search_feedback_design`].
#[derive(Clone, Debug)]
pub struct SearchResult {
    /// D-form on MAC specs, B-form on BC specs.
    pub best: FeedbackDesign,
    /// Per-channel-use sum-rate of `best`.
    pub best_sum_rate: f64,
    pub frontier: RegionFrontier,
    /// Per-channel-use sum-rate of every random trial, in trial order.
    pub trial_sum_rates: Vec<f64>,
    /// Sum-rate of every design accepted during refinement.
    pub refinement_sum_rates: Vec<f64>,
}

/// Search knobs beyond the required arguments.
#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    pub rate_grid: usize,
    pub refine_rounds: usize,
    pub iters: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { rate_grid: DEFAULT_RATE_GRID, refine_rounds: 200, iters: DEFAULT_ITERS }
    }
}

/// Per-channel-use sum-rate of a D-form design on explicit lifted MAC channels;
/// `None` if the design is infeasible or numerically degenerate.
fn design_sum_rate(d1: &BlockTriangularSet, d2: &BlockTriangularSet, l1: &DenseMatrix, l2: &DenseMatrix, power: f64, iters: usize) -> Option<f64> {
    let eff = effective_mac_on(d1, d2, l1, l2, power).ok()?;
    let o = maximize_sum_rate(&eff.g1, &eff.g2, eff.budget, iters, DEFAULT_STEP).ok()?;
    let r = o.pentagon.isum / d1.eta() as f64;
    r.is_finite().then_some(r)
}

pub fn search_feedback_design(spec: &ChannelSpec, eta: usize, trials: usize, seed: u64) -> Result<SearchResult> {
    search_feedback_design_with(spec, eta, trials, seed, SearchOptions::default())
}

/// Random search over D-form entries under the trace budget, followed by
/// coordinate refinement of the best trial. Trial `k` draws from a ChaCha8
/// stream seeded with `seed + k`; ties go to the lowest trial index.
pub fn search_feedback_design_with(
    spec: &ChannelSpec,
    eta: usize,
    trials: usize,
    seed: u64,
    opts: SearchOptions,
) -> Result<SearchResult> {
    if !(1..=4).contains(&eta) {
        return Err(LinfbError::InvalidArgument(format!("eta must be in 1..=4, got {eta}")));
    }
    if trials == 0 {
        return Err(LinfbError::InvalidArgument("trials must be at least 1".into()));
    }
    let mac = spec.with_direction(Direction::Mac);
    let (l1, l2) = mac.mac_lifted(eta);
    let zero = FeedbackDesign::zeros(DesignForm::D, eta, &mac)?;
    let (n1, n2) = (zero.first.free_len(), zero.second.free_len());
    let total_power = eta as f64 * spec.power;

    let draw = |k: usize| -> (Vec<f64>, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
        let mut v1: Vec<f64> = (0..n1).map(|_| rng.sample(StandardNormal)).collect();
        let mut v2: Vec<f64> = (0..n2).map(|_| rng.sample(StandardNormal)).collect();
        let u: f64 = rng.random();
        let norm2: f64 = v1.iter().chain(&v2).map(|x| x * x).sum();
        if norm2 > 0.0 {
            let target = 0.9 * u * u * total_power;
            let c = (target / norm2).sqrt();
            v1.iter_mut().chain(v2.iter_mut()).for_each(|x| *x *= c);
        }
        (v1, v2)
    };
    let build = |v1: &[f64], v2: &[f64]| -> Result<(BlockTriangularSet, BlockTriangularSet)> {
        Ok((
            BlockTriangularSet::from_vec(eta, zero.first.block_rows(), zero.first.block_cols(), v1)?,
            BlockTriangularSet::from_vec(eta, zero.second.block_rows(), zero.second.block_cols(), v2)?,
        ))
    };

    let trial_sum_rates: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let (v1, v2) = draw(k);
            build(&v1, &v2)
                .ok()
                .and_then(|(d1, d2)| design_sum_rate(&d1, &d2, &l1, &l2, spec.power, opts.iters))
                .unwrap_or(f64::NEG_INFINITY)
        })
        .collect();
    let zero_rate = design_sum_rate(&zero.first, &zero.second, &l1, &l2, spec.power, opts.iters).unwrap_or(0.0);
    let (mut best_v1, mut best_v2, mut best_rate) = (vec![0.0; n1], vec![0.0; n2], zero_rate);
    for (k, &r) in trial_sum_rates.iter().enumerate() {
        if r > best_rate {
            let (v1, v2) = draw(k);
            best_v1 = v1;
            best_v2 = v2;
            best_rate = r;
        }
    }

    let mut refinement_sum_rates = Vec::new();
    let mut delta = 0.25 * spec.power.sqrt();
    for _ in 0..opts.refine_rounds {
        if n1 + n2 == 0 || delta < 1e-5 {
            break;
        }
        let mut improved = false;
        for idx in 0..n1 + n2 {
            for sign in [1.0, -1.0] {
                let (mut v1, mut v2) = (best_v1.clone(), best_v2.clone());
                if idx < n1 {
                    v1[idx] += sign * delta;
                } else {
                    v2[idx - n1] += sign * delta;
                }
                let (d1, d2) = build(&v1, &v2)?;
                if let Some(r) = design_sum_rate(&d1, &d2, &l1, &l2, spec.power, opts.iters) {
                    if r > best_rate {
                        best_v1 = v1;
                        best_v2 = v2;
                        best_rate = r;
                        refinement_sum_rates.push(r);
                        improved = true;
                        break;
                    }
                }
            }
        }
        if !improved {
            delta *= 0.5;
        }
    }

    let (d1, d2) = build(&best_v1, &best_v2)?;
    let mac_best = FeedbackDesign::new(DesignForm::D, d1, d2)?;
    let (best, frontier) = match spec.direction {
        Direction::Mac => {
            let f = multiletter_inner_bound(&mac, &mac_best, opts.rate_grid)?;
            (mac_best, f)
        }
        Direction::Bc => {
            let b = mac_design_to_bc(&mac_best)?;
            let f = multiletter_inner_bound(spec, &b, opts.rate_grid)?;
            (b, f)
        }
    };
    let frontier = frontier
        .with_meta("search_trials", trials)
        .with_meta("search_seed", seed)
        .with_meta("best_sum_rate", best_rate);
    Ok(SearchResult { best, best_sum_rate: best_rate, frontier, trial_sum_rates, refinement_sum_rates })
}

/// Random design of the given form on `spec`: standard normal entries,
/// rescaled so the consumed power is `fraction · ηP`. Deterministic in `seed`.
pub fn random_design(spec: &ChannelSpec, eta: usize, form: DesignForm, fraction: f64, seed: u64) -> Result<FeedbackDesign> {
    if !(0.0..1.0).contains(&fraction) {
        return Err(LinfbError::InvalidArgument(format!("fraction must lie in [0,1), got {fraction}")));
    }
    let zero = FeedbackDesign::zeros(form, eta, spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n1, n2) = (zero.first.free_len(), zero.second.free_len());
    let mut v: Vec<f64> = (0..n1 + n2).map(|_| rng.sample(StandardNormal)).collect();
    let norm2: f64 = v.iter().map(|x| x * x).sum();
    if norm2 > 0.0 {
        let c = (fraction * eta as f64 * spec.power / norm2).sqrt();
        v.iter_mut().for_each(|x| *x *= c);
    }
    let first = BlockTriangularSet::from_vec(eta, zero.first.block_rows(), zero.first.block_cols(), &v[..n1])?;
    let second = BlockTriangularSet::from_vec(eta, zero.second.block_rows(), zero.second.block_cols(), &v[n1..])?;
    FeedbackDesign::new(form, first, second)
}

/// No-feedback pentagon of a plain (η = 1) MAC spec at fixed covariances.
pub fn mac_nofb_pentagon_for(spec: &ChannelSpec, cov: &CovariancePair) -> Result<Pentagon> {
    let (g1, g2) = spec.mac_lifted(1);
    mac_nofb_pentagon(&g1, &g2, cov)
}
