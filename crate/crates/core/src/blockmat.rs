//! Dense matrix algebra behind the block feedback codes.
//!
//! Feedback gains are stored as [`BlockTriangularSet`]s (only the strictly
//! lower blocks are kept) and materialized to dense matrices for products
//! and inverses. The matrices involved are small (tens of rows at most), so
//! everything runs on `nalgebra` dense storage.

use nalgebra::DMatrix;

use crate::error::{mismatch, LinfbError, Result};

pub type DenseMatrix = DMatrix<f64>;

/// Relative tolerance used for symmetry checks.
pub const SYMMETRY_TOL: f64 = 1e-9;

/// Largest absolute entry, 0 for an empty matrix.
pub fn max_abs(m: &DenseMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// Max-abs entrywise difference. Panics on shape mismatch.
pub fn max_abs_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "max_abs_diff shape mismatch");
    a.iter()
        .zip(b.iter())
        .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).abs()))
}

pub fn all_finite(m: &DenseMatrix) -> bool {
    m.iter().all(|v| v.is_finite())
}

/// `E_d`: ones on the counter-diagonal.
pub fn exchange_matrix(d: usize) -> DenseMatrix {
    DenseMatrix::from_fn(d, d, |i, j| if i + j + 1 == d { 1.0 } else { 0.0 })
}

/// Reverse image `E_{d2} Aᵀ E_{d1}` of a `d1 × d2` matrix.
///
/// Computed by index permutation, so the result is exact: entry `(i, j)` of
/// the output is `A[d1-1-j, d2-1-i]`.
pub fn reverse(a: &DenseMatrix) -> DenseMatrix {
    let (d1, d2) = a.shape();
    DenseMatrix::from_fn(d2, d1, |i, j| a[(d1 - 1 - j, d2 - 1 - i)])
}

/// `I_eta ⊗ H`.
pub fn kron_lift(h: &DenseMatrix, eta: usize) -> DenseMatrix {
    DenseMatrix::identity(eta, eta).kronecker(h)
}

/// `t⁻¹ · a` via LU with partial pivoting.
pub(crate) fn solve_left(t: &DenseMatrix, a: &DenseMatrix, ctx: &'static str) -> Result<DenseMatrix> {
    t.clone().lu().solve(a).ok_or(LinfbError::Singular(ctx))
}

/// `a · t⁻¹`, solved as `(tᵀ)⁻¹ aᵀ` and transposed back.
pub(crate) fn solve_right(a: &DenseMatrix, t: &DenseMatrix, ctx: &'static str) -> Result<DenseMatrix> {
    let x = t.transpose().lu().solve(&a.transpose()).ok_or(LinfbError::Singular(ctx))?;
    Ok(x.transpose())
}

pub(crate) fn inverse(t: &DenseMatrix, ctx: &'static str) -> Result<DenseMatrix> {
    let n = t.nrows();
    solve_left(t, &DenseMatrix::identity(n, n), ctx)
}

/// An `eta`-block strictly-lower block-triangular matrix with
/// `block_rows × block_cols` blocks.
///
/// Blocks are addressed 1-based as `(l, tau)` with `1 <= tau < l <= eta`:
/// `l` is the block row (the sub-block being produced) and `tau` the block
/// column (the earlier sub-block being fed back).
#[derive(Clone, Debug, PartialEq)]
pub struct BlockTriangularSet {
    eta: usize,
    block_rows: usize,
    block_cols: usize,
    // ordered by l = 2..=eta, then tau = 1..l
    blocks: Vec<DenseMatrix>,
}

fn block_slot(l: usize, tau: usize) -> usize {
    (l - 1) * (l - 2) / 2 + (tau - 1)
}

impl BlockTriangularSet {
    pub fn zeros(eta: usize, block_rows: usize, block_cols: usize) -> Result<Self> {
        if eta == 0 || block_rows == 0 || block_cols == 0 {
            return Err(LinfbError::InvalidArgument(format!(
                "block-triangular set needs positive eta and block dims, got eta={eta}, {block_rows}x{block_cols}"
            )));
        }
        let count = eta * (eta - 1) / 2;
        Ok(Self {
            eta,
            block_rows,
            block_cols,
            blocks: vec![DenseMatrix::zeros(block_rows, block_cols); count],
        })
    }

    /// Build from the free entries in the order produced by [`Self::to_vec`].
    pub fn from_vec(eta: usize, block_rows: usize, block_cols: usize, entries: &[f64]) -> Result<Self> {
        let mut set = Self::zeros(eta, block_rows, block_cols)?;
        if entries.len() != set.free_len() {
            return Err(mismatch("BlockTriangularSet::from_vec", set.free_len(), entries.len()));
        }
        let per = block_rows * block_cols;
        for (block, chunk) in set.blocks.iter_mut().zip(entries.chunks(per)) {
            *block = DenseMatrix::from_row_slice(block_rows, block_cols, chunk);
        }
        Ok(set)
    }

    pub fn eta(&self) -> usize {
        self.eta
    }

    pub fn block_rows(&self) -> usize {
        self.block_rows
    }

    pub fn block_cols(&self) -> usize {
        self.block_cols
    }

    /// Materialized shape `(eta·block_rows, eta·block_cols)`.
    pub fn dense_shape(&self) -> (usize, usize) {
        (self.eta * self.block_rows, self.eta * self.block_cols)
    }

    /// Number of free scalar entries.
    pub fn free_len(&self) -> usize {
        self.blocks.len() * self.block_rows * self.block_cols
    }

    fn check_index(&self, l: usize, tau: usize) -> Result<()> {
        if tau >= 1 && tau < l && l <= self.eta {
            Ok(())
        } else {
            Err(LinfbError::IndexOutOfRange { tau, l, eta: self.eta })
        }
    }

    pub fn block(&self, l: usize, tau: usize) -> Result<&DenseMatrix> {
        self.check_index(l, tau)?;
        Ok(&self.blocks[block_slot(l, tau)])
    }

    pub fn set_block(&mut self, l: usize, tau: usize, value: DenseMatrix) -> Result<()> {
        self.check_index(l, tau)?;
        if value.shape() != (self.block_rows, self.block_cols) {
            return Err(mismatch(
                "BlockTriangularSet::set_block",
                format!("{}x{}", self.block_rows, self.block_cols),
                format!("{}x{}", value.nrows(), value.ncols()),
            ));
        }
        self.blocks[block_slot(l, tau)] = value;
        Ok(())
    }

    /// Iterate `(l, tau, block)` in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &DenseMatrix)> + '_ {
        (2..=self.eta)
            .flat_map(|l| (1..l).map(move |tau| (l, tau)))
            .zip(self.blocks.iter())
            .map(|((l, tau), b)| (l, tau, b))
    }

    /// Free entries, block by block, each block row-major.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.free_len());
        for b in &self.blocks {
            for i in 0..b.nrows() {
                for j in 0..b.ncols() {
                    out.push(b[(i, j)]);
                }
            }
        }
        out
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let (r, c) = self.dense_shape();
        let mut m = DenseMatrix::zeros(r, c);
        for (l, tau, b) in self.iter() {
            m.view_mut(((l - 1) * self.block_rows, (tau - 1) * self.block_cols), (self.block_rows, self.block_cols))
                .copy_from(b);
        }
        m
    }

    /// Re-block a dense matrix, rejecting on-or-above-diagonal content larger
    /// than `1e-9 · (1 + max|m|)`.
    pub fn from_dense(m: &DenseMatrix, eta: usize, block_rows: usize, block_cols: usize) -> Result<Self> {
        let tol = 1e-9 * (1.0 + max_abs(m));
        Self::from_dense_with_tol(m, eta, block_rows, block_cols, tol)
    }

    pub fn from_dense_with_tol(
        m: &DenseMatrix,
        eta: usize,
        block_rows: usize,
        block_cols: usize,
        tol: f64,
    ) -> Result<Self> {
        let mut set = Self::zeros(eta, block_rows, block_cols)?;
        if m.shape() != set.dense_shape() {
            return Err(mismatch(
                "BlockTriangularSet::from_dense",
                format!("{:?}", set.dense_shape()),
                format!("{:?}", m.shape()),
            ));
        }
        let off = off_pattern_magnitude(m, eta, block_rows, block_cols);
        if off > tol {
            return Err(LinfbError::NotBlockTriangular { magnitude: off });
        }
        for l in 2..=eta {
            for tau in 1..l {
                let b = m
                    .view(((l - 1) * block_rows, (tau - 1) * block_cols), (block_rows, block_cols))
                    .into_owned();
                set.blocks[block_slot(l, tau)] = b;
            }
        }
        Ok(set)
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(|b| b.iter().all(|v| *v == 0.0))
    }

    /// `tr(M Mᵀ)` of the materialized matrix, i.e. the squared Frobenius norm.
    pub fn gram_trace(&self) -> f64 {
        self.blocks.iter().map(|b| b.norm_squared()).sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for b in &mut out.blocks {
            *b *= factor;
        }
        out
    }

    /// Reverse image of the materialized matrix; block dims swap.
    ///
    /// Block `(l, tau)` of the result is the reverse of block
    /// `(eta+1-tau, eta+1-l)` of `self`, which keeps the pattern strictly lower.
    pub fn reversed(&self) -> Self {
        let eta = self.eta;
        let mut out = Self::zeros(eta, self.block_cols, self.block_rows).expect("dims already validated");
        for l in 2..=eta {
            for tau in 1..l {
                let src = &self.blocks[block_slot(eta + 1 - tau, eta + 1 - l)];
                out.blocks[block_slot(l, tau)] = reverse(src);
            }
        }
        out
    }

    /// Conjugate every block by exchange matrices, `E · block · E`.
    pub fn flip_blocks(&self) -> Self {
        let mut out = self.clone();
        let er = exchange_matrix(self.block_rows);
        let ec = exchange_matrix(self.block_cols);
        for b in &mut out.blocks {
            *b = &er * &*b * &ec;
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        max_abs_diff(&self.to_dense(), &other.to_dense())
    }
}

/// Largest magnitude on or above the block diagonal of an
/// `eta`-block matrix with the given block dims.
pub fn off_pattern_magnitude(m: &DenseMatrix, eta: usize, block_rows: usize, block_cols: usize) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let (bl, bt) = (i / block_rows, j / block_cols);
            if bt >= bl || bl >= eta {
                worst = worst.max(m[(i, j)].abs());
            }
        }
    }
    worst
}

fn check_pair(first: &BlockTriangularSet, second: &BlockTriangularSet, ctx: &'static str) -> Result<()> {
    if first.eta != second.eta {
        return Err(mismatch(ctx, format!("eta {}", first.eta), format!("eta {}", second.eta)));
    }
    Ok(())
}

/// A/B-form sets have `κ × ν_i` blocks and pair with `H_i^B` (`ην_i × ηκ`).
fn check_bc_dims(set: &BlockTriangularSet, hb: &DenseMatrix, ctx: &'static str) -> Result<()> {
    let expected = (set.eta * set.block_cols, set.eta * set.block_rows);
    if hb.shape() != expected {
        return Err(mismatch(ctx, format!("lifted channel {expected:?}"), format!("{:?}", hb.shape())));
    }
    Ok(())
}

/// C/D-form sets have `ν_i × κ` blocks and pair with the MAC channel
/// `(H_i^B)ᵀ` (`ηκ × ην_i`).
fn check_mac_dims(set: &BlockTriangularSet, gb: &DenseMatrix, ctx: &'static str) -> Result<()> {
    let expected = (set.eta * set.block_cols, set.eta * set.block_rows);
    if gb.shape() != expected {
        return Err(mismatch(ctx, format!("lifted MAC channel {expected:?}"), format!("{:?}", gb.shape())));
    }
    Ok(())
}

fn common_block_rows(first: &BlockTriangularSet, second: &BlockTriangularSet, ctx: &'static str) -> Result<()> {
    if first.block_rows != second.block_rows {
        return Err(mismatch(ctx, format!("block rows {}", first.block_rows), format!("{}", second.block_rows)));
    }
    Ok(())
}

fn common_block_cols(first: &BlockTriangularSet, second: &BlockTriangularSet, ctx: &'static str) -> Result<()> {
    if first.block_cols != second.block_cols {
        return Err(mismatch(ctx, format!("block cols {}", first.block_cols), format!("{}", second.block_cols)));
    }
    Ok(())
}

/// Output-feedback gains to noise-feedback gains on the BC:
/// `B_i = (I − A₁H₁ − A₂H₂)⁻¹ A_i`.
pub fn omega(
    a1: &BlockTriangularSet,
    a2: &BlockTriangularSet,
    h1b: &DenseMatrix,
    h2b: &DenseMatrix,
) -> Result<(BlockTriangularSet, BlockTriangularSet)> {
    bc_transform(a1, a2, h1b, h2b, -1.0, "omega")
}

/// Inverse of [`omega`]: `A_i = (I + B₁H₁ + B₂H₂)⁻¹ B_i`.
pub fn omega_inv(
    b1: &BlockTriangularSet,
    b2: &BlockTriangularSet,
    h1b: &DenseMatrix,
    h2b: &DenseMatrix,
) -> Result<(BlockTriangularSet, BlockTriangularSet)> {
    bc_transform(b1, b2, h1b, h2b, 1.0, "omega_inv")
}

fn bc_transform(
    x1: &BlockTriangularSet,
    x2: &BlockTriangularSet,
    h1b: &DenseMatrix,
    h2b: &DenseMatrix,
    sign: f64,
    ctx: &'static str,
) -> Result<(BlockTriangularSet, BlockTriangularSet)> {
    check_pair(x1, x2, ctx)?;
    common_block_rows(x1, x2, ctx)?;
    check_bc_dims(x1, h1b, ctx)?;
    check_bc_dims(x2, h2b, ctx)?;
    let (d1, d2) = (x1.to_dense(), x2.to_dense());
    let n = d1.nrows();
    let t = DenseMatrix::identity(n, n) + sign * (&d1 * h1b + &d2 * h2b);
    let y1 = solve_left(&t, &d1, ctx)?;
    let y2 = solve_left(&t, &d2, ctx)?;
    Ok((
        BlockTriangularSet::from_dense(&y1, x1.eta, x1.block_rows, x1.block_cols)?,
        BlockTriangularSet::from_dense(&y2, x2.eta, x2.block_rows, x2.block_cols)?,
    ))
}

/// Output-feedback gains to noise-feedback gains on the MAC:
/// `D_i = C_i (I − G₁C₁ − G₂C₂)⁻¹` with `G_i = (H_i^B)ᵀ`.
pub fn omega_tilde(
    c1: &BlockTriangularSet,
    c2: &BlockTriangularSet,
    g1: &DenseMatrix,
    g2: &DenseMatrix,
) -> Result<(BlockTriangularSet, BlockTriangularSet)> {
    mac_transform(c1, c2, g1, g2, -1.0, "omega_tilde")
}

/// Inverse of [`omega_tilde`]: `C_i = D_i (I + G₁D₁ + G₂D₂)⁻¹`.
pub fn omega_tilde_inv(
    d1: &BlockTriangularSet,
    d2: &BlockTriangularSet,
    g1: &DenseMatrix,
    g2: &DenseMatrix,
) -> Result<(BlockTriangularSet, BlockTriangularSet)> {
    mac_transform(d1, d2, g1, g2, 1.0, "omega_tilde_inv")
}

fn mac_transform(
    x1: &BlockTriangularSet,
    x2: &BlockTriangularSet,
    g1: &DenseMatrix,
    g2: &DenseMatrix,
    sign: f64,
    ctx: &'static str,
) -> Result<(BlockTriangularSet, BlockTriangularSet)> {
    check_pair(x1, x2, ctx)?;
    common_block_cols(x1, x2, ctx)?;
    check_mac_dims(x1, g1, ctx)?;
    check_mac_dims(x2, g2, ctx)?;
    let (d1, d2) = (x1.to_dense(), x2.to_dense());
    let n = g1.nrows();
    let t = DenseMatrix::identity(n, n) + sign * (g1 * &d1 + g2 * &d2);
    let y1 = solve_right(&d1, &t, ctx)?;
    let y2 = solve_right(&d2, &t, ctx)?;
    Ok((
        BlockTriangularSet::from_dense(&y1, x1.eta, x1.block_rows, x1.block_cols)?,
        BlockTriangularSet::from_dense(&y2, x2.eta, x2.block_rows, x2.block_cols)?,
    ))
}

/// Max-abs asymmetry `‖M − Mᵀ‖`.
pub fn asymmetry(m: &DenseMatrix) -> f64 {
    max_abs_diff(m, &m.transpose())
}

/// Unique symmetric positive-definite square root.
///
/// Fails if `m` is not symmetric to `1e-9·(1+‖m‖)` or if any eigenvalue is at
/// or below `1e-12·tr(m)/n`. Nothing is clamped.
pub fn psd_sqrt(m: &DenseMatrix) -> Result<DenseMatrix> {
    if !m.is_square() {
        return Err(mismatch("psd_sqrt", "square matrix", format!("{}x{}", m.nrows(), m.ncols())));
    }
    let asym = asymmetry(m);
    if asym > SYMMETRY_TOL * (1.0 + max_abs(m)) {
        return Err(LinfbError::NotSymmetric { asymmetry: asym });
    }
    let n = m.nrows();
    let sym = (m + m.transpose()) * 0.5;
    let floor = 1e-12 * sym.trace().abs() / n as f64;
    let eig = sym.symmetric_eigen();
    let min_eigenvalue = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(min_eigenvalue > floor) {
        return Err(LinfbError::NotPositiveDefinite { min_eigenvalue, floor });
    }
    let roots = DenseMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
    let q = &eig.eigenvectors * roots * eig.eigenvectors.transpose();
    Ok((&q + q.transpose()) * 0.5)
}

/// Noise-whitening matrices of the MAC inner code:
///
/// `M₁ = (I + D₁G₁)ᵀ(I + D₁G₁) + (D₂G₁)ᵀ(D₂G₁)` and symmetrically for `M₂`,
/// where `G_i` is the lifted MAC channel of transmitter `i`.
pub fn mac_m_matrices(
    d1: &BlockTriangularSet,
    d2: &BlockTriangularSet,
    g1: &DenseMatrix,
    g2: &DenseMatrix,
) -> Result<(DenseMatrix, DenseMatrix)> {
    check_pair(d1, d2, "mac_m_matrices")?;
    common_block_cols(d1, d2, "mac_m_matrices")?;
    check_mac_dims(d1, g1, "mac_m_matrices")?;
    check_mac_dims(d2, g2, "mac_m_matrices")?;
    let (dd1, dd2) = (d1.to_dense(), d2.to_dense());
    let own = |d: &DenseMatrix, g: &DenseMatrix| {
        let n = g.ncols();
        DenseMatrix::identity(n, n) + d * g
    };
    let m_of = |own_d: &DenseMatrix, other_d: &DenseMatrix, g: &DenseMatrix| {
        let a = own(own_d, g);
        let c = other_d * g;
        a.transpose() * &a + c.transpose() * &c
    };
    Ok((m_of(&dd1, &dd2, g1), m_of(&dd2, &dd1, g2)))
}

/// Output-noise covariances of the BC inner code:
///
/// `N₁ = (I + H₁B₁)(I + H₁B₁)ᵀ + (H₁B₂)(H₁B₂)ᵀ` and symmetrically for `N₂`.
pub fn bc_n_matrices(
    b1: &BlockTriangularSet,
    b2: &BlockTriangularSet,
    h1b: &DenseMatrix,
    h2b: &DenseMatrix,
) -> Result<(DenseMatrix, DenseMatrix)> {
    check_pair(b1, b2, "bc_n_matrices")?;
    common_block_rows(b1, b2, "bc_n_matrices")?;
    check_bc_dims(b1, h1b, "bc_n_matrices")?;
    check_bc_dims(b2, h2b, "bc_n_matrices")?;
    let (bb1, bb2) = (b1.to_dense(), b2.to_dense());
    let n_of = |own_b: &DenseMatrix, other_b: &DenseMatrix, h: &DenseMatrix| {
        let n = h.nrows();
        let a = DenseMatrix::identity(n, n) + h * own_b;
        let c = h * other_b;
        &a * a.transpose() + &c * c.transpose()
    };
    Ok((n_of(&bb1, &bb2, h1b), n_of(&bb2, &bb1, h2b)))
}
