//! Linear symplectic algebra on direct sums of standard blocks `(R^{2k}, ±ω₀)`.
//!
//! Coordinates on a block of half-dimension `k` are `(x_1..x_k, y_1..y_k)` with
//! `z = x + iy` and `ω₀(z, w) = Im(z̄·w)`, so `ω₀(e_j, i e_j) = 1` and the form
//! matrix is `[[0, I], [-I, 0]]`. Multiplication by `i` is `[[0, -I], [I, 0]]`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

pub type Mat = DMatrix<f64>;

/// Default tolerance for rank and signature decisions.
pub const DEFAULT_TOL: f64 = 1e-9;

/// A real symplectic vector space given as a signed direct sum of standard blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct SympSpace {
    blocks: Vec<(usize, i8)>,
    form: Mat,
}

impl SympSpace {
    /// `(R^{2n}, ω₀)`.
    pub fn standard(n: usize) -> Self {
        Self::signed_sum(&[(n, 1)])
    }

    /// `⊕ sign_j·ω₀` on `⊕ R^{2 n_j}`, block-diagonal in the listed order.
    pub fn signed_sum(blocks: &[(usize, i8)]) -> Self {
        assert!(!blocks.is_empty(), "at least one block");
        let dim: usize = blocks.iter().map(|(k, _)| 2 * k).sum();
        let mut form = Mat::zeros(dim, dim);
        let mut off = 0;
        for &(k, sign) in blocks {
            assert!(k > 0, "blocks must be positive-dimensional");
            assert!(sign == 1 || sign == -1, "block signs are ±1");
            let s = f64::from(sign);
            for j in 0..k {
                form[(off + j, off + k + j)] = s;
                form[(off + k + j, off + j)] = -s;
            }
            off += 2 * k;
        }
        SympSpace { blocks: blocks.to_vec(), form }
    }

    pub fn direct_sum(&self, other: &SympSpace) -> SympSpace {
        let mut blocks = self.blocks.clone();
        blocks.extend_from_slice(&other.blocks);
        Self::signed_sum(&blocks)
    }

    /// The same space with the form reversed.
    pub fn negated(&self) -> SympSpace {
        let blocks: Vec<_> = self.blocks.iter().map(|&(k, s)| (k, -s)).collect();
        Self::signed_sum(&blocks)
    }

    /// `V ⊕ (-V)`, the home of graphs of symplectic maps of `V`.
    pub fn graph_space(&self) -> SympSpace {
        self.direct_sum(&self.negated())
    }

    pub fn dim_half(&self) -> usize {
        self.blocks.iter().map(|(k, _)| k).sum()
    }

    pub fn dim(&self) -> usize {
        2 * self.dim_half()
    }

    pub fn blocks(&self) -> &[(usize, i8)] {
        &self.blocks
    }

    pub fn block_signs(&self) -> Vec<i8> {
        self.blocks.iter().map(|&(_, s)| s).collect()
    }

    pub fn form_matrix(&self) -> &Mat {
        &self.form
    }

    /// Inverse of the form matrix; every block satisfies `Ω² = -1`.
    pub fn form_inverse(&self) -> Mat {
        -&self.form
    }

    pub fn omega(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        (u.transpose() * &self.form * v)[(0, 0)]
    }

    /// The Hamiltonian matrix `Ω⁻¹·S` generated by a symmetric `S`.
    pub fn hamiltonian(&self, generator: &Mat) -> Mat {
        self.form_inverse() * generator
    }

    /// The symmetric generator `Ω·A` of a Hamiltonian matrix `A`.
    pub fn generator_of(&self, hamiltonian: &Mat) -> Mat {
        let s = &self.form * hamiltonian;
        (&s + s.transpose()) * 0.5
    }

    /// The span of the `x` coordinates of every block (`R^n`, or `R^n ⊕ R^n`).
    pub fn reference_lagrangian(&self) -> LagrangianFrame {
        let n = self.dim_half();
        let mut cols = Mat::zeros(self.dim(), n);
        let (mut off, mut col) = (0, 0);
        for &(k, _) in &self.blocks {
            for j in 0..k {
                cols[(off + j, col)] = 1.0;
                col += 1;
            }
            off += 2 * k;
        }
        LagrangianFrame { columns: cols, space: self.clone() }
    }

    /// The span of the `y` coordinates of every block (`iR^n`).
    pub fn imaginary_lagrangian(&self) -> LagrangianFrame {
        let n = self.dim_half();
        let mut cols = Mat::zeros(self.dim(), n);
        let (mut off, mut col) = (0, 0);
        for &(k, _) in &self.blocks {
            for j in 0..k {
                cols[(off + k + j, col)] = 1.0;
                col += 1;
            }
            off += 2 * k;
        }
        LagrangianFrame { columns: cols, space: self.clone() }
    }

    fn check_square(&self, m: &Mat) -> Result<()> {
        if m.nrows() != self.dim() || m.ncols() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: m.nrows().max(m.ncols()) });
        }
        Ok(())
    }
}

fn inf_norm(m: &Mat) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// `‖MᵀΩM - Ω‖∞`.
pub fn symplectic_residual(space: &SympSpace, m: &Mat) -> f64 {
    inf_norm(&(m.transpose() * space.form_matrix() * m - space.form_matrix()))
}

pub fn is_symplectic(space: &SympSpace, m: &Mat, tol: f64) -> Result<bool> {
    space.check_square(m)?;
    Ok(symplectic_residual(space, m) <= tol)
}

/// A matrix preserving the symplectic form.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    entries: Mat,
    space: SympSpace,
}

impl SymplecticMatrix {
    pub fn new(entries: Mat, space: &SympSpace, tol: f64) -> Result<Self> {
        space.check_square(&entries)?;
        let scale = inf_norm(&entries).max(1.0);
        let residual = symplectic_residual(space, &entries);
        if residual > tol * scale * scale {
            return Err(Error::NotSymplectic { residual });
        }
        Ok(SymplecticMatrix { entries, space: space.clone() })
    }

    pub(crate) fn new_unchecked(entries: Mat, space: &SympSpace) -> Self {
        SymplecticMatrix { entries, space: space.clone() }
    }

    pub fn identity(space: &SympSpace) -> Self {
        SymplecticMatrix { entries: Mat::identity(space.dim(), space.dim()), space: space.clone() }
    }

    /// `exp(Ω⁻¹·S)` for symmetric `S`.
    pub fn exp_of_generator(space: &SympSpace, generator: &Mat) -> Self {
        SymplecticMatrix { entries: space.hamiltonian(generator).exp(), space: space.clone() }
    }

    pub fn entries(&self) -> &Mat {
        &self.entries
    }

    pub fn into_entries(self) -> Mat {
        self.entries
    }

    pub fn space(&self) -> &SympSpace {
        &self.space
    }

    /// `Ω⁻¹MᵀΩ` is the inverse of a symplectic matrix.
    pub fn inverse(&self) -> SymplecticMatrix {
        let omega = self.space.form_matrix();
        let inv = self.space.form_inverse() * self.entries.transpose() * omega;
        SymplecticMatrix { entries: inv, space: self.space.clone() }
    }

    pub fn compose(&self, other: &SymplecticMatrix) -> SymplecticMatrix {
        SymplecticMatrix { entries: &self.entries * &other.entries, space: self.space.clone() }
    }

    pub fn residual(&self) -> f64 {
        symplectic_residual(&self.space, &self.entries)
    }

    pub fn apply(&self, frame: &LagrangianFrame) -> LagrangianFrame {
        LagrangianFrame { columns: &self.entries * &frame.columns, space: frame.space.clone() }
    }

    /// Block-diagonal sum acting on `self.space ⊕ other.space`.
    pub fn direct_sum(&self, other: &SymplecticMatrix) -> SymplecticMatrix {
        SymplecticMatrix {
            entries: block_diag(&self.entries, &other.entries),
            space: self.space.direct_sum(&other.space),
        }
    }
}

pub fn block_diag(a: &Mat, b: &Mat) -> Mat {
    let mut m = Mat::zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    m.view_mut((0, 0), a.shape()).copy_from(a);
    m.view_mut((a.nrows(), a.ncols()), b.shape()).copy_from(b);
    m
}

/// A linear involution reversing the symplectic form.
#[derive(Debug, Clone, PartialEq)]
pub struct AntiSymplecticMap {
    entries: Mat,
    space: SympSpace,
}

impl AntiSymplecticMap {
    pub fn new(entries: Mat, space: &SympSpace, tol: f64) -> Result<Self> {
        space.check_square(&entries)?;
        let omega = space.form_matrix();
        let anti = inf_norm(&(entries.transpose() * omega * &entries + omega));
        if anti > tol {
            return Err(Error::NotAntiSymplectic { residual: anti });
        }
        let inv = inf_norm(&(&entries * &entries - Mat::identity(space.dim(), space.dim())));
        if inv > tol {
            return Err(Error::NotInvolution { residual: inv });
        }
        Ok(AntiSymplecticMap { entries, space: space.clone() })
    }

    /// Coordinate complex conjugation `(x, y) ↦ (x, -y)` in every block.
    pub fn complex_conjugation(space: &SympSpace) -> Self {
        let mut d = Mat::zeros(space.dim(), space.dim());
        let mut off = 0;
        for &(k, _) in space.blocks() {
            for j in 0..k {
                d[(off + j, off + j)] = 1.0;
                d[(off + k + j, off + k + j)] = -1.0;
            }
            off += 2 * k;
        }
        AntiSymplecticMap { entries: d, space: space.clone() }
    }

    /// The factor swap `(z₁, z₂) ↦ (z₂, z₁)` on `V ⊕ (-V)`.
    pub fn factor_swap(factor: &SympSpace) -> Self {
        let d = factor.dim();
        let mut m = Mat::zeros(2 * d, 2 * d);
        for j in 0..d {
            m[(j, d + j)] = 1.0;
            m[(d + j, j)] = 1.0;
        }
        AntiSymplecticMap { entries: m, space: factor.graph_space() }
    }

    pub fn entries(&self) -> &Mat {
        &self.entries
    }

    pub fn space(&self) -> &SympSpace {
        &self.space
    }

    pub fn apply(&self, frame: &LagrangianFrame) -> LagrangianFrame {
        LagrangianFrame { columns: &self.entries * &frame.columns, space: frame.space.clone() }
    }

    /// The Lagrangian fixed by the involution (its `+1` eigenspace).
    pub fn fixed_lagrangian(&self) -> Result<LagrangianFrame> {
        let plus = (&self.entries + Mat::identity(self.space.dim(), self.space.dim())) * 0.5;
        let cols = column_space(&plus, 1e-9);
        LagrangianFrame::new(cols, &self.space, 1e-9)
    }
}

/// `C·F·C`, symplectic whenever `C` is an anti-symplectic involution.
pub fn conjugate_symplectic(c: &AntiSymplecticMap, f: &SymplecticMatrix) -> Result<SymplecticMatrix> {
    if c.space != f.space {
        return Err(Error::DimensionMismatch { expected: c.space.dim(), found: f.space.dim() });
    }
    // re-validate: the fields are public through `new`, but the caller may pass an unchecked map
    let checked = AntiSymplecticMap::new(c.entries.clone(), &c.space, 1e-9)?;
    let out = checked.entries() * f.entries() * checked.entries();
    SymplecticMatrix::new(out, &f.space, 1e-8)
}

/// A Lagrangian subspace given by a spanning frame; frames are never normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianFrame {
    columns: Mat,
    space: SympSpace,
}

impl LagrangianFrame {
    pub fn new(columns: Mat, space: &SympSpace, tol: f64) -> Result<Self> {
        if columns.nrows() != space.dim() {
            return Err(Error::DimensionMismatch { expected: space.dim(), found: columns.nrows() });
        }
        if columns.ncols() != space.dim_half() {
            return Err(Error::DimensionMismatch { expected: space.dim_half(), found: columns.ncols() });
        }
        let q = orthonormalize(&columns);
        let sv = columns.clone().svd(false, false).singular_values;
        let smax = sv.max();
        let smin = sv.min();
        if smax == 0.0 || smin / smax <= tol {
            return Err(Error::NotLagrangian("frame is rank deficient"));
        }
        let iso = inf_norm(&(q.transpose() * space.form_matrix() * &q));
        if iso > tol.max(1e-12) * 10.0 {
            return Err(Error::NotLagrangian("frame is not isotropic"));
        }
        Ok(LagrangianFrame { columns, space: space.clone() })
    }

    pub(crate) fn new_unchecked(columns: Mat, space: &SympSpace) -> Self {
        LagrangianFrame { columns, space: space.clone() }
    }

    pub fn columns(&self) -> &Mat {
        &self.columns
    }

    pub fn space(&self) -> &SympSpace {
        &self.space
    }

    /// Orthonormal basis of the span.
    pub fn orthonormal(&self) -> Mat {
        orthonormalize(&self.columns)
    }

    /// `⊕` of two frames in the direct-sum space.
    pub fn direct_sum(&self, other: &LagrangianFrame) -> LagrangianFrame {
        LagrangianFrame {
            columns: block_diag(&self.columns, &other.columns),
            space: self.space.direct_sum(&other.space),
        }
    }

    /// The diagonal `{(z, z)}` in `V ⊕ (-V)`.
    pub fn diagonal(factor: &SympSpace) -> LagrangianFrame {
        let d = factor.dim();
        let id = Mat::identity(d, d);
        let mut cols = Mat::zeros(2 * d, d);
        cols.view_mut((0, 0), (d, d)).copy_from(&id);
        cols.view_mut((d, 0), (d, d)).copy_from(&id);
        LagrangianFrame { columns: cols, space: factor.graph_space() }
    }

    pub fn isotropy_residual(&self) -> f64 {
        let q = self.orthonormal();
        inf_norm(&(q.transpose() * self.space.form_matrix() * &q))
    }

    /// Frames with equal span.
    pub fn same_span(&self, other: &LagrangianFrame, tol: f64) -> bool {
        self.space == other.space && intersection_dimension(self, other, tol) == self.space.dim_half()
    }
}

/// Thin orthonormal basis of the column space of a full-rank matrix.
pub fn orthonormalize(m: &Mat) -> Mat {
    m.clone().qr().q()
}

/// Orthonormal basis of the column space, rank decided by `tol` relative to the largest singular value.
pub fn column_space(m: &Mat, tol: f64) -> Mat {
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("requested");
    let smax = svd.singular_values.max();
    let keep: Vec<usize> =
        (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] > tol * smax.max(1.0)).collect();
    Mat::from_fn(m.nrows(), keep.len(), |r, c| u[(r, keep[c])])
}

/// The graph `{(Fz, z)}` of a symplectic map, Lagrangian in `V ⊕ (-V)`.
pub fn graph_lagrangian(f: &SymplecticMatrix) -> Result<LagrangianFrame> {
    let scale = inf_norm(f.entries()).max(1.0);
    if f.residual() > 1e-8 * scale * scale {
        return Err(Error::NotSymplectic { residual: f.residual() });
    }
    let d = f.space.dim();
    let mut cols = Mat::zeros(2 * d, d);
    cols.view_mut((0, 0), (d, d)).copy_from(f.entries());
    cols.view_mut((d, 0), (d, d)).copy_from(&Mat::identity(d, d));
    Ok(LagrangianFrame { columns: cols, space: f.space.graph_space() })
}

/// `dim(span A ∩ span B)` as `2n - rank[A | B]` after orthonormalizing both frames.
pub fn intersection_dimension(a: &LagrangianFrame, b: &LagrangianFrame, tol: f64) -> usize {
    let qa = a.orthonormal();
    let qb = b.orthonormal();
    let n = qa.ncols();
    let mut cat = Mat::zeros(qa.nrows(), 2 * n);
    cat.view_mut((0, 0), qa.shape()).copy_from(&qa);
    cat.view_mut((0, n), qb.shape()).copy_from(&qb);
    let sv = cat.svd(false, false).singular_values;
    sv.iter().filter(|&&s| s <= tol).count()
}

/// Sines of the principal angles between `span x` and the Lagrangian `span v`, ascending,
/// with the corresponding unit vectors of `span x`.
pub(crate) fn principal_sines(space: &SympSpace, x: &Mat, v: &Mat) -> (Vec<f64>, Mat) {
    let qx = orthonormalize(x);
    // Ω·v is the Euclidean complement of an isotropic span
    let perp = orthonormalize(&(space.form_matrix() * v));
    let m = perp.transpose() * &qx;
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
    let sines = order.iter().map(|&i| svd.singular_values[i]).collect();
    let vecs = Mat::from_fn(qx.ncols(), order.len(), |r, c| vt[(order[c], r)]);
    (sines, &qx * vecs)
}

/// The canonical complement `Ω·A`, corrected to be isotropic if needed.
pub fn lagrangian_complement(a: &LagrangianFrame) -> LagrangianFrame {
    let space = &a.space;
    let omega = space.form_matrix();
    let qa = a.orthonormal();
    let b = omega * &qa;
    // Bᵀ Ω B vanishes for block spaces; the correction keeps this valid for any form
    let bob = b.transpose() * omega * &b;
    if inf_norm(&bob) <= 1e-13 {
        return LagrangianFrame { columns: b, space: space.clone() };
    }
    let p = b.transpose() * omega * &qa;
    let x = -p.lu().solve(&bob).expect("complement pairing is invertible") * 0.5;
    let w = &b + &qa * x;
    LagrangianFrame { columns: w, space: space.clone() }
}

/// Counts of positive, negative and near-zero eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Signature {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

impl Signature {
    pub fn value(&self) -> i64 {
        self.positive as i64 - self.negative as i64
    }

    pub fn is_degenerate(&self) -> bool {
        self.zero > 0
    }
}

/// A real symmetric bilinear form, optionally recorded with the basis it is expressed in.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm {
    matrix: Mat,
    basis: Option<Mat>,
}

impl QuadraticForm {
    /// Symmetrizes its input; use [`QuadraticForm::asymmetry`] first when that matters.
    pub fn new(matrix: Mat) -> Self {
        let sym = (&matrix + matrix.transpose()) * 0.5;
        QuadraticForm { matrix: sym, basis: None }
    }

    pub fn with_basis(matrix: Mat, basis: Mat) -> Self {
        let mut q = Self::new(matrix);
        q.basis = Some(basis);
        q
    }

    /// `max |B - Bᵀ| / 2` of a bilinear matrix.
    pub fn asymmetry(bilinear: &Mat) -> f64 {
        inf_norm(&(bilinear - bilinear.transpose())) * 0.5
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    pub fn basis(&self) -> Option<&Mat> {
        self.basis.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn eigenvalues(&self) -> DVector<f64> {
        if self.dim() == 0 {
            return DVector::zeros(0);
        }
        SymmetricEigen::new(self.matrix.clone()).eigenvalues
    }

    pub fn signature(&self, tol: f64) -> Signature {
        signature(self, tol)
    }

    /// The signature, or `Degenerate` when any eigenvalue lies within `tol` of zero.
    pub fn nondegenerate_signature(&self, tol: f64) -> Result<i64> {
        let s = signature(self, tol);
        if s.is_degenerate() {
            Err(Error::Degenerate { zero_count: s.zero })
        } else {
            Ok(s.value())
        }
    }

    /// `PᵀQP`.
    pub fn congruent(&self, p: &Mat) -> QuadraticForm {
        QuadraticForm::new(p.transpose() * &self.matrix * p)
    }
}

pub fn signature(q: &QuadraticForm, tol: f64) -> Signature {
    let ev = q.eigenvalues();
    let positive = ev.iter().filter(|&&e| e > tol).count();
    let negative = ev.iter().filter(|&&e| e < -tol).count();
    Signature { positive, negative, zero: ev.len() - positive - negative }
}

/// Planar rotation `e^{iθ}` acting on `(R^{2n}, ω₀)` diagonally.
pub fn rotation(n: usize, theta: f64) -> Mat {
    let mut m = Mat::zeros(2 * n, 2 * n);
    let (s, c) = theta.sin_cos();
    for j in 0..n {
        m[(j, j)] = c;
        m[(j, n + j)] = -s;
        m[(n + j, j)] = s;
        m[(n + j, n + j)] = c;
    }
    m
}

/// The line `e^{iθ}·R` in `(R², ω₀)`.
pub fn rotated_line(theta: f64) -> LagrangianFrame {
    let space = SympSpace::standard(1);
    LagrangianFrame::new_unchecked(Mat::from_column_slice(2, 1, &[theta.cos(), theta.sin()]), &space)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn form_convention() {
        let sp = SympSpace::standard(1);
        let e1 = DVector::from_vec(vec![1.0, 0.0]);
        let ie1 = DVector::from_vec(vec![0.0, 1.0]);
        assert_eq!(sp.omega(&e1, &ie1), 1.0);
        // exp(t·i·πI) is the rotation e^{iπt}
        let a = sp.hamiltonian(&(Mat::identity(2, 2) * PI));
        assert_abs_diff_eq!(a.exp(), rotation(1, PI), epsilon = 1e-12);
    }

    #[test]
    fn symplectic_checks() {
        let sp = SympSpace::standard(2);
        assert!(is_symplectic(&sp, &Mat::identity(4, 4), DEFAULT_TOL).unwrap());
        let sp1 = SympSpace::standard(1);
        for k in 0..12 {
            let th = k as f64 * 0.7 - 3.0;
            assert!(is_symplectic(&sp1, &rotation(1, th), DEFAULT_TOL).unwrap());
        }
        // diag(2,1) scales ω₀ by 2: MᵀJM = 2J
        let d = Mat::from_diagonal(&DVector::from_vec(vec![2.0, 1.0]));
        assert!(!is_symplectic(&sp1, &d, DEFAULT_TOL).unwrap());
        assert_abs_diff_eq!(symplectic_residual(&sp1, &d), 1.0);
        assert!(matches!(is_symplectic(&sp, &d, DEFAULT_TOL), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn graph_of_identity_is_diagonal() {
        let sp = SympSpace::standard(2);
        let g = graph_lagrangian(&SymplecticMatrix::identity(&sp)).unwrap();
        assert!(g.same_span(&LagrangianFrame::diagonal(&sp), DEFAULT_TOL));
    }

    #[test]
    fn graph_of_quarter_turn() {
        let sp = SympSpace::standard(1);
        let f = SymplecticMatrix::new(rotation(1, PI / 2.0), &sp, DEFAULT_TOL).unwrap();
        let g = graph_lagrangian(&f).unwrap();
        // columns (F e₁, e₁) and (F e₂, e₂)
        assert_abs_diff_eq!(g.columns().column(0).into_owned(), DVector::from_vec(vec![0.0, 1.0, 1.0, 0.0]), epsilon = 1e-15);
        assert!(g.isotropy_residual() < 1e-14);
        let bad = SymplecticMatrix::new_unchecked(Mat::from_diagonal(&DVector::from_vec(vec![2.0, 1.0])), &sp);
        assert!(matches!(graph_lagrangian(&bad), Err(Error::NotSymplectic { .. })));
    }

    #[test]
    fn intersection_dimensions() {
        let sp = SympSpace::standard(1);
        let re = sp.reference_lagrangian();
        let im = sp.imaginary_lagrangian();
        assert_eq!(intersection_dimension(&re, &re, DEFAULT_TOL), 1);
        assert_eq!(intersection_dimension(&re, &im, DEFAULT_TOL), 0);
        // det[(1,0),(cos π/4, sin π/4)] = sin π/4 ≠ 0
        assert_eq!(intersection_dimension(&re, &rotated_line(PI / 4.0), DEFAULT_TOL), 0);
        let scaled = LagrangianFrame::new(re.columns() * 3.5, &sp, DEFAULT_TOL).unwrap();
        assert_eq!(intersection_dimension(&re, &scaled, DEFAULT_TOL), 1);
    }

    #[test]
    fn signatures() {
        let q = QuadraticForm::new(Mat::identity(3, 3));
        assert_eq!(q.signature(DEFAULT_TOL).value(), 3);
        // -4xy has eigenvalues ±2
        let h = QuadraticForm::new(Mat::from_row_slice(2, 2, &[0.0, -2.0, -2.0, 0.0]));
        let s = h.signature(DEFAULT_TOL);
        assert_eq!((s.positive, s.negative, s.zero), (1, 1, 0));
        assert_eq!(s.value(), 0);
        let z = QuadraticForm::new(Mat::zeros(2, 2));
        assert_eq!(z.nondegenerate_signature(DEFAULT_TOL), Err(Error::Degenerate { zero_count: 2 }));
    }

    #[test]
    fn complements() {
        let sp = SympSpace::standard(1);
        let w = lagrangian_complement(&sp.reference_lagrangian());
        assert!(w.same_span(&sp.imaginary_lagrangian(), DEFAULT_TOL));
        let sp2 = SympSpace::standard(2);
        let w2 = lagrangian_complement(&sp2.reference_lagrangian());
        assert!(w2.same_span(&sp2.imaginary_lagrangian(), DEFAULT_TOL));
        assert_eq!(intersection_dimension(&sp2.reference_lagrangian(), &w2, DEFAULT_TOL), 0);

        let f = SymplecticMatrix::new(rotation(1, PI / 2.0), &sp, DEFAULT_TOL).unwrap();
        let g = graph_lagrangian(&f).unwrap();
        let wg = lagrangian_complement(&g);
        assert!(wg.isotropy_residual() < 1e-12);
        assert_eq!(intersection_dimension(&g, &wg, DEFAULT_TOL), 0);
    }

    #[test]
    fn conjugation_by_complex_conjugation() {
        let sp = SympSpace::standard(1);
        let c = AntiSymplecticMap::complex_conjugation(&sp);
        let id = SymplecticMatrix::identity(&sp);
        assert_eq!(conjugate_symplectic(&c, &id).unwrap().entries(), id.entries());
        let th = 0.83;
        let f = SymplecticMatrix::new(rotation(1, th), &sp, DEFAULT_TOL).unwrap();
        let g = conjugate_symplectic(&c, &f).unwrap();
        assert_abs_diff_eq!(g.entries().clone(), rotation(1, -th), epsilon = 1e-15);
        assert!(matches!(
            AntiSymplecticMap::new(Mat::identity(2, 2), &sp, DEFAULT_TOL),
            Err(Error::NotAntiSymplectic { .. })
        ));
    }

    #[test]
    fn swap_is_anti_symplectic_and_fixes_diagonal() {
        let v = SympSpace::standard(2);
        let c = AntiSymplecticMap::factor_swap(&v);
        assert!(AntiSymplecticMap::new(c.entries().clone(), c.space(), 1e-14).is_ok());
        let fixed = c.fixed_lagrangian().unwrap();
        assert!(fixed.same_span(&LagrangianFrame::diagonal(&v), DEFAULT_TOL));
        let ref_sum = c.space().reference_lagrangian();
        assert!(c.apply(&ref_sum).same_span(&ref_sum, DEFAULT_TOL));
    }

    #[test]
    fn inverse_of_symplectic() {
        let sp = SympSpace::standard(2);
        let s = Mat::from_fn(4, 4, |i, j| ((i + 2 * j) as f64 * 0.37).sin() + ((j + 2 * i) as f64 * 0.37).sin());
        let f = SymplecticMatrix::exp_of_generator(&sp, &s);
        let prod = f.compose(&f.inverse());
        assert_abs_diff_eq!(prod.into_entries(), Mat::identity(4, 4), epsilon = 1e-10);
    }
}
