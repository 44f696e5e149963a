//! Doubling of half-paths by an anti-symplectic involution, the defect form and the
//! index comparison it controls, including the diagonal case.

use serde::{Deserialize, Serialize};

use crate::czindex::{cz_lagrangian_against, cz_periodic, has_unit_eigenvalue};
use crate::error::{Error, Nondegeneracy, Result};
use crate::halfint::HalfInt;
use crate::maslov::{CrossingOptions, SymplecticPathSpec};
use crate::symlin::{
    principal_sines, AntiSymplecticMap, LagrangianFrame, Mat, QuadraticForm, SympSpace, SymplecticMatrix,
};

/// A half-path on `[0, 1]` starting at the identity, with the involution and the Lagrangian it fixes.
#[derive(Debug, Clone)]
pub struct HalfPathData {
    half: SymplecticPathSpec,
    involution: AntiSymplecticMap,
    reference: LagrangianFrame,
}

impl HalfPathData {
    /// Complex conjugation on `(R^{2n}, ω₀)` with reference `R^n`.
    pub fn standard(half: SymplecticPathSpec) -> Result<Self> {
        let space = half.space().clone();
        Self::new(half, AntiSymplecticMap::complex_conjugation(&space), space.reference_lagrangian())
    }

    pub fn new(half: SymplecticPathSpec, involution: AntiSymplecticMap, reference: LagrangianFrame) -> Result<Self> {
        let space = half.space();
        for other in [involution.space(), reference.space()] {
            if other != space {
                return Err(Error::DimensionMismatch { expected: space.dim(), found: other.dim() });
            }
        }
        let d = space.dim();
        if (half.start() - Mat::identity(d, d)).amax() > 1e-9 {
            return Err(Error::InvalidPath("half-path must start at the identity".into()));
        }
        if (half.total_duration() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidPath("half-path must have duration 1".into()));
        }
        if !involution.apply(&reference).same_span(&reference, 1e-7) {
            return Err(Error::NotLagrangian("involution does not preserve the reference Lagrangian"));
        }
        Ok(HalfPathData { half, involution, reference })
    }

    pub fn half(&self) -> &SymplecticPathSpec {
        &self.half
    }

    pub fn involution(&self) -> &AntiSymplecticMap {
        &self.involution
    }

    pub fn reference(&self) -> &LagrangianFrame {
        &self.reference
    }

    pub fn space(&self) -> &SympSpace {
        self.half.space()
    }

    fn c(&self) -> &Mat {
        self.involution.entries()
    }

    fn sym(&self, m: Mat) -> SymplecticMatrix {
        SymplecticMatrix::new_unchecked(m, self.space())
    }

    /// `F₂ = c·F₁⁻¹·c·F₁`.
    pub fn monodromy(&self) -> Mat {
        let f1 = self.sym(self.half.end().clone());
        let c = self.c();
        c * f1.inverse().entries() * c * f1.entries()
    }
}

/// A path on `[0, 2]` with `F(t) = c·F(2-t)·F₂⁻¹·c`.
#[derive(Debug, Clone)]
pub struct DoubledPath {
    pub full: SymplecticPathSpec,
    pub monodromy: SymplecticMatrix,
    pub involution: AntiSymplecticMap,
}

impl DoubledPath {
    /// Largest `|F(t) - c·F(2-t)·F₂⁻¹·c|` over `samples + 1` uniform times.
    pub fn symmetry_residual(&self, samples: usize) -> f64 {
        let c = self.involution.entries();
        let f2_inv = self.monodromy.inverse();
        let total = self.full.total_duration();
        (0..=samples)
            .map(|i| {
                let t = total * i as f64 / samples as f64;
                let lhs = self.full.evaluate(t).expect("in range");
                let rhs = c * self.full.evaluate(total - t).expect("in range").entries() * f2_inv.entries() * c;
                (lhs.entries() - rhs).amax()
            })
            .fold(0.0, f64::max)
    }

    /// `|(c·F₂)² - 1|`.
    pub fn involution_residual(&self) -> f64 {
        let cf = self.involution.entries() * self.monodromy.entries();
        let d = cf.nrows();
        (&cf * &cf - Mat::identity(d, d)).amax()
    }
}

/// The doubled path: `F` on `[0, 1]`, then `F(1+s) = c·F(1-s)·F₂⁻¹·c`.
pub fn double_path(h: &HalfPathData) -> DoubledPath {
    let c = h.c();
    let f2 = h.monodromy();
    let tail = h.sym(c * h.sym(f2.clone()).inverse().entries() * c);
    let second = h.half.anti_conjugated_reversal(c).right_multiplied(&tail);
    let full = h.half.concat(&second).expect("continuous at t = 1");
    DoubledPath { full, monodromy: h.sym(f2), involution: h.involution.clone() }
}

/// `F⁻(t) = c·F(1-t)·F₁⁻¹·c`, starting at the identity.
pub fn reflected_half(h: &HalfPathData) -> SymplecticPathSpec {
    let c = h.c();
    let f1_inv = h.sym(h.half.end().clone()).inverse();
    let tail = h.sym(c * f1_inv.entries() * c);
    h.half.anti_conjugated_reversal(c).right_multiplied(&tail)
}

/// The bilinear form `(u, v) ↦ ω((1 - F₂)u, c·v)` as a matrix.
pub fn defect_bilinear(d: &DoubledPath) -> Mat {
    let space = d.full.space();
    let f2 = d.monodromy.entries();
    let dim = f2.nrows();
    (Mat::identity(dim, dim) - f2).transpose() * space.form_matrix() * d.involution.entries()
}

/// The defect form `Q`, the symmetrization of [`defect_bilinear`].
pub fn defect_form(d: &DoubledPath) -> QuadraticForm {
    QuadraticForm::new(defect_bilinear(d))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DefectReport {
    pub mu_plus: HalfInt,
    pub mu_minus: HalfInt,
    pub mu_loop: HalfInt,
    pub q_signature: i64,
    /// `mu_plus + mu_minus - mu_loop - ½·sign Q`.
    pub defect: HalfInt,
    /// Size of the antisymmetric part of the bilinear defect form.
    pub q_asymmetry: f64,
}

impl DefectReport {
    pub fn pass(&self) -> bool {
        self.defect == HalfInt::from_int(0)
    }
}

fn transverse(a: &LagrangianFrame, b: &LagrangianFrame, opts: &CrossingOptions) -> bool {
    principal_sines(a.space(), a.columns(), b.columns()).0[0] >= opts.intersection_tol()
}

fn require(ok: bool, which: Nondegeneracy) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Nondegeneracy(which))
    }
}

/// Computes both sides of `μ(F) + μ(F⁻) - μ(doubled loop) = ½·sign Q`.
pub fn verify_index_theorem(h: &HalfPathData, opts: &CrossingOptions) -> Result<DefectReport> {
    let l = h.reference();
    let f1 = h.sym(h.half.end().clone());
    require(transverse(&f1.apply(l), l, opts), Nondegeneracy::HalfEndpoint)?;
    let minus = reflected_half(h);
    let fm1 = h.sym(minus.end().clone());
    require(transverse(&fm1.apply(l), l, opts), Nondegeneracy::ReflectedEndpoint)?;
    let doubled = double_path(h);
    require(!has_unit_eigenvalue(doubled.monodromy.entries(), opts), Nondegeneracy::Monodromy)?;
    let bilinear = defect_bilinear(&doubled);
    let q_asymmetry = QuadraticForm::asymmetry(&bilinear);
    let q = QuadraticForm::new(bilinear);
    let scale = q.matrix().amax().max(1.0);
    let sig = q.signature(opts.intersection_tol() * scale);
    require(!sig.is_degenerate(), Nondegeneracy::DefectForm)?;

    let mu_plus = cz_lagrangian_against(&h.half, l, opts)?.value;
    let mu_minus = cz_lagrangian_against(&minus, l, opts)?.value;
    let mu_loop = cz_periodic(&doubled.full, false, opts)?.value;
    let q_signature = sig.value();
    let defect = mu_plus + mu_minus - mu_loop - HalfInt::from_twice(q_signature);
    Ok(DefectReport { mu_plus, mu_minus, mu_loop, q_signature, defect, q_asymmetry })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReflectionReport {
    pub mu: HalfInt,
    pub mu_reflected: HalfInt,
}

impl ReflectionReport {
    pub fn holds(&self) -> bool {
        self.mu == self.mu_reflected
    }
}

/// Compares the boundary index of a half-path with that of its reflection.
pub fn verify_reflection(h: &HalfPathData, opts: &CrossingOptions) -> Result<ReflectionReport> {
    let l = h.reference();
    let f1 = h.sym(h.half.end().clone());
    require(transverse(&f1.apply(l), l, opts), Nondegeneracy::HalfEndpoint)?;
    let minus = reflected_half(h);
    let fm1 = h.sym(minus.end().clone());
    require(transverse(&fm1.apply(l), l, opts), Nondegeneracy::ReflectedEndpoint)?;
    let mu = cz_lagrangian_against(&h.half, l, opts)?.value;
    let mu_reflected = cz_lagrangian_against(&minus, l, opts)?.value;
    Ok(ReflectionReport { mu, mu_reflected })
}

/// `ψ(t) = (φ(t), φ(2-t)·φ(2)⁻¹)` on `V ⊕ (-V)` with the factor swap.
pub fn diagonal_double(phi: &SymplecticPathSpec) -> Result<DoubledPath> {
    let v = phi.space();
    let d = v.dim();
    if (phi.start() - Mat::identity(d, d)).amax() > 1e-9 {
        return Err(Error::InvalidPath("φ must start at the identity".into()));
    }
    // on -V the reversed flow keeps the generators of φ
    let parts: Vec<(Mat, f64)> =
        phi.segments().iter().rev().map(|s| (s.generator().clone(), s.duration())).collect();
    let back = SymplecticPathSpec::new(&v.negated(), parts, None)?;
    let full = phi.direct_sum(&back)?;
    let monodromy = SymplecticMatrix::new_unchecked(full.end().clone(), full.space());
    Ok(DoubledPath { full, monodromy, involution: AntiSymplecticMap::factor_swap(v) })
}

/// The half `ψ|[0, 1]` with the swap and the diagonal, as data for [`double_path`].
pub fn diagonal_half(phi: &SymplecticPathSpec) -> Result<HalfPathData> {
    let psi = diagonal_double(phi)?;
    let total = psi.full.total_duration();
    let half = psi.full.restricted(0.0, 0.5 * total)?.normalized_to(1.0);
    HalfPathData::new(half, psi.involution, LagrangianFrame::diagonal(phi.space()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagonalReport {
    pub defect: DefectReport,
    pub mu_half: HalfInt,
    pub cz_factor: HalfInt,
    pub sign_q_zero: bool,
    pub q_block_anti_diagonal: bool,
    pub loop_equals_twice_half: bool,
    pub half_equals_factor_index: bool,
}

impl DiagonalReport {
    pub fn pass(&self) -> bool {
        self.defect.pass()
            && self.sign_q_zero
            && self.q_block_anti_diagonal
            && self.loop_equals_twice_half
            && self.half_equals_factor_index
    }
}

/// Checks the diagonal chain: `sign Q = 0`, `μ(loop) = 2·μ(half)` and `μ(half) = CZ(φ)`.
pub fn verify_diagonal(phi: &SymplecticPathSpec, opts: &CrossingOptions) -> Result<DiagonalReport> {
    if (phi.total_duration() - 2.0).abs() > 1e-9 {
        return Err(Error::InvalidPath("φ must be defined on [0, 2]".into()));
    }
    require(!has_unit_eigenvalue(phi.end(), opts), Nondegeneracy::Monodromy)?;
    let h = diagonal_half(phi)?;
    let psi = diagonal_double(phi)?;
    let q = defect_form(&psi);
    let m = phi.space().dim();
    let scale = q.matrix().amax().max(1.0);
    let diag_blocks = q.matrix().view((0, 0), (m, m)).amax().max(q.matrix().view((m, m), (m, m)).amax());
    let q_block_anti_diagonal = diag_blocks <= 1e-9 * scale;

    let defect = verify_index_theorem(&h, opts)?;
    let cz_factor = cz_periodic(phi, false, opts)?.value;
    let mu_half = defect.mu_plus;
    Ok(DiagonalReport {
        defect,
        mu_half,
        cz_factor,
        sign_q_zero: defect.q_signature == 0,
        q_block_anti_diagonal,
        loop_equals_twice_half: defect.mu_loop == mu_half + mu_half,
        half_equals_factor_index: mu_half == cz_factor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_diagonal_phi, random_half_path, random_symmetric, trial_rng};
    use crate::symlin::rotation;
    use std::f64::consts::PI;

    fn opts() -> CrossingOptions {
        CrossingOptions::default()
    }

    fn quarter() -> HalfPathData {
        HalfPathData::standard(SymplecticPathSpec::rotation(1, PI / 2.0, 1.0)).unwrap()
    }

    #[test]
    fn doubling_the_identity() {
        let h = HalfPathData::standard(SymplecticPathSpec::constant(&SympSpace::standard(2), 1.0, None)).unwrap();
        let d = double_path(&h);
        assert!((d.monodromy.entries() - Mat::identity(4, 4)).amax() < 1e-12);
        assert!(d.full.max_residual(8) < 1e-12);
        assert!((d.full.evaluate(1.5).unwrap().entries() - Mat::identity(4, 4)).amax() < 1e-12);
        assert!(defect_form(&d).matrix().amax() < 1e-12);
        assert!((reflected_half(&h).end() - Mat::identity(4, 4)).amax() < 1e-12);
    }

    #[test]
    fn quarter_turn_doubles_to_half_turn() {
        let d = double_path(&quarter());
        assert!((d.monodromy.entries() + Mat::identity(2, 2)).amax() < 1e-12);
        for t in [0.3, 1.0, 1.4, 2.0] {
            let f = d.full.evaluate(t).unwrap();
            assert!((f.entries() - rotation(1, PI * t / 2.0)).amax() < 1e-12);
        }
        let minus = reflected_half(&quarter());
        assert!((minus.evaluate(0.6).unwrap().entries() - rotation(1, 0.3 * PI)).amax() < 1e-12);
        let full_turn = HalfPathData::standard(SymplecticPathSpec::rotation(1, PI, 1.0)).unwrap();
        assert!((full_turn.monodromy() - Mat::identity(2, 2)).amax() < 1e-12);
    }

    #[test]
    fn defect_form_of_minus_identity_is_hyperbolic() {
        let q = defect_form(&double_path(&quarter()));
        let expected = Mat::from_row_slice(2, 2, &[0.0, -2.0, -2.0, 0.0]);
        assert!((q.matrix() - expected).amax() < 1e-12);
        assert_eq!(q.signature(1e-9).value(), 0);
    }

    #[test]
    fn theorem_on_the_quarter_turn() {
        let r = verify_index_theorem(&quarter(), &opts()).unwrap();
        assert_eq!(r.mu_plus, HalfInt::from_twice(1));
        assert_eq!(r.mu_minus, HalfInt::from_twice(1));
        assert_eq!(r.mu_loop, HalfInt::from_int(1));
        assert_eq!(r.q_signature, 0);
        assert!(r.pass());
        let full_turn = HalfPathData::standard(SymplecticPathSpec::rotation(1, PI, 1.0)).unwrap();
        assert!(matches!(verify_index_theorem(&full_turn, &opts()), Err(Error::Nondegeneracy(_))));
        assert!(verify_reflection(&quarter(), &opts()).unwrap().holds());
    }

    #[test]
    fn reflected_endpoint_identity() {
        let mut rng = trial_rng(3, "reflect", 0);
        let s = random_symmetric(2, 1.0, &mut rng);
        let space = SympSpace::standard(1);
        let path = SymplecticPathSpec::new(&space, vec![(Mat::identity(2, 2) * (PI / 2.0) + s, 1.0)], None).unwrap();
        let h = HalfPathData::standard(path).unwrap();
        let c = h.involution().entries();
        let f1 = SymplecticMatrix::new(h.half().end().clone(), &space, 1e-9).unwrap();
        let minus = reflected_half(&h);
        assert!((minus.end() - c * f1.inverse().entries() * c).amax() < 1e-10);
    }

    #[test]
    fn random_doubles_are_symmetric() {
        for trial in 0..10 {
            let mut rng = trial_rng(11, "double", trial);
            let n = 1 + (trial as usize % 3);
            let h = HalfPathData::standard(random_half_path(n, &mut rng)).unwrap();
            let d = double_path(&h);
            assert!(d.symmetry_residual(64) < 1e-9);
            assert!(d.involution_residual() < 1e-9);
            assert!(QuadraticForm::asymmetry(&defect_bilinear(&d)) < 1e-9);
            let twice = HalfPathData::standard(reflected_half(&HalfPathData::standard(reflected_half(&h)).unwrap()))
                .unwrap();
            for t in [0.0, 0.37, 1.0] {
                let a = twice.half().evaluate(t).unwrap();
                let b = h.half().evaluate(t).unwrap();
                assert!((a.entries() - b.entries()).amax() < 1e-9);
            }
        }
    }

    #[test]
    fn diagonal_of_the_quarter_turn() {
        let phi = SymplecticPathSpec::rotation(1, PI / 2.0, 2.0);
        let psi = diagonal_double(&phi).unwrap();
        assert!(psi.symmetry_residual(64) < 1e-9);
        let expected = crate::symlin::block_diag(&rotation(1, PI * 0.6 / 2.0), &rotation(1, PI * 1.4 / 2.0 - PI));
        assert!((psi.full.evaluate(0.6).unwrap().entries() - expected).amax() < 1e-12);
        let r = verify_diagonal(&phi, &opts()).unwrap();
        assert_eq!(r.cz_factor, HalfInt::from_int(1));
        assert_eq!(r.defect.mu_loop, HalfInt::from_int(2));
        assert!(r.pass(), "{r:?}");
        let loop_ = SymplecticPathSpec::rotation(1, PI, 2.0);
        assert!(matches!(verify_diagonal(&loop_, &opts()), Err(Error::Nondegeneracy(Nondegeneracy::Monodromy))));
    }

    #[test]
    fn diagonal_half_doubles_back_to_psi() {
        let mut rng = trial_rng(5, "diag", 0);
        let phi = random_diagonal_phi(1, &mut rng);
        let psi = diagonal_double(&phi).unwrap();
        let again = double_path(&diagonal_half(&phi).unwrap());
        for t in [0.0, 0.5, 1.0, 1.3, 2.0] {
            let a = psi.full.evaluate(t).unwrap();
            let b = again.full.evaluate(t).unwrap();
            assert!((a.entries() - b.entries()).amax() < 1e-9);
        }
    }

    #[test]
    fn theorem_on_random_half_paths() {
        let mut stats = [0usize; 3];
        for trial in 0..60 {
            let mut rng = trial_rng(0xC0FFEE, "theorem-unit", trial);
            let n = 1 + (trial as usize % 3);
            let h = HalfPathData::standard(random_half_path(n, &mut rng)).unwrap();
            match verify_index_theorem(&h, &opts()) {
                Ok(r) if r.pass() => stats[0] += 1,
                Ok(r) => panic!("defect on trial {trial}: {r:?}"),
                Err(_) => stats[2] += 1,
            }
        }
        assert!(stats[0] >= 45, "{stats:?}");
    }
}
