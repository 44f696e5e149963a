//! Conley–Zehnder indices (Lagrangian and periodic flavors) and the Hörmander index.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::halfint::HalfInt;
use crate::maslov::{maslov_index_report, Crossing, CrossingOptions, LagrangianPath, SymplecticPathSpec};
use crate::random::random_lagrangian;
use crate::symlin::{
    lagrangian_complement, principal_sines, signature, LagrangianFrame, Mat, QuadraticForm, SympSpace,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Lagrangian,
    Periodic,
}

impl std::fmt::Display for Flavor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Flavor::Lagrangian => "lagrangian",
            Flavor::Periodic => "periodic",
        })
    }
}

impl std::str::FromStr for Flavor {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "lagrangian" => Ok(Flavor::Lagrangian),
            "periodic" => Ok(Flavor::Periodic),
            other => Err(format!("unknown flavor `{other}`")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct IndexReport {
    pub value: HalfInt,
    pub crossings: Vec<Crossing>,
    pub flavor: Flavor,
}

impl IndexReport {
    /// The crossing sum recomputed from the listed crossings.
    pub fn recomputed(&self) -> HalfInt {
        self.crossings.iter().map(Crossing::contribution).sum()
    }
}

/// `μ(F(t)·L, L)`, the boundary flavor, with `L = R^n` in [`cz_lagrangian`].
pub fn cz_lagrangian_against(f: &SymplecticPathSpec, l: &LagrangianFrame, opts: &CrossingOptions) -> Result<IndexReport> {
    let path = LagrangianPath::new(f.clone(), l.clone())?;
    let (value, crossings) = maslov_index_report(&path, l, opts)?;
    Ok(IndexReport { value, crossings, flavor: Flavor::Lagrangian })
}

pub fn cz_lagrangian(f: &SymplecticPathSpec, opts: &CrossingOptions) -> Result<IndexReport> {
    cz_lagrangian_against(f, &f.space().reference_lagrangian(), opts)
}

/// The path `(F(t), 1)` on `V ⊕ (-V)`.
pub fn graph_path(f: &SymplecticPathSpec) -> SymplecticPathSpec {
    let still = SymplecticPathSpec::constant(&f.space().negated(), f.total_duration(), None);
    f.direct_sum(&still).expect("durations agree by construction")
}

/// Whether `1 - F(T)` is singular at the intersection tolerance.
pub fn has_unit_eigenvalue(f: &Mat, opts: &CrossingOptions) -> bool {
    let d = f.nrows();
    let m = Mat::identity(d, d) - f;
    let scale = f.amax().max(1.0);
    m.svd(false, false).singular_values.min() < opts.intersection_tol() * scale
}

/// `μ((F(t), 1)△, △)`. With `demand_nondegenerate`, a unit eigenvalue of `F(T)` is an error.
pub fn cz_periodic(f: &SymplecticPathSpec, demand_nondegenerate: bool, opts: &CrossingOptions) -> Result<IndexReport> {
    if demand_nondegenerate && has_unit_eigenvalue(f.end(), opts) {
        return Err(Error::DegenerateEndpoint);
    }
    let diag = LagrangianFrame::diagonal(f.space());
    let path = LagrangianPath::new(graph_path(f), diag.clone())?;
    let (value, crossings) = maslov_index_report(&path, &diag, opts)?;
    Ok(IndexReport { value, crossings, flavor: Flavor::Periodic })
}

const AUXILIARY_ATTEMPTS: usize = 32;
const AUXILIARY_MARGIN: f64 = 1e-3;

fn min_sine(a: &LagrangianFrame, b: &LagrangianFrame) -> f64 {
    principal_sines(a.space(), a.columns(), b.columns()).0[0]
}

fn check_same_space(frames: &[&LagrangianFrame]) -> Result<()> {
    let space = frames[0].space();
    for f in frames {
        if f.space() != space {
            return Err(Error::DimensionMismatch { expected: space.dim(), found: f.space().dim() });
        }
    }
    Ok(())
}

/// Symplectic basis `G = [E | F']` with `span F' = T` and `span E` a complement, so `GᵀΩG = J₀`.
fn chart_basis(t: &LagrangianFrame) -> Option<Mat> {
    let space = t.space();
    let omega = space.form_matrix();
    let e = lagrangian_complement(t).columns().clone();
    let ft = t.columns();
    let pairing = e.transpose() * omega * ft;
    let fp = ft * pairing.try_inverse()?;
    let n = space.dim_half();
    let mut g = Mat::zeros(space.dim(), 2 * n);
    g.view_mut((0, 0), e.shape()).copy_from(&e);
    g.view_mut((0, n), fp.shape()).copy_from(&fp);
    Some(g)
}

/// `Z` with `G⁻¹·span(x) = graph(Z)`; requires `x` transverse to the vertical `span F'`.
fn graph_coordinates(g_inv: &Mat, x: &Mat, n: usize) -> Option<Mat> {
    let local = g_inv * x;
    let p = local.rows(0, n).into_owned();
    let q = local.rows(n, n).into_owned();
    let z = q * p.try_inverse()?;
    Some((&z + z.transpose()) * 0.5)
}

/// The straight chart path from `C` to `D`: one nilpotent segment in coordinates where a
/// Lagrangian `T` transverse to every input is vertical.
fn chart_path(c: &LagrangianFrame, d: &LagrangianFrame, t: &LagrangianFrame) -> Option<LagrangianPath> {
    let space = c.space();
    let n = space.dim_half();
    let g = chart_basis(t)?;
    let g_inv = g.clone().try_inverse()?;
    let zc = graph_coordinates(&g_inv, c.columns(), n)?;
    let zd = graph_coordinates(&g_inv, d.columns(), n)?;
    let mut nil = Mat::zeros(2 * n, 2 * n);
    nil.view_mut((n, 0), (n, n)).copy_from(&(zd - zc));
    let hamiltonian = &g * nil * &g_inv;
    let generator = space.generator_of(&hamiltonian);
    let carrier = SymplecticPathSpec::single(space, generator, 1.0).ok()?;
    LagrangianPath::new(carrier, c.clone()).ok()
}

/// `μ(Λ, B) - μ(Λ, A)` along a given path `Λ`.
pub fn hormander_along(
    a: &LagrangianFrame,
    b: &LagrangianFrame,
    path: &LagrangianPath,
    opts: &CrossingOptions,
) -> Result<HalfInt> {
    let (mb, _) = maslov_index_report(path, b, opts)?;
    let (ma, _) = maslov_index_report(path, a, opts)?;
    Ok(mb - ma)
}

/// The Hörmander index `s(A, B; C, D) = μ(Λ, B) - μ(Λ, A)` for a path `Λ` from `C` to `D`.
///
/// Auxiliary Lagrangians are drawn from `rng` until one is transverse to all four inputs and
/// yields regular crossings.
pub fn hormander<R: Rng + ?Sized>(
    a: &LagrangianFrame,
    b: &LagrangianFrame,
    c: &LagrangianFrame,
    d: &LagrangianFrame,
    opts: &CrossingOptions,
    rng: &mut R,
) -> Result<HalfInt> {
    check_same_space(&[a, b, c, d])?;
    let tol = opts.intersection_tol();
    if c.same_span(d, tol) || a.same_span(b, tol) {
        return Ok(HalfInt::from_int(0));
    }
    let space: &SympSpace = a.space();
    for _ in 0..AUXILIARY_ATTEMPTS {
        let t = random_lagrangian(space, rng);
        if [a, b, c, d].iter().any(|x| min_sine(&t, x) < AUXILIARY_MARGIN) {
            continue;
        }
        let Some(path) = chart_path(c, d, &t) else { continue };
        match hormander_along(a, b, &path, opts) {
            Ok(v) => return Ok(v),
            Err(Error::IrregularCrossing { .. } | Error::Unresolved { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::AuxiliaryNotFound { attempts: AUXILIARY_ATTEMPTS })
}

/// The form `Q'(v) = ω(v, f(v))` on `K`, where `L'` is the graph of `f : K → L`.
pub fn hormander_form(l: &LagrangianFrame, k: &LagrangianFrame, lp: &LagrangianFrame, tol: f64) -> Result<QuadraticForm> {
    check_same_space(&[l, k, lp])?;
    for (x, y) in [(l, k), (k, lp), (l, lp)] {
        if min_sine(x, y) < tol {
            return Err(Error::Transversality("inputs must be pairwise transverse"));
        }
    }
    let space = l.space();
    let n = space.dim_half();
    let (xl, xk) = (l.columns(), k.columns());
    let mut split = Mat::zeros(space.dim(), 2 * n);
    split.view_mut((0, 0), xl.shape()).copy_from(xl);
    split.view_mut((0, n), xk.shape()).copy_from(xk);
    let coef = split.lu().solve(lp.columns()).ok_or(Error::Transversality("L and K are not transverse"))?;
    let a = coef.rows(0, n).into_owned();
    let b = coef.rows(n, n).into_owned();
    let b_inv = b.try_inverse().ok_or(Error::Transversality("L' is not transverse to L"))?;
    let q = xk.transpose() * space.form_matrix() * xl * a * b_inv;
    Ok(QuadraticForm::with_basis(q, xk.clone()))
}

/// `s(L, K; K, L') = ½·sign Q'`.
pub fn hormander_signature(l: &LagrangianFrame, k: &LagrangianFrame, lp: &LagrangianFrame, opts: &CrossingOptions) -> Result<HalfInt> {
    let q = hormander_form(l, k, lp, opts.intersection_tol())?;
    let sig = signature(&q, opts.tol);
    if sig.is_degenerate() {
        return Err(Error::Degenerate { zero_count: sig.zero });
    }
    Ok(HalfInt::from_twice(sig.value()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::trial_rng;
    use crate::symlin::{graph_lagrangian, rotated_line, rotation, SymplecticMatrix};
    use std::f64::consts::PI;

    fn opts() -> CrossingOptions {
        CrossingOptions::default()
    }

    #[test]
    fn lagrangian_flavor_on_rotations() {
        let id = SymplecticPathSpec::constant(&SympSpace::standard(1), 1.0, None);
        assert!(matches!(cz_lagrangian(&id, &opts()), Err(Error::IrregularCrossing { .. })));
        let r = cz_lagrangian(&SymplecticPathSpec::rotation(1, PI, 1.0), &opts()).unwrap();
        assert_eq!(r.value, HalfInt::from_int(1));
        assert_eq!(r.recomputed(), r.value);
        let r = cz_lagrangian(&SymplecticPathSpec::rotation(1, PI / 2.0, 1.0), &opts()).unwrap();
        assert_eq!(r.value, HalfInt::from_twice(1));
        assert_eq!(r.crossings.len(), 1);
    }

    #[test]
    fn periodic_flavor_on_rotations() {
        let r = cz_periodic(&SymplecticPathSpec::rotation(1, PI / 2.0, 2.0), true, &opts()).unwrap();
        assert_eq!(r.value, HalfInt::from_int(1));
        assert_eq!(r.crossings.len(), 1);
        assert_eq!(r.crossings[0].dimension(), 2);
        let r = cz_periodic(&SymplecticPathSpec::rotation(1, 2.0 * PI, 1.0), false, &opts()).unwrap();
        assert_eq!(r.value, HalfInt::from_int(2));
        for k in 1..=3 {
            let r = cz_periodic(&SymplecticPathSpec::rotation(1, 2.0 * PI, k as f64), false, &opts()).unwrap();
            assert_eq!(r.value, HalfInt::from_int(2 * k));
        }
        let loop_ = SymplecticPathSpec::rotation(1, 2.0 * PI, 1.0);
        assert!(matches!(cz_periodic(&loop_, true, &opts()), Err(Error::DegenerateEndpoint)));
    }

    #[test]
    fn hormander_trivial_cases() {
        let mut rng = trial_rng(7, "hormander", 0);
        let a = rotated_line(0.1);
        let b = rotated_line(1.2);
        let c = rotated_line(2.0);
        assert_eq!(hormander(&a, &b, &c, &c, &opts(), &mut rng).unwrap(), HalfInt::from_int(0));
        assert_eq!(hormander(&a, &a, &c, &rotated_line(2.9), &opts(), &mut rng).unwrap(), HalfInt::from_int(0));
    }

    #[test]
    fn hormander_matches_rotation_path() {
        let space = SympSpace::standard(1);
        let (a, b) = (space.reference_lagrangian(), space.imaginary_lagrangian());
        let (c, d) = (rotated_line(PI / 4.0), rotated_line(3.0 * PI / 4.0));
        let rot = LagrangianPath::new(SymplecticPathSpec::rotation(1, PI / 2.0, 1.0), c.clone()).unwrap();
        let brute = hormander_along(&a, &b, &rot, &opts()).unwrap();
        assert_eq!(brute, HalfInt::from_int(1));
        let mut rng = trial_rng(7, "hormander", 1);
        assert_eq!(hormander(&a, &b, &c, &d, &opts(), &mut rng).unwrap(), brute);
    }

    #[test]
    fn signature_formula_on_a_positive_form() {
        let v = SympSpace::standard(1);
        let l = v.reference_lagrangian().direct_sum(&v.negated().reference_lagrangian());
        let quarter = SymplecticMatrix::new(rotation(1, PI / 2.0), &v, 1e-12).unwrap();
        let k = graph_lagrangian(&quarter).unwrap();
        let m = k.columns().transpose() * l.space().form_matrix() * l.columns();
        let a = m.try_inverse().unwrap();
        let lp = LagrangianFrame::new(l.columns() * a + k.columns(), l.space(), 1e-9).unwrap();
        let q = hormander_form(&l, &k, &lp, 1e-6).unwrap();
        assert!((q.matrix() - Mat::identity(2, 2)).amax() < 1e-12);
        assert_eq!(hormander_signature(&l, &k, &lp, &opts()).unwrap(), HalfInt::from_int(1));
        let mut rng = trial_rng(7, "hormander", 2);
        assert_eq!(hormander(&l, &k, &k, &lp, &opts(), &mut rng).unwrap(), HalfInt::from_int(1));
        assert!(matches!(hormander_signature(&l, &k, &k, &opts()), Err(Error::Transversality(_))));
    }
}
