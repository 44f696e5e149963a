use nalgebra::DVector;

use super::path::{LagrangianPath, Side};
use crate::error::{Error, Result};
use crate::halfint::HalfInt;
use crate::symlin::{lagrangian_complement, principal_sines, LagrangianFrame, Mat, QuadraticForm, Signature, SympSpace};

/// Numerical knobs of the crossing search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingOptions {
    /// Signature tolerance for crossing forms; intersections are decided at `√tol`.
    pub tol: f64,
    /// Number of uniform grid cells scanned for sign changes and dips.
    pub grid: usize,
}

impl Default for CrossingOptions {
    fn default() -> Self {
        CrossingOptions { tol: crate::symlin::DEFAULT_TOL, grid: 4096 }
    }
}

impl CrossingOptions {
    pub fn intersection_tol(&self) -> f64 {
        self.tol.sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum CrossingPosition {
    Start,
    Interior,
    /// At a segment joint, where the path is only one-sidedly smooth.
    Joint,
    End,
}

/// A time where the path meets the reference, with its crossing form.
#[derive(Debug, Clone, PartialEq)]
pub struct Crossing {
    pub time: f64,
    pub position: CrossingPosition,
    /// Orthonormal basis of `Λ(t) ∩ V`.
    pub intersection_basis: Mat,
    /// The crossing form (the incoming one at a joint).
    pub form: QuadraticForm,
    /// The outgoing crossing form at a joint.
    pub form_after: Option<QuadraticForm>,
    pub signature: Signature,
    pub signature_after: Option<Signature>,
    pub regular: bool,
}

impl Crossing {
    pub fn dimension(&self) -> usize {
        self.intersection_basis.ncols()
    }

    /// Twice the contribution to the Robbin–Salamon index.
    pub fn twice_contribution(&self) -> i64 {
        let s = self.signature.value();
        match self.position {
            CrossingPosition::Start | CrossingPosition::End => s,
            CrossingPosition::Interior => 2 * s,
            CrossingPosition::Joint => s + self.signature_after.map_or(s, |a| a.value()),
        }
    }

    pub fn contribution(&self) -> HalfInt {
        HalfInt::from_twice(self.twice_contribution())
    }
}

/// The second argument of an index: a fixed Lagrangian or another moving one.
#[derive(Debug, Clone, Copy)]
enum Reference<'a> {
    Fixed(&'a LagrangianFrame),
    Moving(&'a LagrangianPath),
}

struct Scanner<'a> {
    path: &'a LagrangianPath,
    reference: Reference<'a>,
    opts: CrossingOptions,
    total: f64,
}

fn gram_sqrt_det(x: &Mat) -> f64 {
    (x.transpose() * x).determinant().abs().sqrt()
}

fn normalized_det(x: &Mat, v: &Mat) -> f64 {
    let n = x.ncols();
    let mut cat = Mat::zeros(x.nrows(), 2 * n);
    cat.view_mut((0, 0), x.shape()).copy_from(x);
    cat.view_mut((0, n), v.shape()).copy_from(v);
    cat.determinant() / (gram_sqrt_det(x) * gram_sqrt_det(v))
}

impl<'a> Scanner<'a> {
    fn new(path: &'a LagrangianPath, reference: Reference<'a>, opts: CrossingOptions) -> Result<Self> {
        let space = path.space();
        match reference {
            Reference::Fixed(v) => {
                if v.space() != space {
                    return Err(Error::DimensionMismatch { expected: space.dim(), found: v.space().dim() });
                }
            }
            Reference::Moving(q) => {
                if q.space() != space {
                    return Err(Error::DimensionMismatch { expected: space.dim(), found: q.space().dim() });
                }
                let (a, b) = (path.total_duration(), q.total_duration());
                if (a - b).abs() > 1e-12 * a.max(1.0) {
                    return Err(Error::InvalidPath(format!("paired paths have durations {a} and {b}")));
                }
            }
        }
        if opts.grid < 2 {
            return Err(Error::InvalidPath("crossing grid needs at least 2 cells".into()));
        }
        Ok(Scanner { path, reference, opts, total: path.total_duration() })
    }

    fn space(&self) -> &SympSpace {
        self.path.space()
    }

    fn reference_frame(&self, t: f64) -> Mat {
        match self.reference {
            Reference::Fixed(v) => v.columns().clone(),
            Reference::Moving(q) => q.raw_frame_at(t),
        }
    }

    fn det_at(&self, t: f64) -> f64 {
        normalized_det(&self.path.raw_frame_at(t), &self.reference_frame(t))
    }

    fn sines_at(&self, t: f64) -> (Vec<f64>, Mat) {
        principal_sines(self.space(), &self.path.raw_frame_at(t), &self.reference_frame(t))
    }

    fn min_sine(&self, t: f64) -> f64 {
        self.sines_at(t).0[0]
    }

    fn joints(&self) -> Vec<f64> {
        let mut j: Vec<f64> = self.path.carrier().joints().to_vec();
        if let Reference::Moving(q) = self.reference {
            j.extend_from_slice(q.carrier().joints());
        }
        j
    }

    /// `Γ(v) = ω(v, A₁v) - ω(v, A₂v) = vᵀ(S₁ - S₂)v` on the intersection basis.
    fn form_on(&self, basis: &Mat, t: f64, side: Side) -> QuadraticForm {
        let mut s = self.path.carrier().generator_at(t, side).clone();
        if let Reference::Moving(q) = self.reference {
            s -= q.carrier().generator_at(t, side);
        }
        QuadraticForm::with_basis(basis.transpose() * s * basis, basis.clone())
    }

    fn grid(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.opts.grid;
        let times: Vec<f64> = (0..=n).map(|i| self.total * i as f64 / n as f64).collect();
        let seed = self.path.seed().columns();
        let xs = self.path.carrier().sample(&times);
        let dets = match self.reference {
            Reference::Fixed(v) => xs.iter().map(|f| normalized_det(&(f * seed), v.columns())).collect(),
            Reference::Moving(q) => {
                let ys = q.carrier().sample(&times);
                let qseed = q.seed().columns();
                xs.iter().zip(&ys).map(|(f, g)| normalized_det(&(f * seed), &(g * qseed))).collect()
            }
        };
        (times, dets)
    }

    fn bisect(&self, mut lo: f64, mut hi: f64, mut dlo: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let dm = self.det_at(mid);
            if dm == 0.0 {
                return mid;
            }
            if (dm > 0.0) == (dlo > 0.0) {
                lo = mid;
                dlo = dm;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn golden_min(&self, mut a: f64, mut b: f64) -> f64 {
        const INV_PHI: f64 = 0.618_033_988_749_894_8;
        let mut c = b - INV_PHI * (b - a);
        let mut d = a + INV_PHI * (b - a);
        let mut fc = self.min_sine(c);
        let mut fd = self.min_sine(d);
        let stop = 1e-15 * self.total.max(1.0);
        for _ in 0..200 {
            if (b - a).abs() <= stop {
                break;
            }
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - INV_PHI * (b - a);
                fc = self.min_sine(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + INV_PHI * (b - a);
                fd = self.min_sine(d);
            }
        }
        let mid = 0.5 * (a + b);
        [a, b, mid].into_iter().min_by(|x, y| self.min_sine(*x).total_cmp(&self.min_sine(*y))).unwrap()
    }

    fn build(&self, time: f64, position: CrossingPosition) -> Option<Crossing> {
        let (sines, vecs) = self.sines_at(time);
        let thresh = self.opts.intersection_tol();
        let k = sines.iter().take_while(|&&s| s < thresh).count();
        if k == 0 {
            return None;
        }
        let basis = vecs.columns(0, k).into_owned();
        let tol = self.opts.tol;
        let (form, form_after) = match position {
            CrossingPosition::Start | CrossingPosition::Interior => (self.form_on(&basis, time, Side::After), None),
            CrossingPosition::End => (self.form_on(&basis, time, Side::Before), None),
            CrossingPosition::Joint => {
                (self.form_on(&basis, time, Side::Before), Some(self.form_on(&basis, time, Side::After)))
            }
        };
        let signature = form.signature(tol);
        let signature_after = form_after.as_ref().map(|f| f.signature(tol));
        let regular = !signature.is_degenerate() && signature_after.is_none_or(|s| !s.is_degenerate());
        Some(Crossing { time, position, intersection_basis: basis, form, form_after, signature, signature_after, regular })
    }

    fn scan(&self) -> Result<Vec<Crossing>> {
        let total = self.total;
        let thresh = self.opts.intersection_tol();
        let merge_eps = 1e-9 * total.max(1.0);

        let start = self.build(0.0, CrossingPosition::Start);
        let end = self.build(total, CrossingPosition::End);
        for c in start.iter().chain(end.iter()) {
            if !c.regular {
                return Err(Error::IrregularCrossing { time: c.time });
            }
        }

        let (times, dets) = self.grid();
        let n = self.opts.grid;
        let h = total / n as f64;

        // (time, detected by a sign change)
        let mut candidates: Vec<(f64, bool)> = Vec::new();
        for i in 0..n {
            if dets[i] * dets[i + 1] < 0.0 {
                candidates.push((self.bisect(times[i], times[i + 1], dets[i]), true));
            }
        }
        let abs: Vec<f64> = dets.iter().map(|d| d.abs()).collect();
        for i in 0..=n {
            let left_ok = i == 0 || abs[i] <= abs[i - 1];
            let right_ok = i == n || abs[i] <= abs[i + 1];
            if !(left_ok && right_ok) || abs[i] >= 1e-2 {
                continue;
            }
            if (i == 0 && start.is_some()) || (i == n && end.is_some()) {
                continue;
            }
            let lo = times[i.saturating_sub(1)];
            let hi = times[(i + 1).min(n)];
            let t = self.golden_min(lo, hi);
            if self.min_sine(t) < thresh {
                candidates.push((t, false));
            }
        }
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut merged: Vec<(f64, bool)> = Vec::new();
        for (t, sc) in candidates {
            if start.is_some() && t <= merge_eps || end.is_some() && t >= total - merge_eps {
                continue;
            }
            match merged.last_mut() {
                Some(last) if (t - last.0).abs() <= merge_eps => {
                    // prefer the bisection root, it is exact to rounding
                    if sc && !last.1 {
                        *last = (t, sc);
                    }
                }
                _ => merged.push((t, sc)),
            }
        }

        let joints = self.joints();
        let mut interior = Vec::new();
        for (t, from_sign_change) in &merged {
            let joint = joints.iter().copied().find(|j| (j - t).abs() <= merge_eps);
            let (time, position) = match joint {
                Some(j) => (j, CrossingPosition::Joint),
                None => (*t, CrossingPosition::Interior),
            };
            let Some(c) = self.build(time, position) else {
                if *from_sign_change {
                    return Err(Error::Unresolved { time });
                }
                continue;
            };
            if !c.regular {
                return Err(Error::IrregularCrossing { time });
            }
            if position == CrossingPosition::Interior {
                let delta = (h / 8.0).min(time).min(total - time);
                let flips = self.det_at(time - delta) * self.det_at(time + delta) < 0.0;
                if flips != (c.dimension() % 2 == 1) {
                    return Err(Error::Unresolved { time });
                }
            }
            interior.push(c);
        }
        for w in interior.windows(2) {
            let cell_a = (w[0].time / h).floor();
            let cell_b = (w[1].time / h).floor();
            if cell_a == cell_b && (w[1].time - w[0].time) < h {
                let sc = |t: f64| merged.iter().any(|(m, s)| *s && (m - t).abs() <= merge_eps);
                if !(sc(w[0].time) && sc(w[1].time)) {
                    return Err(Error::Unresolved { time: w[1].time });
                }
            }
        }

        let mut out = Vec::with_capacity(interior.len() + 2);
        out.extend(start);
        out.extend(interior);
        out.extend(end);
        Ok(out)
    }
}

/// All crossings of `Λ(t)` with the fixed Lagrangian `v`, endpoints included and marked.
pub fn find_crossings(path: &LagrangianPath, v: &LagrangianFrame, opts: &CrossingOptions) -> Result<Vec<Crossing>> {
    Scanner::new(path, Reference::Fixed(v), *opts)?.scan()
}

/// Crossings of the pair `(Λ₁(t), Λ₂(t))` with relative crossing forms.
pub fn find_pair_crossings(
    path1: &LagrangianPath,
    path2: &LagrangianPath,
    opts: &CrossingOptions,
) -> Result<Vec<Crossing>> {
    Scanner::new(path1, Reference::Moving(path2), *opts)?.scan()
}

fn index_of(crossings: &[Crossing]) -> HalfInt {
    crossings.iter().map(Crossing::contribution).sum()
}

/// The Robbin–Salamon index `μ(Λ, V)`.
pub fn maslov_index(path: &LagrangianPath, v: &LagrangianFrame, opts: &CrossingOptions) -> Result<HalfInt> {
    Ok(index_of(&find_crossings(path, v, opts)?))
}

/// The index together with the crossings it was summed from.
pub fn maslov_index_report(
    path: &LagrangianPath,
    v: &LagrangianFrame,
    opts: &CrossingOptions,
) -> Result<(HalfInt, Vec<Crossing>)> {
    let crossings = find_crossings(path, v, opts)?;
    Ok((index_of(&crossings), crossings))
}

/// The Robbin–Salamon index of a pair of Lagrangian paths.
pub fn maslov_index_pair(path1: &LagrangianPath, path2: &LagrangianPath, opts: &CrossingOptions) -> Result<HalfInt> {
    Ok(index_of(&find_pair_crossings(path1, path2, opts)?))
}

/// The crossing form at `t0` computed with the canonical complement `Ω·Λ(t0)`.
pub fn crossing_form(path: &LagrangianPath, v: &LagrangianFrame, t0: f64, opts: &CrossingOptions) -> Result<QuadraticForm> {
    let lam = path.frame_at(t0)?;
    let w = lagrangian_complement(&lam);
    crossing_form_with_complement(path, v, t0, &w, Side::After, opts)
}

/// `Γ(v) = d/dt ω(v, w(t))` where `v + w(t) ∈ Λ(t)` and `w(t)` lies in the complement `w`.
///
/// The velocity `A·v` is split along `Λ(t0) ⊕ W`; only the `W` part pairs nontrivially with `v`.
pub fn crossing_form_with_complement(
    path: &LagrangianPath,
    v: &LagrangianFrame,
    t0: f64,
    complement: &LagrangianFrame,
    side: Side,
    opts: &CrossingOptions,
) -> Result<QuadraticForm> {
    let space = path.space();
    let lam = path.frame_at(t0)?;
    let (sines, vecs) = principal_sines(space, lam.columns(), v.columns());
    let k = sines.iter().take_while(|&&s| s < opts.intersection_tol()).count();
    if k == 0 {
        return Err(Error::EmptyIntersection { time: t0 });
    }
    let basis = vecs.columns(0, k).into_owned();
    let a = path.carrier().hamiltonian_at(t0, side);
    let n = space.dim_half();
    let mut split = Mat::zeros(space.dim(), 2 * n);
    split.view_mut((0, 0), lam.columns().shape()).copy_from(lam.columns());
    split.view_mut((0, n), complement.columns().shape()).copy_from(complement.columns());
    let lu = split.lu();
    let mut g = Mat::zeros(k, k);
    for j in 0..k {
        let vel: DVector<f64> = a * basis.column(j);
        let coef = lu.solve(&vel).ok_or(Error::Transversality("complement is not transverse to Λ(t0)"))?;
        let w: DVector<f64> = complement.columns() * coef.rows(n, n);
        for i in 0..k {
            g[(i, j)] = space.omega(&basis.column(i).into_owned(), &w);
        }
    }
    Ok(QuadraticForm::with_basis(g, basis))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maslov::path::SymplecticPathSpec;
    use crate::symlin::rotated_line;
    use std::f64::consts::PI;

    fn line_path(speed: f64, dur: f64) -> LagrangianPath {
        LagrangianPath::from_reference(SymplecticPathSpec::rotation(1, speed, dur))
    }

    fn real_line() -> LagrangianFrame {
        SympSpace::standard(1).reference_lagrangian()
    }

    #[test]
    fn constant_transverse_path_has_no_crossings() {
        let space = SympSpace::standard(1);
        let path = LagrangianPath::from_reference(SymplecticPathSpec::constant(&space, 1.0, None));
        let v = space.imaginary_lagrangian();
        let opts = CrossingOptions::default();
        assert!(find_crossings(&path, &v, &opts).unwrap().is_empty());
        assert_eq!(maslov_index(&path, &v, &opts).unwrap(), HalfInt::from_int(0));
    }

    #[test]
    fn half_turn_crosses_at_both_ends() {
        let opts = CrossingOptions::default();
        let cs = find_crossings(&line_path(PI, 1.0), &real_line(), &opts).unwrap();
        assert_eq!(cs.len(), 2);
        assert_eq!(cs[0].position, CrossingPosition::Start);
        assert_eq!(cs[1].position, CrossingPosition::End);
        assert!(cs.iter().all(|c| c.regular && c.dimension() == 1));
        assert_eq!(maslov_index(&line_path(PI, 1.0), &real_line(), &opts).unwrap(), HalfInt::from_int(1));
    }

    #[test]
    fn full_turn_adds_an_interior_crossing() {
        let opts = CrossingOptions::default();
        let cs = find_crossings(&line_path(PI, 2.0), &real_line(), &opts).unwrap();
        let times: Vec<f64> = cs.iter().map(|c| c.time).collect();
        assert_eq!(times.len(), 3);
        assert!((times[1] - 1.0).abs() < 1e-10);
        assert_eq!(cs[1].position, CrossingPosition::Interior);
        assert_eq!(maslov_index(&line_path(PI, 2.0), &real_line(), &opts).unwrap(), HalfInt::from_int(2));
    }

    #[test]
    fn crossing_form_of_rotation() {
        let opts = CrossingOptions::default();
        let g = crossing_form(&line_path(PI, 1.0), &real_line(), 0.0, &opts).unwrap();
        assert!((g.matrix()[(0, 0)] - PI).abs() < 1e-12);
        let g = crossing_form(&line_path(-PI, 1.0), &real_line(), 0.0, &opts).unwrap();
        assert!((g.matrix()[(0, 0)] + PI).abs() < 1e-12);
        assert!(crossing_form(&line_path(PI, 1.0), &real_line(), 0.5, &opts).is_err());
    }

    #[test]
    fn constant_full_intersection_is_irregular() {
        let space = SympSpace::standard(1);
        let path = LagrangianPath::from_reference(SymplecticPathSpec::constant(&space, 1.0, None));
        let opts = CrossingOptions::default();
        let g = crossing_form(&path, &real_line(), 0.3, &opts).unwrap();
        assert!(g.signature(opts.tol).is_degenerate());
        assert!(matches!(maslov_index(&path, &real_line(), &opts), Err(Error::IrregularCrossing { .. })));
    }

    #[test]
    fn pair_index_of_counter_rotating_lines() {
        let opts = CrossingOptions::default();
        let space = SympSpace::standard(1);
        let p1 = line_path(PI, 1.0);
        let p2 = LagrangianPath::new(SymplecticPathSpec::rotation(1, -PI, 1.0), space.imaginary_lagrangian()).unwrap();
        let cs = find_pair_crossings(&p1, &p2, &opts).unwrap();
        let times: Vec<f64> = cs.iter().map(|c| c.time).collect();
        assert_eq!(times.len(), 2);
        assert!((times[0] - 0.25).abs() < 1e-10 && (times[1] - 0.75).abs() < 1e-10);
        assert!(cs.iter().all(|c| (c.form.matrix()[(0, 0)] - 2.0 * PI).abs() < 1e-9));
        assert_eq!(maslov_index_pair(&p1, &p2, &opts).unwrap(), HalfInt::from_int(2));
    }

    #[test]
    fn pair_with_constant_reduces_to_fixed_reference() {
        let opts = CrossingOptions::default();
        let space = SympSpace::standard(1);
        let v = rotated_line(0.3);
        let p2 = LagrangianPath::new(SymplecticPathSpec::constant(&space, 1.7, None), v.clone()).unwrap();
        let p1 = line_path(2.1, 1.7);
        assert_eq!(maslov_index_pair(&p1, &p2, &opts).unwrap(), maslov_index(&p1, &v, &opts).unwrap());
        assert!(matches!(maslov_index_pair(&p1, &p1, &opts), Err(Error::IrregularCrossing { .. })));
    }

    #[test]
    fn even_dimensional_touch_is_found() {
        // e^{iπt}·ℝ² meets ℝ² in dimension 2 at t = 1, with no determinant sign change
        let opts = CrossingOptions::default();
        let path = LagrangianPath::from_reference(SymplecticPathSpec::rotation(2, PI, 1.5));
        let v = SympSpace::standard(2).reference_lagrangian();
        let cs = find_crossings(&path, &v, &opts).unwrap();
        assert_eq!(cs.len(), 2);
        assert_eq!(cs[1].dimension(), 2);
        assert!((cs[1].time - 1.0).abs() < 1e-9);
        assert_eq!(maslov_index(&path, &v, &opts).unwrap(), HalfInt::from_int(3));
    }

    #[test]
    fn crossing_at_a_joint_uses_both_sides() {
        let space = SympSpace::standard(1);
        let half = Mat::identity(2, 2) * PI;
        let path = SymplecticPathSpec::new(&space, vec![(half.clone() * 2.0, 0.5), (half * 0.5, 1.0)], None).unwrap();
        let opts = CrossingOptions::default();
        let cs = find_crossings(&LagrangianPath::from_reference(path), &real_line(), &opts).unwrap();
        let joint = cs.iter().find(|c| c.position == CrossingPosition::Joint).expect("joint crossing");
        assert!((joint.time - 0.5).abs() < 1e-12);
        assert_eq!(joint.twice_contribution(), 2);
    }

    #[test]
    fn complement_choice_does_not_change_the_form() {
        let opts = CrossingOptions::default();
        let space = SympSpace::standard(1);
        let path = line_path(1.3, 1.0);
        let other = LagrangianFrame::new(Mat::from_row_slice(2, 1, &[0.7, 1.0]), &space, 1e-12).unwrap();
        let a = crossing_form(&path, &real_line(), 0.0, &opts).unwrap();
        let b = crossing_form_with_complement(&path, &real_line(), 0.0, &other, Side::After, &opts).unwrap();
        assert!((a.matrix() - b.matrix()).abs().max() < 1e-12);
    }
}
