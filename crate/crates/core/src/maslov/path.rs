use crate::error::{Error, Result};
use crate::symlin::{block_diag, LagrangianFrame, Mat, SympSpace, SymplecticMatrix};

/// One exponential piece `exp(τ·Ω⁻¹S)` of a path.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    generator: Mat,
    hamiltonian: Mat,
    duration: f64,
}

impl Segment {
    pub fn generator(&self) -> &Mat {
        &self.generator
    }

    pub fn hamiltonian(&self) -> &Mat {
        &self.hamiltonian
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }
}

/// Which one-sided generator to use at a segment joint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Before,
    After,
}

/// A piecewise-exponential path of symplectic matrices:
/// `F(t) = exp((t - t_k)·Ω⁻¹S_k)·F(t_k)` on the `k`-th segment.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticPathSpec {
    space: SympSpace,
    segments: Vec<Segment>,
    knots: Vec<Mat>,
    times: Vec<f64>,
}

const SYMMETRY_TOL: f64 = 1e-10;

impl SymplecticPathSpec {
    pub fn new(space: &SympSpace, segments: Vec<(Mat, f64)>, start: Option<SymplecticMatrix>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidPath("a path needs at least one segment".into()));
        }
        let d = space.dim();
        let mut segs = Vec::with_capacity(segments.len());
        for (k, (s, dur)) in segments.into_iter().enumerate() {
            if s.nrows() != d || s.ncols() != d {
                return Err(Error::DimensionMismatch { expected: d, found: s.nrows() });
            }
            let scale = s.amax().max(1.0);
            let residual = (&s - s.transpose()).amax();
            if residual > SYMMETRY_TOL * scale {
                return Err(Error::NotSymmetric { segment: k, residual });
            }
            if !(dur.is_finite() && dur > 0.0) {
                return Err(Error::InvalidPath(format!("segment {k} has non-positive duration {dur}")));
            }
            let s = (&s + s.transpose()) * 0.5;
            let a = space.hamiltonian(&s);
            segs.push(Segment { generator: s, hamiltonian: a, duration: dur });
        }
        let start = match start {
            Some(m) => {
                if m.space() != space {
                    return Err(Error::DimensionMismatch { expected: d, found: m.space().dim() });
                }
                m.into_entries()
            }
            None => Mat::identity(d, d),
        };
        Ok(Self::assemble(space, segs, start))
    }

    fn assemble(space: &SympSpace, segments: Vec<Segment>, start: Mat) -> Self {
        let mut knots = Vec::with_capacity(segments.len() + 1);
        let mut times = Vec::with_capacity(segments.len() + 1);
        knots.push(start);
        times.push(0.0);
        for seg in &segments {
            let next = (&seg.hamiltonian * seg.duration).exp() * knots.last().unwrap();
            knots.push(next);
            times.push(times.last().unwrap() + seg.duration);
        }
        SymplecticPathSpec { space: space.clone(), segments, knots, times }
    }

    fn from_parts(space: &SympSpace, parts: Vec<(Mat, f64)>, start: Mat) -> Self {
        let segs = parts
            .into_iter()
            .map(|(s, dur)| {
                let s = (&s + s.transpose()) * 0.5;
                let a = space.hamiltonian(&s);
                Segment { generator: s, hamiltonian: a, duration: dur }
            })
            .collect();
        Self::assemble(space, segs, start)
    }

    /// A single segment with generator `S` on `[0, duration]`, starting at the identity.
    pub fn single(space: &SympSpace, generator: Mat, duration: f64) -> Result<Self> {
        Self::new(space, vec![(generator, duration)], None)
    }

    /// The constant path at `start` (identity if `None`).
    pub fn constant(space: &SympSpace, duration: f64, start: Option<&Mat>) -> Self {
        let d = space.dim();
        let start = start.cloned().unwrap_or_else(|| Mat::identity(d, d));
        Self::from_parts(space, vec![(Mat::zeros(d, d), duration)], start)
    }

    /// `e^{iωt}` on `(R^{2n}, ω₀)` over `[0, duration]`.
    pub fn rotation(n: usize, speed: f64, duration: f64) -> Self {
        let sp = SympSpace::standard(n);
        Self::from_parts(&sp, vec![(Mat::identity(2 * n, 2 * n) * speed, duration)], Mat::identity(2 * n, 2 * n))
    }

    pub fn space(&self) -> &SympSpace {
        &self.space
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn total_duration(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn start(&self) -> &Mat {
        &self.knots[0]
    }

    pub fn end(&self) -> &Mat {
        self.knots.last().unwrap()
    }

    /// Interior joint times.
    pub fn joints(&self) -> &[f64] {
        &self.times[1..self.times.len() - 1]
    }

    pub fn knot_times(&self) -> &[f64] {
        &self.times
    }

    pub fn evaluate(&self, t: f64) -> Result<SymplecticMatrix> {
        let total = self.total_duration();
        let slack = 1e-12 * total.max(1.0);
        if !(t >= -slack && t <= total + slack) {
            return Err(Error::OutOfRange { t, total });
        }
        Ok(SymplecticMatrix::new_unchecked(self.eval_raw(t), &self.space))
    }

    /// Segment index containing `t`; `side` breaks ties at joints.
    pub fn segment_index(&self, t: f64, side: Side) -> usize {
        let last = self.segments.len() - 1;
        let mut k = match self.times[1..].iter().position(|&tk| t < tk) {
            Some(k) => k,
            None => last,
        };
        if side == Side::Before && k > 0 && t <= self.times[k] {
            k -= 1;
        }
        k.min(last)
    }

    pub(crate) fn eval_raw(&self, t: f64) -> Mat {
        let t = t.clamp(0.0, self.total_duration());
        let k = self.segment_index(t, Side::After);
        let tau = t - self.times[k];
        if tau == 0.0 {
            return self.knots[k].clone();
        }
        (&self.segments[k].hamiltonian * tau).exp() * &self.knots[k]
    }

    /// `F` at sorted times, re-using one step exponential per segment on a uniform grid.
    pub(crate) fn sample(&self, times: &[f64]) -> Vec<Mat> {
        let mut out: Vec<Mat> = Vec::with_capacity(times.len());
        let mut cached: Option<(usize, f64, Mat)> = None;
        let mut prev: Option<(usize, f64)> = None;
        for &t in times {
            let t = t.clamp(0.0, self.total_duration());
            let k = self.segment_index(t, Side::After);
            let value = match prev {
                Some((pk, pt)) if pk == k => {
                    let dt = t - pt;
                    let step = match &cached {
                        Some((ck, cdt, m)) if *ck == k && (cdt - dt).abs() <= 1e-14 * self.total_duration() => m.clone(),
                        _ => {
                            let m = (&self.segments[k].hamiltonian * dt).exp();
                            cached = Some((k, dt, m.clone()));
                            m
                        }
                    };
                    step * out.last().unwrap()
                }
                _ => self.eval_raw(t),
            };
            out.push(value);
            prev = Some((k, t));
        }
        out
    }

    pub fn generator_at(&self, t: f64, side: Side) -> &Mat {
        &self.segments[self.segment_index(t, side)].generator
    }

    pub fn hamiltonian_at(&self, t: f64, side: Side) -> &Mat {
        &self.segments[self.segment_index(t, side)].hamiltonian
    }

    fn parts(&self) -> Vec<(Mat, f64)> {
        self.segments.iter().map(|s| (s.generator.clone(), s.duration)).collect()
    }

    /// `t ↦ F(T - t)`.
    pub fn reversed(&self) -> Self {
        let parts = self.segments.iter().rev().map(|s| (-&s.generator, s.duration)).collect();
        Self::from_parts(&self.space, parts, self.end().clone())
    }

    /// `t ↦ F(t / factor)` on `[0, factor·T]`.
    pub fn rescaled(&self, factor: f64) -> Self {
        assert!(factor > 0.0);
        let parts = self.segments.iter().map(|s| (&s.generator / factor, s.duration * factor)).collect();
        Self::from_parts(&self.space, parts, self.start().clone())
    }

    /// Rescale time so the total duration is `total`, keeping the path.
    pub fn normalized_to(&self, total: f64) -> Self {
        self.rescaled(total / self.total_duration())
    }

    /// Same generators with durations scaled to total `total` (changes the path).
    pub fn with_total_duration(&self, total: f64) -> Self {
        let f = total / self.total_duration();
        let parts = self.segments.iter().map(|s| (s.generator.clone(), s.duration * f)).collect();
        Self::from_parts(&self.space, parts, self.start().clone())
    }

    /// The restriction to `[a, b]`, re-based to start at time 0.
    pub fn restricted(&self, a: f64, b: f64) -> Result<Self> {
        let total = self.total_duration();
        let slack = 1e-12 * total.max(1.0);
        let b = if b > total && b <= total + slack { total } else { b };
        if !(0.0 <= a && a < b && b <= total) {
            return Err(Error::InvalidPath(format!("bad restriction [{a}, {b}] of [0, {total}]")));
        }
        let mut parts = Vec::new();
        for (k, s) in self.segments.iter().enumerate() {
            let lo = self.times[k].max(a);
            let hi = self.times[k + 1].min(b);
            if hi - lo > 1e-14 * total.max(1.0) {
                parts.push((s.generator.clone(), hi - lo));
            }
        }
        if parts.is_empty() {
            return Err(Error::InvalidPath("empty restriction".into()));
        }
        Ok(Self::from_parts(&self.space, parts, self.eval_raw(a)))
    }

    /// `self` followed by `next`; `next` must start where `self` ends.
    pub fn concat(&self, next: &SymplecticPathSpec) -> Result<Self> {
        if next.space != self.space {
            return Err(Error::DimensionMismatch { expected: self.space.dim(), found: next.space.dim() });
        }
        let gap = (self.end() - next.start()).amax();
        if gap > 1e-8 * self.end().amax().max(1.0) {
            return Err(Error::InvalidPath(format!("concatenation endpoints differ by {gap:.3e}")));
        }
        let mut parts = self.parts();
        parts.extend(next.parts());
        Ok(Self::from_parts(&self.space, parts, self.start().clone()))
    }

    /// `t ↦ G·F(t)`.
    pub fn left_multiplied(&self, g: &SymplecticMatrix) -> Self {
        let ginv = g.inverse();
        let parts = self
            .segments
            .iter()
            .map(|s| {
                let a = g.entries() * &s.hamiltonian * ginv.entries();
                (self.space.generator_of(&a), s.duration)
            })
            .collect();
        Self::from_parts(&self.space, parts, g.entries() * self.start())
    }

    /// `t ↦ F(t)·G`.
    pub fn right_multiplied(&self, g: &SymplecticMatrix) -> Self {
        Self::from_parts(&self.space, self.parts(), self.start() * g.entries())
    }

    /// `t ↦ G·F(t)·G⁻¹`.
    pub fn conjugated(&self, g: &SymplecticMatrix) -> Self {
        let ginv = g.inverse();
        self.left_multiplied(g).right_multiplied(&ginv)
    }

    /// `t ↦ C·F(T - t)·C` for an anti-symplectic involution `C`; the generator of each
    /// reversed segment is `Cᵀ·S·C`.
    pub fn anti_conjugated_reversal(&self, c: &Mat) -> Self {
        let parts = self.segments.iter().rev().map(|s| (c.transpose() * &s.generator * c, s.duration)).collect();
        Self::from_parts(&self.space, parts, c * self.end() * c)
    }

    /// Replace the start matrix, keeping the generators.
    pub fn with_start(&self, start: Mat) -> Self {
        Self::from_parts(&self.space, self.parts(), start)
    }

    /// Add `ε·S₀` to every generator.
    pub fn perturbed(&self, eps: f64, s0: &Mat) -> Self {
        let parts = self.segments.iter().map(|s| (&s.generator + s0 * eps, s.duration)).collect();
        Self::from_parts(&self.space, parts, self.start().clone())
    }

    /// Block-diagonal sum on `self.space ⊕ other.space`; both must have the same duration.
    pub fn direct_sum(&self, other: &SymplecticPathSpec) -> Result<Self> {
        let t1 = self.total_duration();
        let t2 = other.total_duration();
        if (t1 - t2).abs() > 1e-12 * t1.max(1.0) {
            return Err(Error::InvalidPath(format!("durations differ: {t1} vs {t2}")));
        }
        let mut breaks: Vec<f64> = self.times.iter().chain(other.times.iter()).copied().collect();
        breaks.sort_by(f64::total_cmp);
        breaks.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * t1.max(1.0));
        let space = self.space.direct_sum(&other.space);
        let mut parts = Vec::new();
        for w in breaks.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let s1 = self.generator_at(mid, Side::After);
            let s2 = other.generator_at(mid, Side::After);
            parts.push((block_diag(s1, s2), w[1] - w[0]));
        }
        Ok(Self::from_parts(&space, parts, block_diag(self.start(), other.start())))
    }

    /// Largest symplectic residual of `F(t)` over `samples + 1` uniform times.
    pub fn max_residual(&self, samples: usize) -> f64 {
        let total = self.total_duration();
        (0..=samples)
            .map(|i| {
                let f = self.eval_raw(total * i as f64 / samples as f64);
                crate::symlin::symplectic_residual(&self.space, &f) / f.amax().max(1.0).powi(2)
            })
            .fold(0.0, f64::max)
    }
}

/// `Λ(t) = F(t)·seed`.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianPath {
    carrier: SymplecticPathSpec,
    seed: LagrangianFrame,
}

impl LagrangianPath {
    pub fn new(carrier: SymplecticPathSpec, seed: LagrangianFrame) -> Result<Self> {
        if carrier.space() != seed.space() {
            return Err(Error::DimensionMismatch { expected: carrier.space().dim(), found: seed.space().dim() });
        }
        Ok(LagrangianPath { carrier, seed })
    }

    /// `F(t)·R^n`.
    pub fn from_reference(carrier: SymplecticPathSpec) -> Self {
        let seed = carrier.space().reference_lagrangian();
        LagrangianPath { carrier, seed }
    }

    pub fn carrier(&self) -> &SymplecticPathSpec {
        &self.carrier
    }

    pub fn seed(&self) -> &LagrangianFrame {
        &self.seed
    }

    pub fn space(&self) -> &SympSpace {
        self.carrier.space()
    }

    pub fn total_duration(&self) -> f64 {
        self.carrier.total_duration()
    }

    pub fn frame_at(&self, t: f64) -> Result<LagrangianFrame> {
        Ok(self.carrier.evaluate(t)?.apply(&self.seed))
    }

    pub(crate) fn raw_frame_at(&self, t: f64) -> Mat {
        self.carrier.eval_raw(t) * self.seed.columns()
    }

    pub fn reversed(&self) -> Self {
        LagrangianPath { carrier: self.carrier.reversed(), seed: self.seed.clone() }
    }

    pub fn start_frame(&self) -> LagrangianFrame {
        LagrangianFrame::new_unchecked(self.carrier.start() * self.seed.columns(), self.space())
    }

    pub fn end_frame(&self) -> LagrangianFrame {
        LagrangianFrame::new_unchecked(self.carrier.end() * self.seed.columns(), self.space())
    }
}
