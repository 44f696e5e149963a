//! Seeded property suites over every identity the library checks.

use std::collections::BTreeMap;

use num_rational::Rational64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::czindex::{cz_lagrangian, cz_periodic, hormander, hormander_signature};
use crate::doubling::{verify_diagonal, verify_index_theorem, verify_reflection, HalfPathData};
use crate::error::Error;
use crate::halfint::HalfInt;
use crate::maslov::{
    crossing_form, crossing_form_with_complement, find_crossings, maslov_index, CrossingOptions, CrossingPosition,
    LagrangianPath,
    Side, SymplecticPathSpec,
};
use crate::novikov;
use crate::random::{
    generic_perturbation, random_diagonal_phi, random_half_path, random_lagrangian, random_path, random_symplectic,
    trial_rng, trial_seed,
};
use crate::symlin::{graph_lagrangian, AntiSymplecticMap, LagrangianFrame, SympSpace};

/// Size of the generator perturbation used to retry an irregular crossing.
pub const PERTURBATION: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub trials: usize,
    pub opts: CrossingOptions,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { seed: crate::random::DEFAULT_SEED, trials: 50, opts: CrossingOptions::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Skip,
    Fail,
}

/// One trial, as emitted in the records format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub suite: String,
    pub trial: u64,
    pub seed: u64,
    pub n: usize,
    pub status: Status,
    pub perturbed: bool,
    pub values: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub suite: String,
    pub pass: usize,
    pub skip: usize,
    pub fail: usize,
    #[serde(skip)]
    pub records: Vec<TrialRecord>,
}

impl SuiteSummary {
    fn from_records(suite: &str, records: Vec<TrialRecord>) -> Self {
        let count = |s: Status| records.iter().filter(|r| r.status == s).count();
        SuiteSummary {
            suite: suite.to_string(),
            pass: count(Status::Pass),
            skip: count(Status::Skip),
            fail: count(Status::Fail),
            records,
        }
    }

    pub fn total(&self) -> usize {
        self.pass + self.skip + self.fail
    }

    /// Fraction of trials skipped as degenerate.
    pub fn skip_rate(&self) -> f64 {
        if self.total() == 0 {
            0.0
        } else {
            self.skip as f64 / self.total() as f64
        }
    }

    pub fn ok(&self) -> bool {
        self.fail == 0
    }
}

/// The result of one trial body before it is stamped with its identity.
struct Outcome {
    status: Status,
    values: BTreeMap<String, String>,
    note: Option<String>,
    perturbed: bool,
}

impl Outcome {
    fn check(ok: bool, values: Vec<(&str, String)>) -> Self {
        let values: BTreeMap<String, String> = values.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
        Outcome { status: if ok { Status::Pass } else { Status::Fail }, values, note: None, perturbed: false }
    }

    fn skip(reason: impl std::fmt::Display) -> Self {
        Outcome { status: Status::Skip, values: BTreeMap::new(), note: Some(reason.to_string()), perturbed: false }
    }

    fn fail(reason: impl std::fmt::Display) -> Self {
        Outcome { status: Status::Fail, values: BTreeMap::new(), note: Some(reason.to_string()), perturbed: false }
    }

    fn perturbed(mut self, yes: bool) -> Self {
        self.perturbed = yes;
        self
    }

    /// Degeneracy of the input is a skip; anything else the engine raises is a failure.
    fn from_error(e: Error) -> Self {
        match e {
            Error::Nondegeneracy(_)
            | Error::IrregularCrossing { .. }
            | Error::Unresolved { .. }
            | Error::Degenerate { .. }
            | Error::DegenerateEndpoint
            | Error::AuxiliaryNotFound { .. }
            | Error::Transversality(_) => Outcome::skip(e),
            other => Outcome::fail(other),
        }
    }
}

fn run_trials<F>(suite: &str, cfg: &SuiteConfig, dims: &[usize], per_dim: usize, mut body: F) -> SuiteSummary
where
    F: FnMut(usize, &mut ChaCha8Rng) -> Outcome,
{
    let mut records = Vec::new();
    let mut index = 0u64;
    for &n in dims {
        for _ in 0..per_dim {
            let seed = trial_seed(cfg.seed, suite, index);
            let mut rng = trial_rng(cfg.seed, suite, index);
            let o = body(n, &mut rng);
            records.push(TrialRecord {
                suite: suite.to_string(),
                trial: index,
                seed,
                n,
                status: o.status,
                perturbed: o.perturbed,
                values: o.values,
                note: o.note,
            });
            index += 1;
        }
    }
    SuiteSummary::from_records(suite, records)
}

/// Runs `f` on the data, retrying once on the perturbed data after an irregular crossing.
fn with_retry<T, F>(data: T, perturb: impl Fn(&T) -> T, mut f: F) -> Outcome
where
    F: FnMut(&T) -> Result<Outcome, Error>,
{
    match f(&data) {
        Ok(o) => o,
        Err(Error::IrregularCrossing { .. }) => match f(&perturb(&data)) {
            Ok(o) => o.perturbed(true),
            Err(e) => Outcome::from_error(e).perturbed(true),
        },
        Err(e) => Outcome::from_error(e),
    }
}

fn perturb_path(p: &SymplecticPathSpec) -> SymplecticPathSpec {
    p.perturbed(PERTURBATION, &generic_perturbation(p.space().dim()))
}

fn h(v: HalfInt) -> String {
    v.to_string()
}

type OracleCase = (&'static str, Box<dyn Fn() -> Result<HalfInt, Error>>, HalfInt);

/// The closed-form rotation values.
pub fn rotation_suite(cfg: &SuiteConfig) -> SuiteSummary {
    use std::f64::consts::PI;
    let opts = cfg.opts;
    let cases: Vec<OracleCase> = vec![
        (
            "mu(e^{i pi t}R, R; [0,1])",
            Box::new(move || {
                let p = LagrangianPath::from_reference(SymplecticPathSpec::rotation(1, PI, 1.0));
                maslov_index(&p, &SympSpace::standard(1).reference_lagrangian(), &opts)
            }),
            HalfInt::from_int(1),
        ),
        (
            "mu(e^{i pi t}R, R; [0,2])",
            Box::new(move || {
                let p = LagrangianPath::from_reference(SymplecticPathSpec::rotation(1, PI, 2.0));
                maslov_index(&p, &SympSpace::standard(1).reference_lagrangian(), &opts)
            }),
            HalfInt::from_int(2),
        ),
        (
            "cz_lagrangian(e^{i pi t/2})",
            Box::new(move || Ok(cz_lagrangian(&SymplecticPathSpec::rotation(1, PI / 2.0, 1.0), &opts)?.value)),
            HalfInt::from_twice(1),
        ),
        (
            "cz_periodic(e^{i pi t/2}; [0,2])",
            Box::new(move || Ok(cz_periodic(&SymplecticPathSpec::rotation(1, PI / 2.0, 2.0), true, &opts)?.value)),
            HalfInt::from_int(1),
        ),
        (
            "cz_periodic(e^{2 pi i t}; [0,1])",
            Box::new(move || Ok(cz_periodic(&SymplecticPathSpec::rotation(1, 2.0 * PI, 1.0), false, &opts)?.value)),
            HalfInt::from_int(2),
        ),
    ];
    let records = cases
        .iter()
        .enumerate()
        .map(|(i, (name, f, expected))| {
            let o = match f() {
                Ok(v) => Outcome::check(v == *expected, vec![("case", name.to_string()), ("value", h(v)), ("expected", h(*expected))]),
                Err(e) => Outcome::fail(e),
            };
            TrialRecord {
                suite: "rotation".into(),
                trial: i as u64,
                seed: 0,
                n: 1,
                status: o.status,
                perturbed: false,
                values: o.values,
                note: o.note,
            }
        })
        .collect();
    SuiteSummary::from_records("rotation", records)
}

/// `μ(F) + μ(F⁻) - μ(loop) = ½·sign Q` on random half-paths, `n ∈ {1, 2, 3}`.
pub fn index_theorem_suite(cfg: &SuiteConfig) -> SuiteSummary {
    run_trials("index-theorem", cfg, &[1, 2, 3], cfg.trials, |n, rng| {
        with_retry(random_half_path(n, rng), perturb_path, |p| {
            let r = verify_index_theorem(&HalfPathData::standard(p.clone())?, &cfg.opts)?;
            Ok(Outcome::check(
                r.pass() && r.q_asymmetry < 1e-9,
                vec![
                    ("mu_plus", h(r.mu_plus)),
                    ("mu_minus", h(r.mu_minus)),
                    ("mu_loop", h(r.mu_loop)),
                    ("sign_q", r.q_signature.to_string()),
                    ("defect", h(r.defect)),
                ],
            ))
        })
    })
}

/// `μ(F) = μ(F⁻)` on random half-paths, `n ∈ {1, 2}`.
pub fn reflection_suite(cfg: &SuiteConfig) -> SuiteSummary {
    run_trials("reflection", cfg, &[1, 2], cfg.trials, |n, rng| {
        with_retry(random_half_path(n, rng), perturb_path, |p| {
            let r = verify_reflection(&HalfPathData::standard(p.clone())?, &cfg.opts)?;
            Ok(Outcome::check(r.holds(), vec![("mu", h(r.mu)), ("mu_reflected", h(r.mu_reflected))]))
        })
    })
}

/// The diagonal chain on random `φ` over `[0, 2]`, `m ∈ {1, 2}`.
pub fn diagonal_suite(cfg: &SuiteConfig) -> SuiteSummary {
    run_trials("diagonal", cfg, &[1, 2], cfg.trials, |m, rng| {
        with_retry(random_diagonal_phi(m, rng), perturb_path, |phi| {
            let r = verify_diagonal(phi, &cfg.opts)?;
            Ok(Outcome::check(
                r.pass(),
                vec![
                    ("sign_q", r.defect.q_signature.to_string()),
                    ("mu_loop", h(r.defect.mu_loop)),
                    ("mu_half", h(r.mu_half)),
                    ("cz_factor", h(r.cz_factor)),
                    ("defect", h(r.defect.defect)),
                ],
            ))
        })
    })
}

fn lagrangians(space: &SympSpace, count: usize, rng: &mut ChaCha8Rng) -> Vec<LagrangianFrame> {
    (0..count).map(|_| random_lagrangian(space, rng)).collect()
}

fn outcome_of(r: Result<Outcome, Error>) -> Outcome {
    r.unwrap_or_else(Outcome::from_error)
}

/// Both Hörmander identities, path independence, the signature formula and the flip rule.
pub fn hormander_suites(cfg: &SuiteConfig) -> Vec<SuiteSummary> {
    let opts = cfg.opts;
    let id1 = run_trials("hormander-identity-1", cfg, &[1, 2], 2 * cfg.trials, |n, rng| {
        let l = lagrangians(&SympSpace::standard(n), 3, rng);
        let (a, b, c) = (&l[0], &l[1], &l[2]);
        outcome_of((|| {
            let lhs = hormander(a, b, a, c, &opts, rng)?;
            let rhs = hormander(c, b, a, c, &opts, rng)?;
            Ok(Outcome::check(lhs == rhs, vec![("lhs", h(lhs)), ("rhs", h(rhs))]))
        })())
    });
    let id2 = run_trials("hormander-identity-2", cfg, &[1, 2], 2 * cfg.trials, |n, rng| {
        let l = lagrangians(&SympSpace::standard(n), 5, rng);
        let (a, b, c, d, dp) = (&l[0], &l[1], &l[2], &l[3], &l[4]);
        outcome_of((|| {
            let lhs = hormander(a, b, c, d, &opts, rng)? - hormander(a, b, c, dp, &opts, rng)?;
            let rhs = hormander(a, b, dp, d, &opts, rng)?;
            Ok(Outcome::check(lhs == rhs, vec![("lhs", h(lhs)), ("rhs", h(rhs))]))
        })())
    });
    let paths = run_trials("hormander-path-independence", cfg, &[1, 2], cfg.trials, |n, rng| {
        let l = lagrangians(&SympSpace::standard(n), 4, rng);
        outcome_of((|| {
            let first = hormander(&l[0], &l[1], &l[2], &l[3], &opts, rng)?;
            let second = hormander(&l[0], &l[1], &l[2], &l[3], &opts, rng)?;
            Ok(Outcome::check(first == second, vec![("first", h(first)), ("second", h(second))]))
        })())
    });
    let signature = run_trials("hormander-signature", cfg, &[1, 2], cfg.trials, |n, rng| {
        let l = lagrangians(&SympSpace::standard(n), 3, rng);
        let (ll, k, lp) = (&l[0], &l[1], &l[2]);
        outcome_of((|| {
            let formula = hormander_signature(ll, k, lp, &opts)?;
            let path = hormander(ll, k, k, lp, &opts, rng)?;
            Ok(Outcome::check(formula == path, vec![("formula", h(formula)), ("path", h(path))]))
        })())
    });
    let flip = run_trials("hormander-flip", cfg, &[1, 2], cfg.trials, |n, rng| {
        let v = SympSpace::standard(n);
        let swap = AntiSymplecticMap::factor_swap(&v);
        let split = v.reference_lagrangian().direct_sum(&v.negated().reference_lagrangian());
        let graph = |rng: &mut ChaCha8Rng| graph_lagrangian(&random_symplectic(&v, rng)).expect("symplectic");
        let (k, v1, v2) = (graph(rng), graph(rng), graph(rng));
        outcome_of((|| {
            let s = hormander(&split, &k, &v1, &v2, &opts, rng)?;
            let flipped = hormander(&swap.apply(&split), &swap.apply(&k), &swap.apply(&v1), &swap.apply(&v2), &opts, rng)?;
            Ok(Outcome::check(flipped == -s, vec![("s", h(s)), ("flipped", h(flipped))]))
        })())
    });
    vec![id1, id2, paths, signature, flip]
}

fn random_lagrangian_path(space: &SympSpace, total: f64, rng: &mut ChaCha8Rng) -> LagrangianPath {
    let carrier = random_path(space, 1.5, total, rng);
    LagrangianPath::new(carrier, random_lagrangian(space, rng)).expect("same space")
}

/// Additivity, invariance and antisymmetry of the Robbin–Salamon index.
pub fn maslov_suites(cfg: &SuiteConfig) -> Vec<SuiteSummary> {
    let opts = cfg.opts;
    let concat = run_trials("maslov-concatenation", cfg, &[1, 2], cfg.trials, |n, rng| {
        let space = SympSpace::standard(n);
        let path = random_lagrangian_path(&space, 2.0, rng);
        let v = random_lagrangian(&space, rng);
        let a = rng.random_range(0.2..1.8);
        outcome_of((|| {
            let left = LagrangianPath::new(path.carrier().restricted(0.0, a)?, path.seed().clone())?;
            let right = LagrangianPath::new(path.carrier().restricted(a, path.total_duration())?, path.seed().clone())?;
            let whole = maslov_index(&path, &v, &opts)?;
            let parts = maslov_index(&left, &v, &opts)? + maslov_index(&right, &v, &opts)?;
            Ok(Outcome::check(
                whole == parts,
                vec![("split", format!("{a:.6}")), ("whole", h(whole)), ("parts", h(parts))],
            ))
        })())
    });
    let invariance = run_trials("maslov-symplectic-invariance", cfg, &[1, 2], cfg.trials, |n, rng| {
        let space = SympSpace::standard(n);
        let path = random_lagrangian_path(&space, 1.5, rng);
        let v = random_lagrangian(&space, rng);
        let g = random_symplectic(&space, rng);
        outcome_of((|| {
            let moved = LagrangianPath::new(path.carrier().left_multiplied(&g), path.seed().clone())?;
            let before = maslov_index(&path, &v, &opts)?;
            let after = maslov_index(&moved, &g.apply(&v), &opts)?;
            Ok(Outcome::check(before == after, vec![("before", h(before)), ("after", h(after))]))
        })())
    });
    let sums = run_trials("maslov-direct-sum", cfg, &[1, 2], cfg.trials, |second, rng| {
        let (s1, s2) = (SympSpace::standard(1), SympSpace::standard(second));
        let (p1, p2) = (random_lagrangian_path(&s1, 1.5, rng), random_lagrangian_path(&s2, 1.5, rng));
        let (v1, v2) = (random_lagrangian(&s1, rng), random_lagrangian(&s2, rng));
        outcome_of((|| {
            let sum = LagrangianPath::new(p1.carrier().direct_sum(p2.carrier())?, p1.seed().direct_sum(p2.seed()))?;
            let total = maslov_index(&sum, &v1.direct_sum(&v2), &opts)?;
            let parts = maslov_index(&p1, &v1, &opts)? + maslov_index(&p2, &v2, &opts)?;
            Ok(Outcome::check(total == parts, vec![("sum", h(total)), ("parts", h(parts))]))
        })())
    });
    let reversal = run_trials("maslov-reversal", cfg, &[1, 2], cfg.trials, |n, rng| {
        let space = SympSpace::standard(n);
        let path = random_lagrangian_path(&space, 1.5, rng);
        let v = random_lagrangian(&space, rng);
        outcome_of((|| {
            let fwd = maslov_index(&path, &v, &opts)?;
            let back = maslov_index(&path.reversed(), &v, &opts)?;
            Ok(Outcome::check(back == -fwd, vec![("forward", h(fwd)), ("backward", h(back))]))
        })())
    });
    let reparam = run_trials("maslov-reparametrization", cfg, &[1, 2], cfg.trials, |n, rng| {
        let space = SympSpace::standard(n);
        let path = random_lagrangian_path(&space, 1.5, rng);
        let v = random_lagrangian(&space, rng);
        let factor = rng.random_range(0.25..4.0);
        outcome_of((|| {
            let slow = LagrangianPath::new(path.carrier().rescaled(factor), path.seed().clone())?;
            let a = maslov_index(&path, &v, &opts)?;
            let b = maslov_index(&slow, &v, &opts)?;
            Ok(Outcome::check(a == b, vec![("factor", format!("{factor:.6}")), ("index", h(a)), ("rescaled", h(b))]))
        })())
    });
    let complement = run_trials("maslov-complement", cfg, &[1, 2, 3], cfg.trials, |n, rng| {
        let space = SympSpace::standard(n);
        // F(t)·R^n against R^n always crosses at t = 0, often again later
        let path = LagrangianPath::from_reference(random_path(&space, 1.5, 2.0, rng));
        let v = space.reference_lagrangian();
        outcome_of((|| {
            let crossings = find_crossings(&path, &v, &opts)?;
            let mut worst = 0.0_f64;
            let mut same_sign = true;
            for c in &crossings {
                let lam = path.frame_at(c.time)?;
                let mut w = random_lagrangian(&space, rng);
                for _ in 0..8 {
                    if crate::symlin::intersection_dimension(&lam, &w, opts.intersection_tol()) == 0 {
                        break;
                    }
                    w = random_lagrangian(&space, rng);
                }
                let sides = match c.position {
                    CrossingPosition::End => vec![(Side::Before, &c.form)],
                    CrossingPosition::Joint => {
                        vec![(Side::Before, &c.form), (Side::After, c.form_after.as_ref().expect("joint"))]
                    }
                    _ => vec![(Side::After, &c.form)],
                };
                for (side, direct) in sides {
                    let scale = direct.matrix().amax().max(1.0);
                    let other = crossing_form_with_complement(&path, &v, c.time, &w, side, &opts)?;
                    worst = worst.max((other.matrix() - direct.matrix()).amax() / scale);
                    same_sign &= other.signature(opts.tol) == direct.signature(opts.tol);
                    if side == Side::After {
                        let canonical = crossing_form(&path, &v, c.time, &opts)?;
                        worst = worst.max((canonical.matrix() - direct.matrix()).amax() / scale);
                    }
                }
            }
            Ok(Outcome::check(
                worst < 1e-6 && same_sign,
                vec![("crossings", crossings.len().to_string()), ("max_rel_diff", format!("{worst:.1e}"))],
            ))
        })())
    });
    vec![concat, invariance, sums, reversal, reparam, complement]
}

/// The exact Novikov-ring checks: the golden pushforward, split loops and the monotonicity witness.
pub fn novikov_suite(_cfg: &SuiteConfig) -> SuiteSummary {
    let mut outcomes = Vec::new();
    let golden = novikov::verify_seidel();
    let mut diff = golden.diff.iter().map(|d| format!("{}@{}:{}!={}", d.symbol, d.exponent, d.found, d.expected));
    outcomes.push(Outcome::check(
        golden.pass(),
        vec![("case", "golden".into()), ("computed", golden.computed.to_string()), ("diff", diff.next().unwrap_or_default())],
    ));
    for (i, (computed, expected)) in novikov::split_seidel_checks().into_iter().enumerate() {
        outcomes.push(Outcome::check(
            computed == expected,
            vec![("case", format!("split-{}", i + 1)), ("computed", computed.to_string())],
        ));
    }
    for lambda in [Rational64::new(5, 4), Rational64::new(3, 2), Rational64::new(2, 1)] {
        let r = novikov::monotonicity_witness(lambda).expect("lambda > 1");
        let ok = r.chern == 0 && r.area == lambda - 1 && r.verdict == novikov::Verdict::NotMonotone;
        outcomes.push(Outcome::check(
            ok,
            vec![("case", format!("witness lambda={lambda}")), ("chern", r.chern.to_string()), ("area", r.area.to_string())],
        ));
    }
    let records = outcomes
        .into_iter()
        .enumerate()
        .map(|(i, o)| TrialRecord {
            suite: "novikov".into(),
            trial: i as u64,
            seed: 0,
            n: 0,
            status: o.status,
            perturbed: false,
            values: o.values,
            note: o.note,
        })
        .collect();
    SuiteSummary::from_records("novikov", records)
}

/// Every suite, in a fixed order.
pub fn run_all(cfg: &SuiteConfig) -> Vec<SuiteSummary> {
    let mut out = vec![rotation_suite(cfg), index_theorem_suite(cfg), reflection_suite(cfg), diagonal_suite(cfg)];
    out.extend(hormander_suites(cfg));
    out.extend(maslov_suites(cfg));
    out.push(novikov_suite(cfg));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn records_round_trip_through_json() {
        let cfg = SuiteConfig { trials: 2, ..SuiteConfig::default() };
        for summary in [reflection_suite(&cfg), novikov_suite(&cfg)] {
            for r in &summary.records {
                let line = serde_json::to_string(r).unwrap();
                let back: TrialRecord = serde_json::from_str(&line).unwrap();
                assert_eq!(&back, r);
            }
        }
    }

    #[test]
    fn zero_trials_is_vacuous() {
        let cfg = SuiteConfig { trials: 0, ..SuiteConfig::default() };
        let s = index_theorem_suite(&cfg);
        assert_eq!((s.total(), s.ok()), (0, true));
    }

    #[test]
    fn small_run_passes() {
        let cfg = SuiteConfig { trials: 3, ..SuiteConfig::default() };
        for s in run_all(&cfg) {
            assert!(s.ok(), "{}: {:?}", s.suite, s.records.iter().filter(|r| r.status == Status::Fail).collect::<Vec<_>>());
        }
    }
}
