//! Exact Novikov-ring bookkeeping for `X = S²×S²` and `M = X × X̄`.

mod element;
mod parse;

use std::collections::BTreeMap;

use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use element::{ClassSymbol, Exponent, Lattice, NovikovElement, SphereClass};
pub use parse::{parse_element, parse_element_in, parse_exponent};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NovikovError {
    #[error("parse error at {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("symbol ({0}) is not a class symbol")]
    BadSymbol(String),
    #[error("terms live on different lattices")]
    LatticeMismatch,
    #[error("unknown class {0}: no pushforward is known")]
    UnknownClass(String),
    #[error("Maslov index {0} of an exponent is not even")]
    OddMaslov(String),
    #[error("lambda must exceed 1, got {0}")]
    InvalidLambda(Rational64),
}

/// `c₁`: `2a + 2b` on `X`, `2a + 2b - 2c - 2d` on `M`.
pub fn chern(class: &SphereClass) -> i64 {
    let c = &class.coefficients;
    match class.lattice {
        Lattice::X => 2 * c[0] + 2 * c[1],
        Lattice::M => 2 * c[0] + 2 * c[1] - 2 * c[2] - 2 * c[3],
    }
}

/// Area for `ω₀ ⊕ λω₀`: `a + λb` on `X`, `a + λb - c - λd` on `M`.
pub fn area(class: &SphereClass, lambda: Rational64) -> Rational64 {
    let c: Vec<Rational64> = class.coefficients.iter().map(|&v| Rational64::from_integer(v)).collect();
    match class.lattice {
        Lattice::X => c[0] + lambda * c[1],
        Lattice::M => c[0] + lambda * c[1] - c[2] - lambda * c[3],
    }
}

fn chern_rational(lattice: Lattice, coefs: &[Rational64]) -> Rational64 {
    let two = Rational64::from_integer(2);
    match lattice {
        Lattice::X => two * (coefs[0] + coefs[1]),
        Lattice::M => two * (coefs[0] + coefs[1] - coefs[2] - coefs[3]),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    NotMonotone,
    NotAWitness,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub class: SphereClass,
    pub chern: i64,
    pub area: Rational64,
    pub verdict: Verdict,
}

/// Classifies a class: `c₁ = 0` with nonzero area rules out monotonicity.
pub fn classify_class(class: &SphereClass, lambda: Rational64) -> Result<MonotonicityReport, NovikovError> {
    if lambda <= Rational64::one() {
        return Err(NovikovError::InvalidLambda(lambda));
    }
    let c = chern(class);
    let a = area(class, lambda);
    let verdict = if c == 0 && !a.is_zero() { Verdict::NotMonotone } else { Verdict::NotAWitness };
    Ok(MonotonicityReport { class: class.clone(), chern: c, area: a, verdict })
}

/// The class `(01 0̄0̄) - (10 0̄0̄)` of `M`, with `c₁ = 0` and area `λ - 1`.
pub fn monotonicity_witness(lambda: Rational64) -> Result<MonotonicityReport, NovikovError> {
    classify_class(&SphereClass::m(-1, 1, 0, 0), lambda)
}

/// `δ₁(j(β, β')) = β - β'`.
pub fn delta1_pair(beta: &SphereClass, beta_prime: &SphereClass) -> Result<SphereClass, NovikovError> {
    if beta.lattice != Lattice::X || beta_prime.lattice != Lattice::X {
        return Err(NovikovError::LatticeMismatch);
    }
    beta.checked_sub(beta_prime)
}

/// `δ₁` on an `M` class `(a, b, c, d) = j((a, b), (c, d))`.
pub fn delta1_class(class: &SphereClass) -> Result<SphereClass, NovikovError> {
    if class.lattice != Lattice::M {
        return Err(NovikovError::LatticeMismatch);
    }
    let c = &class.coefficients;
    Ok(SphereClass::x(c[0] - c[2], c[1] - c[3]))
}

/// `δ₁` extended linearly to exponents, `h` carried along.
pub fn delta1_exponent(e: &Exponent) -> Result<Exponent, NovikovError> {
    if e.lattice != Lattice::M {
        return Err(NovikovError::LatticeMismatch);
    }
    let f = |v: &[Rational64]| vec![v[0] - v[2], v[1] - v[3]];
    Ok(Exponent { lattice: Lattice::X, constant: f(&e.constant), h: f(&e.h) })
}

/// `τ`: exponent negation.
pub fn tau(e: &NovikovElement) -> NovikovElement {
    e.map_terms(|c, s, x| Ok((c, s.clone(), x.neg()))).expect("negation cannot fail")
}

/// `(-1)^{½μ(β)}` with `½μ(β) = c₁(β)` computed on the `X` side; `h` does not contribute.
fn twist_sign(x_exponent: &Exponent) -> Result<i64, NovikovError> {
    let half_mu = chern_rational(Lattice::X, &x_exponent.constant);
    if !half_mu.is_integer() {
        return Err(NovikovError::OddMaslov(format!("{}", half_mu * Rational64::from_integer(2))));
    }
    Ok(if half_mu.to_integer().rem_euclid(2) == 0 { 1 } else { -1 })
}

/// `δ₂ = (sign twist) ∘ τ ∘ δ₁` on `M` exponents; on `X` exponents, `δ₂ ∘ δ₁⁻¹`.
pub fn tau_and_delta2(e: &NovikovElement) -> Result<NovikovElement, NovikovError> {
    e.map_terms(|c, s, x| {
        let d1 = match x.lattice {
            Lattice::M => delta1_exponent(x)?,
            Lattice::X => x.clone(),
        };
        let sign = twist_sign(&d1)?;
        Ok((sign * c, s.clone(), d1.neg()))
    })
}

/// Class-level values of `δ₁ ∘ 𝒜` on symbols of `M`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PushforwardTable {
    entries: BTreeMap<ClassSymbol, (i64, ClassSymbol)>,
}

impl Default for PushforwardTable {
    /// `(01 1̄1̄) ↦ (01)` and `(11 1̄0̄) ↦ -(10)`.
    fn default() -> Self {
        let sym = |d: &[u8]| ClassSymbol::new(d).expect("valid digits");
        let mut entries = BTreeMap::new();
        entries.insert(sym(&[0, 1, 1, 1]), (1, sym(&[0, 1])));
        entries.insert(sym(&[1, 1, 1, 0]), (-1, sym(&[1, 0])));
        PushforwardTable { entries }
    }
}

impl PushforwardTable {
    pub fn empty() -> Self {
        PushforwardTable { entries: BTreeMap::new() }
    }

    pub fn insert(&mut self, from: ClassSymbol, sign: i64, to: ClassSymbol) {
        self.entries.insert(from, (sign, to));
    }

    pub fn get(&self, symbol: &ClassSymbol) -> Option<&(i64, ClassSymbol)> {
        self.entries.get(symbol)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// `δ₁ ∘ 𝒜` term by term: symbols through the table, exponents through `δ₁`.
pub fn albers_delta1_pushforward(e: &NovikovElement, table: &PushforwardTable) -> Result<NovikovElement, NovikovError> {
    e.map_terms(|c, s, x| {
        let (sign, target) = table.get(s).ok_or_else(|| NovikovError::UnknownClass(s.to_string()))?;
        Ok((sign * c, target.clone(), delta1_exponent(x)?))
    })
}

/// `ψ = [(01 1̄1̄) - (11 1̄0̄)]·e^{½(1000) + h[(0001) + (1000)]}`.
pub fn seidel_input() -> NovikovElement {
    parse_element("[(0111)-(1110)]e^{1/2*(1000)+h*[(0001)+(1000)]}").expect("literal parses")
}

/// `[(01) + (10)]·e^{½(10) + h[(10) - (01)]}`.
pub fn seidel_expected() -> NovikovElement {
    parse_element("[(01)+(10)]e^{1/2*(10)+h*[(10)-(01)]}").expect("literal parses")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermDiff {
    pub symbol: String,
    pub exponent: String,
    pub expected: i64,
    pub found: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldenReport {
    pub computed: NovikovElement,
    pub expected: NovikovElement,
    pub diff: Vec<TermDiff>,
}

impl GoldenReport {
    pub fn pass(&self) -> bool {
        self.diff.is_empty()
    }
}

/// Coefficient-level differences between two elements.
pub fn term_diff(expected: &NovikovElement, found: &NovikovElement) -> Vec<TermDiff> {
    let mut keys: BTreeMap<(Exponent, ClassSymbol), (i64, i64)> = BTreeMap::new();
    for (c, s, e) in expected.terms() {
        keys.entry((e.clone(), s.clone())).or_default().0 = c;
    }
    for (c, s, e) in found.terms() {
        keys.entry((e.clone(), s.clone())).or_default().1 = c;
    }
    keys.into_iter()
        .filter(|(_, (a, b))| a != b)
        .map(|((e, s), (a, b))| TermDiff { symbol: s.to_string(), exponent: e.to_string(), expected: a, found: b })
        .collect()
}

/// Pushes `psi` forward and compares against the expected split-loop Seidel element.
pub fn verify_seidel_with(psi: &NovikovElement) -> Result<GoldenReport, NovikovError> {
    let computed = albers_delta1_pushforward(psi, &PushforwardTable::default())?;
    let expected = seidel_expected();
    let diff = term_diff(&expected, &computed);
    Ok(GoldenReport { computed, expected, diff })
}

pub fn verify_seidel() -> GoldenReport {
    verify_seidel_with(&seidel_input()).expect("the golden input is in the table")
}

/// The two split-loop pushforwards as `(computed, expected)` pairs.
pub fn split_seidel_checks() -> Vec<(NovikovElement, NovikovElement)> {
    let table = PushforwardTable::default();
    [("(0111)e^{1/2*(1000)}", "(01)e^{1/2*(10)}"), ("-(1110)e^{-1/2*(0001)}", "(10)e^{1/2*(01)}")]
        .iter()
        .map(|(input, expected)| {
            let e = parse_element(input).expect("literal parses");
            let pushed = albers_delta1_pushforward(&e, &table).expect("symbols are in the table");
            (pushed, parse_element(expected).expect("literal parses"))
        })
        .collect()
}
