use std::collections::BTreeMap;
use std::fmt::{self, Write};

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::NovikovError;

/// `X = S²×S²` with basis `A = (10)`, `B = (01)`, or `M = X × X̄` with four basis classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Lattice {
    X,
    M,
}

impl Lattice {
    pub fn rank(self) -> usize {
        match self {
            Lattice::X => 2,
            Lattice::M => 4,
        }
    }

    pub fn from_rank(rank: usize) -> Option<Lattice> {
        match rank {
            2 => Some(Lattice::X),
            4 => Some(Lattice::M),
            _ => None,
        }
    }

    pub fn basis(self, i: usize) -> Vec<i64> {
        let mut v = vec![0; self.rank()];
        v[i] = 1;
        v
    }
}

fn class_text(digits: impl Iterator<Item = String>) -> String {
    let mut s = String::from("(");
    for d in digits {
        s.push_str(&d);
    }
    s.push(')');
    s
}

/// An integral class in `π₂` of `X` or `M`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SphereClass {
    pub lattice: Lattice,
    pub coefficients: Vec<i64>,
}

impl SphereClass {
    pub fn new(lattice: Lattice, coefficients: Vec<i64>) -> Result<Self, NovikovError> {
        if coefficients.len() != lattice.rank() {
            return Err(NovikovError::LatticeMismatch);
        }
        Ok(SphereClass { lattice, coefficients })
    }

    pub fn x(a: i64, b: i64) -> Self {
        SphereClass { lattice: Lattice::X, coefficients: vec![a, b] }
    }

    pub fn m(a: i64, b: i64, c: i64, d: i64) -> Self {
        SphereClass { lattice: Lattice::M, coefficients: vec![a, b, c, d] }
    }

    pub fn zero(lattice: Lattice) -> Self {
        SphereClass { lattice, coefficients: vec![0; lattice.rank()] }
    }

    pub fn checked_add(&self, other: &SphereClass) -> Result<SphereClass, NovikovError> {
        if self.lattice != other.lattice {
            return Err(NovikovError::LatticeMismatch);
        }
        let coefficients = self.coefficients.iter().zip(&other.coefficients).map(|(a, b)| a + b).collect();
        Ok(SphereClass { lattice: self.lattice, coefficients })
    }

    pub fn checked_sub(&self, other: &SphereClass) -> Result<SphereClass, NovikovError> {
        self.checked_add(&other.neg())
    }

    pub fn neg(&self) -> SphereClass {
        SphereClass { lattice: self.lattice, coefficients: self.coefficients.iter().map(|a| -a).collect() }
    }
}

impl fmt::Display for SphereClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coefficients.iter().all(|c| (0..=9).contains(c)) {
            f.write_str(&class_text(self.coefficients.iter().map(|c| c.to_string())))
        } else {
            let parts: Vec<String> = self.coefficients.iter().map(|c| c.to_string()).collect();
            write!(f, "({})", parts.join(","))
        }
    }
}

/// A homology-class symbol `(ab)` of `X` or `(ab c̄d̄)` of `M`; no digits is the unit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ClassSymbol {
    pub digits: Vec<u8>,
}

impl ClassSymbol {
    pub fn new(digits: &[u8]) -> Result<Self, NovikovError> {
        if !(digits.is_empty() || Lattice::from_rank(digits.len()).is_some()) || digits.iter().any(|&d| d > 1) {
            return Err(NovikovError::BadSymbol(digits.iter().map(|d| d.to_string()).collect()));
        }
        Ok(ClassSymbol { digits: digits.to_vec() })
    }

    pub fn unit() -> Self {
        ClassSymbol { digits: Vec::new() }
    }

    pub fn is_unit(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn lattice(&self) -> Option<Lattice> {
        Lattice::from_rank(self.digits.len())
    }
}

impl fmt::Display for ClassSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_unit() {
            return f.write_str("1");
        }
        // second-factor digits of M carry an overline
        let over = self.digits.len() == 4;
        let text = class_text(self.digits.iter().enumerate().map(|(i, d)| {
            if over && i >= 2 {
                format!("{d}\u{0305}")
            } else {
                d.to_string()
            }
        }));
        f.write_str(&text)
    }
}

/// `Σ qᵢ·eᵢ + h·Σ pᵢ·eᵢ` over the basis classes of a lattice, with rational `qᵢ`, `pᵢ`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Exponent {
    pub lattice: Lattice,
    pub constant: Vec<Rational64>,
    pub h: Vec<Rational64>,
}

fn r(n: i64) -> Rational64 {
    Rational64::from_integer(n)
}

impl Exponent {
    pub fn zero(lattice: Lattice) -> Self {
        let z = vec![Rational64::zero(); lattice.rank()];
        Exponent { lattice, constant: z.clone(), h: z }
    }

    /// `q·β`.
    pub fn of_class(q: Rational64, class: &SphereClass) -> Self {
        let mut e = Exponent::zero(class.lattice);
        for (slot, c) in e.constant.iter_mut().zip(&class.coefficients) {
            *slot = q * r(*c);
        }
        e
    }

    /// `q·h·β`.
    pub fn of_h_class(q: Rational64, class: &SphereClass) -> Self {
        let mut e = Exponent::zero(class.lattice);
        for (slot, c) in e.h.iter_mut().zip(&class.coefficients) {
            *slot = q * r(*c);
        }
        e
    }

    pub fn is_zero(&self) -> bool {
        self.constant.iter().chain(&self.h).all(Zero::is_zero)
    }

    pub fn checked_add(&self, other: &Exponent) -> Result<Exponent, NovikovError> {
        if self.lattice != other.lattice {
            return Err(NovikovError::LatticeMismatch);
        }
        let add = |a: &[Rational64], b: &[Rational64]| a.iter().zip(b).map(|(x, y)| x + y).collect();
        Ok(Exponent { lattice: self.lattice, constant: add(&self.constant, &other.constant), h: add(&self.h, &other.h) })
    }

    pub fn neg(&self) -> Exponent {
        Exponent {
            lattice: self.lattice,
            constant: self.constant.iter().map(|x| -x).collect(),
            h: self.h.iter().map(|x| -x).collect(),
        }
    }

    /// Writes `Σ qᵢ·eᵢ`, dropping unit coefficients.
    fn write_combination(out: &mut String, lattice: Lattice, coefs: &[Rational64]) {
        let mut first = true;
        for (i, q) in coefs.iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            let class = SphereClass { lattice, coefficients: lattice.basis(i) };
            let mag = q.abs();
            if q.is_negative() {
                out.push('-');
            } else if !first {
                out.push('+');
            }
            if mag != r(1) {
                let _ = write!(out, "{mag}*");
            }
            let _ = write!(out, "{class}");
            first = false;
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        Self::write_combination(&mut out, self.lattice, &self.constant);
        let nonzero: Vec<&Rational64> = self.h.iter().filter(|q| !q.is_zero()).collect();
        if !nonzero.is_empty() {
            if !out.is_empty() {
                out.push('+');
            }
            out.push_str("h*");
            if nonzero.len() == 1 && *nonzero[0] == r(1) {
                Self::write_combination(&mut out, self.lattice, &self.h);
            } else {
                out.push('[');
                Self::write_combination(&mut out, self.lattice, &self.h);
                out.push(']');
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}

/// A finite sum `Σ a·(symbol)·e^{exponent}` with integer coefficients, merged and sorted.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct NovikovElement {
    terms: BTreeMap<(Exponent, ClassSymbol), i64>,
}

impl NovikovElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(coef: i64, symbol: ClassSymbol, exponent: Exponent) -> Self {
        let mut e = Self::zero();
        e.add_term(coef, symbol, exponent);
        e
    }

    pub fn add_term(&mut self, coef: i64, symbol: ClassSymbol, exponent: Exponent) {
        let key = (exponent, symbol);
        let entry = self.terms.entry(key.clone()).or_insert(0);
        *entry += coef;
        if *entry == 0 {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &NovikovElement) -> NovikovElement {
        let mut out = self.clone();
        for ((e, s), c) in &other.terms {
            out.add_term(*c, s.clone(), e.clone());
        }
        out
    }

    pub fn neg(&self) -> NovikovElement {
        NovikovElement { terms: self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms as `(coefficient, symbol, exponent)`, sorted by exponent then symbol.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &ClassSymbol, &Exponent)> {
        self.terms.iter().map(|((e, s), c)| (*c, s, e))
    }

    /// The exponent lattice shared by all terms, if any.
    pub fn lattice(&self) -> Option<Lattice> {
        self.terms.keys().next().map(|(e, _)| e.lattice)
    }

    /// Applies `f` to every term, merging the results.
    pub fn map_terms<F>(&self, mut f: F) -> Result<NovikovElement, NovikovError>
    where
        F: FnMut(i64, &ClassSymbol, &Exponent) -> Result<(i64, ClassSymbol, Exponent), NovikovError>,
    {
        let mut out = NovikovElement::zero();
        for (c, s, e) in self.terms() {
            let (c2, s2, e2) = f(c, s, e)?;
            out.add_term(c2, s2, e2);
        }
        Ok(out)
    }
}

fn write_signed_symbol(out: &mut String, coef: i64, symbol: &ClassSymbol, first: bool, unit_visible: bool) {
    if coef < 0 {
        out.push('-');
    } else if !first {
        out.push('+');
    }
    let mag = coef.abs();
    let show_symbol = !symbol.is_unit() || (unit_visible && mag == 1);
    if mag != 1 {
        let _ = write!(out, "{mag}");
        if show_symbol {
            out.push('*');
        }
    }
    if show_symbol {
        let _ = write!(out, "{symbol}");
    }
}

impl fmt::Display for NovikovElement {
    /// Terms sharing an exponent are bracketed: `[(01)+(10)]e^{1/2*(10)}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut groups: Vec<(&Exponent, Vec<(i64, &ClassSymbol)>)> = Vec::new();
        for (c, s, e) in self.terms() {
            match groups.last_mut() {
                Some((last, members)) if *last == e => members.push((c, s)),
                _ => groups.push((e, vec![(c, s)])),
            }
        }
        let mut out = String::new();
        for (gi, (exp, members)) in groups.iter().enumerate() {
            let has_exp = !exp.is_zero();
            if members.len() == 1 {
                let (c, s) = members[0];
                write_signed_symbol(&mut out, c, s, gi == 0, !has_exp);
            } else {
                if gi > 0 {
                    out.push('+');
                }
                out.push('[');
                for (i, (c, s)) in members.iter().enumerate() {
                    write_signed_symbol(&mut out, *c, s, i == 0, true);
                }
                out.push(']');
            }
            if has_exp {
                let _ = write!(out, "e^{{{exp}}}");
            }
        }
        f.write_str(&out)
    }
}
