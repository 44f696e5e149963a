use num_rational::Rational64;
use num_traits::One;

use super::element::{ClassSymbol, Exponent, Lattice, NovikovElement, SphereClass};
use super::NovikovError;

/// Rewrites typographic variants into the plain syntax.
fn normalize(input: &str) -> String {
    let mut s = input.replace('\u{2212}', "-").replace('½', "1/2").replace("\\left", "").replace("\\right", "");
    s = s.replace("\\overline", "").replace("\\cdot", "*");
    while let Some(i) = s.find("\\frac{") {
        let rest = &s[i + 6..];
        let Some(a_end) = rest.find('}') else { break };
        let num = rest[..a_end].to_string();
        let after = &rest[a_end + 1..];
        let Some(stripped) = after.strip_prefix('{') else { break };
        let Some(b_end) = stripped.find('}') else { break };
        let den = stripped[..b_end].to_string();
        let tail = stripped[b_end + 1..].to_string();
        s = format!("{}{}/{}{}", &s[..i], num, den, tail);
    }
    s.chars().filter(|c| !c.is_whitespace() && !matches!(c, '\u{0305}' | '\u{0304}' | '\u{203E}')).collect()
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

type PResult<T> = Result<T, NovikovError>;

impl Parser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, k: usize) -> Option<char> {
        self.chars.get(self.pos + k).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn error<T>(&self, message: &str) -> PResult<T> {
        let near: String = self.chars.iter().skip(self.pos).take(12).collect();
        Err(NovikovError::Parse { position: self.pos, message: format!("{message} near `{near}`") })
    }

    fn expect(&mut self, c: char) -> PResult<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.error(&format!("expected `{c}`"))
        }
    }

    fn sign(&mut self) -> i64 {
        let mut s = 1;
        loop {
            if self.eat('-') {
                s = -s;
            } else if !self.eat('+') {
                return s;
            }
        }
    }

    fn integer(&mut self) -> Option<i64> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        self.chars[start..self.pos].iter().collect::<String>().parse().ok()
    }

    fn rational(&mut self) -> PResult<Option<Rational64>> {
        let Some(num) = self.integer() else { return Ok(None) };
        if self.peek() == Some('/') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
            let den = self.integer().expect("digit checked");
            if den == 0 {
                return self.error("zero denominator");
            }
            return Ok(Some(Rational64::new(num, den)));
        }
        Ok(Some(Rational64::from_integer(num)))
    }

    /// `(d₁d₂…)` with single digits, or `(i,j,…)` with signed integers; braces are ignored.
    fn parenthesized_digits(&mut self) -> PResult<Vec<i64>> {
        self.expect('(')?;
        let mut raw = String::new();
        while let Some(c) = self.peek() {
            if c == ')' {
                break;
            }
            if c != '{' && c != '}' {
                raw.push(c);
            }
            self.pos += 1;
        }
        self.expect(')')?;
        let values: Option<Vec<i64>> = if raw.contains(',') {
            raw.split(',').map(|t| t.parse().ok()).collect()
        } else {
            raw.chars().map(|c| c.to_digit(10).map(i64::from)).collect()
        };
        match values {
            Some(v) => Ok(v),
            None => self.error("class must list digits"),
        }
    }

    fn class(&mut self) -> PResult<SphereClass> {
        let at = self.pos;
        let v = self.parenthesized_digits()?;
        match Lattice::from_rank(v.len()) {
            Some(l) => SphereClass::new(l, v),
            None => {
                self.pos = at;
                self.error("class must have 2 or 4 entries")
            }
        }
    }

    fn symbol(&mut self) -> PResult<ClassSymbol> {
        let at = self.pos;
        let v = self.parenthesized_digits()?;
        if !(v.len() == 2 || v.len() == 4) || v.iter().any(|&d| !(0..=1).contains(&d)) {
            self.pos = at;
            return self.error("symbol must have 2 or 4 binary digits");
        }
        let digits: Vec<u8> = v.iter().map(|&d| d as u8).collect();
        ClassSymbol::new(&digits)
    }

    fn optional_coefficient(&mut self) -> PResult<Option<Rational64>> {
        let q = self.rational()?;
        if q.is_some() {
            self.eat('*');
        }
        Ok(q)
    }

    /// One summand of an exponent, returned as `(class part, h part)` contributions.
    fn exponent_term(&mut self, allow_h: bool, acc: &mut Vec<(Rational64, bool, SphereClass)>) -> PResult<()> {
        let sign = Rational64::from_integer(self.sign());
        let q = self.optional_coefficient()?.unwrap_or_else(Rational64::one) * sign;
        if allow_h && self.eat('h') {
            self.eat('*');
            let q2 = self.optional_coefficient()?.unwrap_or_else(Rational64::one);
            if self.eat('[') {
                let mut inner = Vec::new();
                self.exponent_sum(false, &mut inner, ']')?;
                self.expect(']')?;
                acc.extend(inner.into_iter().map(|(c, _, cl)| (c * q * q2, true, cl)));
            } else {
                let cl = self.class()?;
                acc.push((q * q2, true, cl));
            }
            return Ok(());
        }
        if self.eat('[') {
            let mut inner = Vec::new();
            self.exponent_sum(allow_h, &mut inner, ']')?;
            self.expect(']')?;
            acc.extend(inner.into_iter().map(|(c, h, cl)| (c * q, h, cl)));
            return Ok(());
        }
        let cl = self.class()?;
        acc.push((q, false, cl));
        Ok(())
    }

    fn exponent_sum(&mut self, allow_h: bool, acc: &mut Vec<(Rational64, bool, SphereClass)>, close: char) -> PResult<()> {
        self.exponent_term(allow_h, acc)?;
        while matches!(self.peek(), Some('+' | '-')) {
            self.exponent_term(allow_h, acc)?;
        }
        if self.peek() != Some(close) {
            return self.error("unexpected character in exponent");
        }
        Ok(())
    }

    fn exponent(&mut self) -> PResult<Exponent> {
        self.expect('e')?;
        self.expect('^')?;
        self.expect('{')?;
        let mut acc = Vec::new();
        if self.peek() == Some('0') && self.peek_at(1) == Some('}') {
            self.pos += 1;
        } else {
            self.exponent_sum(true, &mut acc, '}')?;
        }
        self.expect('}')?;
        let Some(lattice) = acc.first().map(|(_, _, c)| c.lattice) else {
            return Ok(Exponent::zero(Lattice::X));
        };
        let mut e = Exponent::zero(lattice);
        for (q, is_h, cl) in acc {
            if cl.lattice != lattice {
                return Err(NovikovError::LatticeMismatch);
            }
            let part = if is_h { Exponent::of_h_class(q, &cl) } else { Exponent::of_class(q, &cl) };
            e = e.checked_add(&part)?;
        }
        Ok(e)
    }

    /// `[±] [k] (symbol | [symbols]) [e^{…}]`.
    fn group(&mut self, out: &mut Vec<(i64, ClassSymbol, Option<Exponent>)>) -> PResult<()> {
        let sign = self.sign();
        let start = self.pos;
        let coef = match self.integer() {
            Some(k) => {
                self.eat('*');
                k
            }
            None => 1,
        } * sign;
        let mut members = Vec::new();
        if self.eat('[') {
            loop {
                let s = self.sign();
                let k = match self.integer() {
                    Some(k) => {
                        self.eat('*');
                        k
                    }
                    None => 1,
                };
                let sym = if self.peek() == Some('(') { self.symbol()? } else { ClassSymbol::unit() };
                members.push((s * k, sym));
                if !matches!(self.peek(), Some('+' | '-')) {
                    break;
                }
            }
            self.expect(']')?;
        } else if self.peek() == Some('(') {
            members.push((1, self.symbol()?));
        } else if self.peek() == Some('e') || self.pos > start {
            members.push((1, ClassSymbol::unit()));
        } else {
            return self.error("expected a term");
        }
        let exponent = if self.peek() == Some('e') { Some(self.exponent()?) } else { None };
        for (k, sym) in members {
            out.push((coef * k, sym, exponent.clone()));
        }
        Ok(())
    }
}

/// Parses the element syntax, e.g. `[(011̄1̄)-(111̄0̄)]e^{½(1000)+h[(0001)+(1000)]}`.
///
/// The ring is read off the exponents, then the symbols; text such as `-1`
/// that names neither is taken to live over `X`.
pub fn parse_element(input: &str) -> Result<NovikovElement, NovikovError> {
    parse_with(input, None)
}

/// As [`parse_element`], with the exponent ring fixed in advance.
pub fn parse_element_in(input: &str, ring: Lattice) -> Result<NovikovElement, NovikovError> {
    parse_with(input, Some(ring))
}

fn parse_with(input: &str, ring: Option<Lattice>) -> Result<NovikovElement, NovikovError> {
    let mut p = Parser { chars: normalize(input).chars().collect(), pos: 0 };
    let mut raw = Vec::new();
    if p.peek().is_some() {
        p.group(&mut raw)?;
        while matches!(p.peek(), Some('+' | '-')) {
            p.group(&mut raw)?;
        }
        if p.peek().is_some() {
            return p.error("trailing input");
        }
    }
    // symbols and exponents may sit on different lattices, as after δ₂
    let lattice = ring
        .or_else(|| raw.iter().find_map(|(_, _, e)| e.as_ref().filter(|e| !e.is_zero()).map(|e| e.lattice)))
        .or_else(|| raw.iter().find_map(|(_, s, _)| s.lattice()))
        .unwrap_or(Lattice::X);
    let mut out = NovikovElement::zero();
    for (k, sym, e) in raw {
        let e = match e {
            Some(e) if !e.is_zero() => e,
            _ => Exponent::zero(lattice),
        };
        if e.lattice != lattice {
            return Err(NovikovError::LatticeMismatch);
        }
        out.add_term(k, sym, e);
    }
    Ok(out)
}

/// Parses a lone exponent such as `1/2*(10)+h*[(10)-(01)]`.
pub fn parse_exponent(input: &str) -> Result<Exponent, NovikovError> {
    let wrapped = format!("e^{{{}}}", normalize(input));
    let mut p = Parser { chars: wrapped.chars().collect(), pos: 0 };
    let e = p.exponent()?;
    if p.peek().is_some() {
        return p.error("trailing input");
    }
    Ok(e)
}

impl std::str::FromStr for NovikovElement {
    type Err = NovikovError;
    fn from_str(s: &str) -> Result<Self, NovikovError> {
        parse_element(s)
    }
}

impl std::str::FromStr for Exponent {
    type Err = NovikovError;
    fn from_str(s: &str) -> Result<Self, NovikovError> {
        parse_exponent(s)
    }
}

