//! Symbolic angle expressions.
//!
//! Rotation and measurement angles are linear forms
//! `r*pi + f + sum_s a_s * c[s]` where `r` is rational, `f` and the
//! multipliers `a_s` are floats, and `c[s]` refers to the Hamiltonian
//! coefficient with term index `s`. Keeping angles symbolic lets one
//! library serve any coefficient binding; a concrete binding is applied
//! only at simulation time.
//!
//! Text form (used in pattern and circuit files):
//!
//! ```text
//! angle := term (" + " term)*
//! term  := [-]pi | [-]pi/<int> | <float> | <float> * c[<int>]
//! ```
//!
//! Zero prints as `0`. Floats print in shortest round-trip form, except
//! that integral values keep one decimal (`-2.0`), matching the library
//! files in the wild.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;

use crate::error::AngleParseError;

pub const PI: f64 = std::f64::consts::PI;

/// Linear angle form `pi_part*pi + float_part + sum a_s*c[s]`, kept canonical:
/// zero multipliers are dropped and `-0.0` is normalized to `0.0`.
#[derive(Clone, Debug, PartialEq)]
pub struct AngleExpr {
    pi_part: Rational64,
    float_part: f64,
    terms: BTreeMap<usize, f64>,
}

impl AngleExpr {
    pub fn zero() -> Self {
        AngleExpr { pi_part: Rational64::new(0, 1), float_part: 0.0, terms: BTreeMap::new() }
    }

    /// `num/den * pi`. Panics if `den == 0`.
    pub fn pi_times(num: i64, den: i64) -> Self {
        let mut e = Self::zero();
        e.pi_part = Rational64::new(num, den);
        e
    }

    pub fn from_float(v: f64) -> Self {
        let mut e = Self::zero();
        e.float_part = norm_zero(v);
        e
    }

    /// `mult * c[sym]`.
    pub fn coeff_term(sym: usize, mult: f64) -> Self {
        let mut e = Self::zero();
        if mult != 0.0 {
            e.terms.insert(sym, mult);
        }
        e
    }

    pub fn pi_part(&self) -> Rational64 {
        self.pi_part
    }

    pub fn float_part(&self) -> f64 {
        self.float_part
    }

    pub fn coeff_terms(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.terms.iter().map(|(&s, &a)| (s, a))
    }

    pub fn has_symbols(&self) -> bool {
        !self.terms.is_empty()
    }

    /// Term indices referenced by this expression.
    pub fn symbols(&self) -> impl Iterator<Item = usize> + '_ {
        self.terms.keys().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.pi_part == Rational64::new(0, 1) && self.float_part == 0.0 && self.terms.is_empty()
    }

    pub fn add(&self, other: &AngleExpr) -> AngleExpr {
        let mut out = self.clone();
        out.pi_part += other.pi_part;
        out.float_part = norm_zero(out.float_part + other.float_part);
        for (&s, &a) in &other.terms {
            let v = out.terms.entry(s).or_insert(0.0);
            *v += a;
            if *v == 0.0 {
                out.terms.remove(&s);
            }
        }
        out
    }

    pub fn neg(&self) -> AngleExpr {
        let mut out = self.clone();
        out.pi_part = -out.pi_part;
        out.float_part = norm_zero(-out.float_part);
        for a in out.terms.values_mut() {
            *a = -*a;
        }
        out
    }

    pub fn scale(&self, k: f64) -> AngleExpr {
        if k == 0.0 {
            return AngleExpr::zero();
        }
        let mut out = AngleExpr::zero();
        // A float scale of the rational part stays rational only for integral k.
        if k.fract() == 0.0 && k.abs() < 1e15 {
            out.pi_part = self.pi_part * Rational64::new(k as i64, 1);
        } else {
            out.float_part = norm_zero(self.pi_part.to_f64() * PI * k);
        }
        out.float_part = norm_zero(out.float_part + self.float_part * k);
        for (&s, &a) in &self.terms {
            if a * k != 0.0 {
                out.terms.insert(s, a * k);
            }
        }
        out
    }

    /// Adds `r * pi/2` (used when conjugating measurement bases).
    pub fn add_pi_halves(&self, r: i64) -> AngleExpr {
        self.add(&AngleExpr::pi_times(r, 2))
    }

    /// Reduces the constant part modulo `2*pi` so the rational coefficient
    /// lands in `(-1, 1]` and a pure-float constant lands in `(-pi, pi]`.
    /// Safe for measurement angles (the measured basis, including outcome
    /// labels, has period `2*pi`); not applied to rotation gates, where a
    /// `2*pi` shift flips the global phase.
    pub fn normalized_two_pi(&self) -> AngleExpr {
        let mut out = self.clone();
        let two = Rational64::new(2, 1);
        let mut r = out.pi_part;
        // r mod 2 in (-1, 1]
        let floor = (r / two).floor();
        r -= floor * two;
        if r > Rational64::new(1, 1) {
            r -= two;
        }
        out.pi_part = r;
        if out.float_part != 0.0 {
            let mut f = out.float_part.rem_euclid(2.0 * PI);
            if f > PI {
                f -= 2.0 * PI;
            }
            out.float_part = norm_zero(f);
        }
        out
    }

    pub fn eval(&self, binding: &Binding) -> Result<f64, usize> {
        let mut v = self.pi_part.to_f64() * PI + self.float_part;
        for (&s, &a) in &self.terms {
            match binding.get(s) {
                Some(c) => v += a * c,
                None => return Err(s),
            }
        }
        Ok(v)
    }

    /// Constant value, if the expression references no symbols.
    pub fn const_value(&self) -> Option<f64> {
        if self.terms.is_empty() {
            Some(self.pi_part.to_f64() * PI + self.float_part)
        } else {
            None
        }
    }

    /// Classifies a bound angle as a Pauli measurement angle. Symbolic
    /// expressions with coefficient terms are non-Pauli by definition.
    pub fn pauli_class(&self) -> Option<PauliClass> {
        let v = self.const_value()?;
        let halves = v / (PI / 2.0);
        let r = halves.round();
        if (halves - r).abs() > 1e-9 {
            return None;
        }
        let k = (r as i64).rem_euclid(4);
        Some(match k {
            0 | 2 => PauliClass::X,
            _ => PauliClass::Y,
        })
    }
}

/// Which Pauli axis a multiple-of-`pi/2` XY-plane angle measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PauliClass {
    /// Angle `0` or `pi`: the X axis (up to sign).
    X,
    /// Angle `+-pi/2`: the Y axis (up to sign).
    Y,
}

fn norm_zero(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

trait ToF64 {
    fn to_f64(&self) -> f64;
}

impl ToF64 for Rational64 {
    fn to_f64(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}

/// Formats a float in shortest round-trip form, keeping one decimal for
/// integral values so `-2.0` does not collapse to `-2`.
pub fn fmt_f64(v: f64) -> String {
    if v.fract() == 0.0 && v.is_finite() && v.abs() < 1e15 {
        format!("{v:.1}")
    } else {
        format!("{v}")
    }
}

impl fmt::Display for AngleExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        if self.pi_part != Rational64::new(0, 1) {
            parts.push(fmt_pi(self.pi_part));
        }
        if self.float_part != 0.0 {
            parts.push(fmt_f64(self.float_part));
        }
        for (&s, &a) in &self.terms {
            parts.push(format!("{} * c[{}]", fmt_f64(a), s));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

fn fmt_pi(r: Rational64) -> String {
    let (num, den) = (*r.numer(), *r.denom());
    match (num, den) {
        (1, 1) => "pi".into(),
        (-1, 1) => "-pi".into(),
        (1, d) => format!("pi/{d}"),
        (-1, d) => format!("-pi/{d}"),
        // Falls outside the simple grammar; print the numeric value instead.
        _ => fmt_f64(num as f64 / den as f64 * PI),
    }
}

impl FromStr for AngleExpr {
    type Err = AngleParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(AngleParseError::new(s, "empty angle"));
        }
        let mut out = AngleExpr::zero();
        for part in s.split(" + ") {
            out = out.add(&parse_term(part.trim()).ok_or_else(|| {
                AngleParseError::new(s, format!("bad angle term `{}`", part.trim()))
            })?);
        }
        Ok(out)
    }
}

fn parse_term(t: &str) -> Option<AngleExpr> {
    if let Some(rest) = t.strip_suffix(']') {
        // <float> * c[<int>]
        let (mult, sym) = rest.split_once(" * c[")?;
        let mult: f64 = mult.trim().parse().ok()?;
        let sym: usize = sym.trim().parse().ok()?;
        return Some(AngleExpr::coeff_term(sym, mult));
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, t),
    };
    let expr = if body == "pi" {
        AngleExpr::pi_times(1, 1)
    } else if let Some(den) = body.strip_prefix("pi/") {
        AngleExpr::pi_times(1, den.parse::<i64>().ok().filter(|&d| d > 0)?)
    } else {
        AngleExpr::from_float(body.parse().ok()?)
    };
    Some(if neg { expr.neg() } else { expr })
}

/// Maps coefficient symbols `c[s]` to concrete values.
#[derive(Clone, Debug, Default)]
pub struct Binding {
    values: BTreeMap<usize, f64>,
}

impl Binding {
    pub fn empty() -> Self {
        Binding::default()
    }

    pub fn new(values: BTreeMap<usize, f64>) -> Self {
        Binding { values }
    }

    pub fn set(&mut self, sym: usize, value: f64) {
        self.values.insert(sym, value);
    }

    pub fn get(&self, sym: usize) -> Option<f64> {
        self.values.get(&sym).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_matches_grammar() {
        assert_eq!(AngleExpr::zero().to_string(), "0");
        assert_eq!(AngleExpr::pi_times(1, 2).to_string(), "pi/2");
        assert_eq!(AngleExpr::pi_times(-1, 2).to_string(), "-pi/2");
        assert_eq!(AngleExpr::pi_times(1, 1).to_string(), "pi");
        assert_eq!(AngleExpr::coeff_term(32, -2.0).to_string(), "-2.0 * c[32]");
        assert_eq!(AngleExpr::from_float(0.011922474).to_string(), "0.011922474");
        let sum = AngleExpr::pi_times(1, 2).add(&AngleExpr::coeff_term(7, -3.0));
        assert_eq!(sum.to_string(), "pi/2 + -3.0 * c[7]");
    }

    #[test]
    fn parse_round_trips() {
        for s in ["0", "pi", "-pi", "pi/2", "-pi/2", "pi/4", "-2.0 * c[32]", "0.5", "-1.25", "pi/2 + -2.0 * c[3]"] {
            let e: AngleExpr = s.parse().unwrap();
            assert_eq!(e.to_string(), s, "round trip of `{s}`");
        }
    }

    #[test]
    fn parse_rejects_garbage() {
        for s in ["", "pi/0", "c[3]", "2 pi", "pi/2+pi"] {
            assert!(s.parse::<AngleExpr>().is_err(), "`{s}` should not parse");
        }
    }

    #[test]
    fn normalization_wraps_constants() {
        let e = AngleExpr::pi_times(3, 2).normalized_two_pi();
        assert_eq!(e, AngleExpr::pi_times(-1, 2));
        let e = AngleExpr::pi_times(2, 1).normalized_two_pi();
        assert!(e.is_zero());
        let e = AngleExpr::pi_times(-1, 1).normalized_two_pi();
        assert_eq!(e, AngleExpr::pi_times(1, 1));
        // symbolic part untouched
        let e = AngleExpr::pi_times(5, 2).add(&AngleExpr::coeff_term(0, 1.0));
        let n = e.normalized_two_pi();
        assert_eq!(n.pi_part(), Rational64::new(1, 2));
        assert!(n.has_symbols());
    }

    #[test]
    fn pauli_classification() {
        assert_eq!(AngleExpr::zero().pauli_class(), Some(PauliClass::X));
        assert_eq!(AngleExpr::pi_times(1, 1).pauli_class(), Some(PauliClass::X));
        assert_eq!(AngleExpr::pi_times(1, 2).pauli_class(), Some(PauliClass::Y));
        assert_eq!(AngleExpr::pi_times(-1, 2).pauli_class(), Some(PauliClass::Y));
        assert_eq!(AngleExpr::pi_times(1, 4).pauli_class(), None);
        assert_eq!(AngleExpr::coeff_term(3, 2.0).pauli_class(), None);
        // parsed float that happens to be pi/2 still classifies
        assert_eq!(AngleExpr::from_float(PI / 2.0).pauli_class(), Some(PauliClass::Y));
    }

    #[test]
    fn eval_uses_binding() {
        let e = AngleExpr::pi_times(1, 2).add(&AngleExpr::coeff_term(4, -2.0));
        let mut b = Binding::empty();
        assert_eq!(e.eval(&b), Err(4));
        b.set(4, 0.25);
        let v = e.eval(&b).unwrap();
        assert!((v - (PI / 2.0 - 0.5)).abs() < 1e-12);
    }
}
