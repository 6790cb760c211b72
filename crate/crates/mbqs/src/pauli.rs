//! Pauli strings and Hamiltonians given as real linear combinations of them.

use std::fmt;
use std::str::FromStr;

use crate::error::HamiltonianError;

/// A tensor product of single-qubit Paulis over `n` qubits, encoded in the
/// usual symplectic form: qubit `q` carries X iff `x[q]`, Z iff `z[q]`,
/// Y iff both. Phases are not tracked here; a string is the observable
/// itself, signs live with the coefficients that multiply it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    x: Vec<bool>,
    z: Vec<bool>,
}

/// Single-qubit Pauli letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PauliAxis {
    I,
    X,
    Y,
    Z,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        PauliString { x: vec![false; n], z: vec![false; n] }
    }

    pub fn num_qubits(&self) -> usize {
        self.x.len()
    }

    pub fn axis(&self, q: usize) -> PauliAxis {
        match (self.x[q], self.z[q]) {
            (false, false) => PauliAxis::I,
            (true, false) => PauliAxis::X,
            (true, true) => PauliAxis::Y,
            (false, true) => PauliAxis::Z,
        }
    }

    pub fn set_axis(&mut self, q: usize, a: PauliAxis) {
        let (x, z) = match a {
            PauliAxis::I => (false, false),
            PauliAxis::X => (true, false),
            PauliAxis::Y => (true, true),
            PauliAxis::Z => (false, true),
        };
        self.x[q] = x;
        self.z[q] = z;
    }

    pub fn is_identity(&self) -> bool {
        self.support().next().is_none()
    }

    /// Qubits where the letter is not I, in index order.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_qubits()).filter(|&q| self.x[q] || self.z[q])
    }

    pub fn weight(&self) -> usize {
        self.support().count()
    }

    /// Whether two strings commute as operators, via the symplectic form:
    /// they anticommute iff the number of positions where one string's X
    /// part meets the other's Z part is odd in total.
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        assert_eq!(self.num_qubits(), other.num_qubits());
        let mut parity = false;
        for q in 0..self.num_qubits() {
            parity ^= (self.x[q] && other.z[q]) != (self.z[q] && other.x[q]);
        }
        !parity
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.num_qubits() {
            let ch = match self.axis(q) {
                PauliAxis::I => 'I',
                PauliAxis::X => 'X',
                PauliAxis::Y => 'Y',
                PauliAxis::Z => 'Z',
            };
            write!(f, "{ch}")?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = char;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = PauliString::identity(s.len());
        for (q, ch) in s.chars().enumerate() {
            let a = match ch {
                'I' => PauliAxis::I,
                'X' => PauliAxis::X,
                'Y' => PauliAxis::Y,
                'Z' => PauliAxis::Z,
                other => return Err(other),
            };
            p.set_axis(q, a);
        }
        Ok(p)
    }
}

/// One weighted term of a Hamiltonian.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub index: usize,
    pub coefficient: f64,
    pub string: PauliString,
}

/// A Hamiltonian `H = sum_s c_s P_s` over a fixed qubit register.
#[derive(Clone, Debug, PartialEq)]
pub struct Hamiltonian {
    num_qubits: usize,
    terms: Vec<Term>,
}

impl Hamiltonian {
    pub fn new(num_qubits: usize, terms: Vec<Term>) -> Self {
        for t in &terms {
            assert_eq!(t.string.num_qubits(), num_qubits);
        }
        Hamiltonian { num_qubits, terms }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Parses the whitespace-separated line format
    /// `<index> <coefficient> <pauli string>`, one term per line.
    /// Blank lines and lines starting with `#` are skipped. Term indices
    /// must be `0..n` in order; all strings must share one length.
    pub fn parse(text: &str) -> Result<Self, HamiltonianError> {
        let mut terms: Vec<Term> = Vec::new();
        let mut num_qubits = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let body = raw.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let mut fields = body.split_whitespace();
            let (Some(idx), Some(coeff), Some(string), None) =
                (fields.next(), fields.next(), fields.next(), fields.next())
            else {
                return Err(HamiltonianError::Malformed { line, text: body.into() });
            };
            let index: usize = idx
                .parse()
                .map_err(|_| HamiltonianError::Malformed { line, text: body.into() })?;
            let coefficient: f64 = coeff
                .parse()
                .map_err(|_| HamiltonianError::Malformed { line, text: body.into() })?;
            let string: PauliString = string
                .parse()
                .map_err(|_| HamiltonianError::BadString { line, text: string.into() })?;
            if index != terms.len() {
                return Err(HamiltonianError::IndexOrder { line, found: index, expected: terms.len() });
            }
            let n = *num_qubits.get_or_insert(string.num_qubits());
            if string.num_qubits() != n {
                return Err(HamiltonianError::LengthMismatch {
                    line,
                    found: string.num_qubits(),
                    expected: n,
                });
            }
            terms.push(Term { index, coefficient, string });
        }
        match num_qubits {
            Some(n) => Ok(Hamiltonian { num_qubits: n, terms }),
            None => Err(HamiltonianError::Empty),
        }
    }

    /// Renders back to the line format accepted by [`Hamiltonian::parse`].
    pub fn render(&self) -> String {
        let mut out = String::new();
        for t in &self.terms {
            out.push_str(&format!("{} {} {}\n", t.index, t.coefficient, t.string));
        }
        out
    }
}

/// Magnitude of the dominant first-order Trotter error term: the largest
/// `2*|c_s * c_t|` over anticommuting pairs `(s, t)`. For anticommuting
/// Pauli words the commutator `[c_s P_s, c_t P_t] = 2 c_s c_t P_s P_t` has
/// spectral norm `2|c_s c_t|`; commuting pairs contribute nothing.
pub fn trotter_leading_error_term(h: &Hamiltonian) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in h.terms().iter().enumerate() {
        for b in &h.terms()[i + 1..] {
            if !a.string.commutes_with(&b.string) {
                worst = worst.max(2.0 * (a.coefficient * b.coefficient).abs());
            }
        }
    }
    worst
}
