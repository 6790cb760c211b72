//! Dense-matrix oracle shared by the integration suites.
//!
//! Everything here is first-principles arithmetic: 2x2 Paulis, Kronecker
//! products, and the closed form exp(-i c P) = cos(c) I - i sin(c) P.
//! None of the library's gate fragments or pattern machinery is reused,
//! so agreement with these matrices is an independent check. Qubit 0 is
//! the most significant amplitude-index bit, matching the simulator.

#![allow(dead_code)]

use mbqs::{Hamiltonian, PauliAxis, PauliString, StateVector};
use num_complex::Complex64;

pub type Matrix = Vec<Vec<Complex64>>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(dim: usize) -> Matrix {
    let mut m = vec![vec![c(0.0, 0.0); dim]; dim];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = c(1.0, 0.0);
    }
    m
}

pub fn pauli_matrix(axis: PauliAxis) -> Matrix {
    match axis {
        PauliAxis::I => identity(2),
        PauliAxis::X => vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]],
        PauliAxis::Y => vec![vec![c(0.0, 0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]],
        PauliAxis::Z => vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(-1.0, 0.0)]],
    }
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ra, ca) = (a.len(), a[0].len());
    let (rb, cb) = (b.len(), b[0].len());
    let mut m = vec![vec![c(0.0, 0.0); ca * cb]; ra * rb];
    for i in 0..ra {
        for j in 0..ca {
            for k in 0..rb {
                for l in 0..cb {
                    m[i * rb + k][j * cb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    m
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let (ra, inner, cb) = (a.len(), b.len(), b[0].len());
    assert_eq!(a[0].len(), inner);
    let mut m = vec![vec![c(0.0, 0.0); cb]; ra];
    for i in 0..ra {
        for (k, bk) in b.iter().enumerate() {
            let aik = a[i][k];
            for j in 0..cb {
                m[i][j] += aik * bk[j];
            }
        }
    }
    m
}

/// Kronecker product of the string's letters, qubit 0 leftmost.
pub fn string_matrix(p: &PauliString) -> Matrix {
    let mut m = identity(1);
    for q in 0..p.num_qubits() {
        m = kron(&m, &pauli_matrix(p.axis(q)));
    }
    m
}

/// exp(-i c P) for a Pauli string P, via cos(c) I - i sin(c) P.
pub fn exp_string(p: &PauliString, coeff: f64) -> Matrix {
    let dim = 1 << p.num_qubits();
    let pm = string_matrix(p);
    let mut m = identity(dim);
    let (cos, sin) = (coeff.cos(), coeff.sin());
    for i in 0..dim {
        for j in 0..dim {
            m[i][j] = m[i][j] * cos - c(0.0, 1.0) * sin * pm[i][j];
        }
    }
    m
}

/// One first-order product step: exp(-i c_k P_k) applied in the order
/// listed, so the first index acts on the state first.
pub fn ordered_product(h: &Hamiltonian, order: &[usize]) -> Matrix {
    let dim = 1 << h.num_qubits();
    let mut m = identity(dim);
    for &k in order {
        let term = &h.terms()[k];
        m = matmul(&exp_string(&term.string, term.coefficient), &m);
    }
    m
}

pub fn apply(m: &Matrix, v: &StateVector) -> StateVector {
    let amps = v.amps();
    assert_eq!(m.len(), amps.len());
    let out = m
        .iter()
        .map(|row| row.iter().zip(amps).map(|(mij, aj)| mij * aj).sum())
        .collect();
    StateVector::from_amps(v.num_qubits(), out).expect("square matrix keeps dimensions")
}
