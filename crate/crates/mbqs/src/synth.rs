//! Circuit synthesis for Pauli string exponentials exp(-i c P).
//!
//! Each X letter is rotated into the Z basis by H, each Y letter by the
//! composition Z S H (whose matrix V satisfies V Y V^dag = Z), the
//! support parity is accumulated onto its last qubit by a CNOT
//! staircase, a single RZ(2c) applies the phase pair, and everything is
//! undone in mirror order. The identity string contributes only the
//! global phase exp(-i c). RZ(theta) denotes exp(-i theta Z / 2), so the
//! rotation angle is the symbolic expression 2*c[s].

use crate::angle::AngleExpr;
use crate::circuit::{Circuit, Gate};
use crate::grouping::SubsetPartition;
use crate::pauli::{Hamiltonian, PauliAxis, PauliString};

/// Circuit for exp(-i c[sym] P) on the string's full register width.
pub fn synth_string_exponential(p: &PauliString, sym: usize) -> Circuit {
    let mut c = Circuit::new(p.num_qubits());
    let support: Vec<usize> = p.support().collect();
    if support.is_empty() {
        c.add_phase(&AngleExpr::coeff_term(sym, -1.0));
        return c;
    }

    let push = |c: &mut Circuit, g: Gate| c.push(g).expect("synthesis stays in range");
    // basis changes into Z
    for &q in &support {
        match p.axis(q) {
            PauliAxis::X => push(&mut c, Gate::H(q)),
            PauliAxis::Y => {
                push(&mut c, Gate::Z(q));
                push(&mut c, Gate::S(q));
                push(&mut c, Gate::H(q));
            }
            PauliAxis::Z => {}
            PauliAxis::I => unreachable!("support excludes identity"),
        }
    }
    // parity staircase onto the last support qubit
    for w in support.windows(2) {
        push(&mut c, Gate::Cnot { control: w[0], target: w[1] });
    }
    push(&mut c, Gate::Rz {
        qubit: *support.last().unwrap(),
        angle: AngleExpr::coeff_term(sym, 2.0),
    });
    for w in support.windows(2).rev() {
        push(&mut c, Gate::Cnot { control: w[0], target: w[1] });
    }
    // undo the basis changes
    for &q in &support {
        match p.axis(q) {
            PauliAxis::X => push(&mut c, Gate::H(q)),
            PauliAxis::Y => {
                push(&mut c, Gate::H(q));
                push(&mut c, Gate::S(q));
            }
            PauliAxis::Z => {}
            PauliAxis::I => unreachable!(),
        }
    }
    c
}

/// Circuit for an explicit list of term indices: the product of their
/// exponentials in the order given, each keyed by its own coefficient
/// symbol.
pub fn synth_terms_circuit(h: &Hamiltonian, terms: &[usize]) -> Circuit {
    let mut c = Circuit::new(h.num_qubits());
    for &t in terms {
        let piece = synth_string_exponential(&h.terms()[t].string, t);
        c.extend(&piece).expect("same width");
    }
    c
}

/// Circuit for one subset of a partition: the product of the member
/// exponentials in ascending term order, each keyed by its own
/// coefficient symbol.
pub fn synth_subset_circuit(
    h: &Hamiltonian,
    partition: &SubsetPartition,
    subset: usize,
) -> Circuit {
    synth_terms_circuit(h, &partition.subsets[subset])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grouping::{group, Strategy};

    #[test]
    fn zz_string_gives_the_textbook_staircase() {
        let p: PauliString = "ZZ".parse().unwrap();
        let c = synth_string_exponential(&p, 7);
        assert_eq!(
            c.gates(),
            &[
                Gate::Cnot { control: 0, target: 1 },
                Gate::Rz { qubit: 1, angle: AngleExpr::coeff_term(7, 2.0) },
                Gate::Cnot { control: 0, target: 1 },
            ]
        );
        assert!(c.global_phase().is_zero());
    }

    #[test]
    fn identity_string_is_pure_phase() {
        let p: PauliString = "III".parse().unwrap();
        let c = synth_string_exponential(&p, 4);
        assert!(c.gates().is_empty());
        assert_eq!(c.global_phase(), &AngleExpr::coeff_term(4, -1.0));
    }

    #[test]
    fn basis_changes_wrap_the_staircase() {
        let p: PauliString = "XIY".parse().unwrap();
        let c = synth_string_exponential(&p, 0);
        assert_eq!(
            c.gates(),
            &[
                Gate::H(0),
                Gate::Z(2),
                Gate::S(2),
                Gate::H(2),
                Gate::Cnot { control: 0, target: 2 },
                Gate::Rz { qubit: 2, angle: AngleExpr::coeff_term(0, 2.0) },
                Gate::Cnot { control: 0, target: 2 },
                Gate::H(0),
                Gate::H(2),
                Gate::S(2),
            ]
        );
        // never a SWAP
        assert!(!c.gates().iter().any(|g| matches!(g, Gate::Swap(..))));
    }

    #[test]
    fn subset_circuits_follow_term_order() {
        let h = Hamiltonian::parse("0 0.5 ZI\n1 0.25 IZ\n2 0.125 ZZ\n").unwrap();
        let part = group(&h, Strategy::Full);
        let c = synth_subset_circuit(&h, &part, 0);
        let rz_syms: Vec<usize> = c
            .gates()
            .iter()
            .filter_map(|g| match g {
                Gate::Rz { angle, .. } => angle.symbols().next(),
                _ => None,
            })
            .collect();
        assert_eq!(rz_syms, vec![0, 1, 2]);
        assert_eq!(c.symbols(), vec![0, 1, 2]);
    }
}
