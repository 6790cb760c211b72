//! Circuit-to-pattern transpilation.
//!
//! Every gate expands into a fixed measurement fragment built from the
//! teleportation step J(a) = H RZ(a), realized on a wire ending at node
//! i by [E(i,j), M(i, -a), X(j, {i})] with a fresh node j:
//!
//!   H        = J(0)
//!   RZ(t)    = J(0) J(t)           (two steps, first measured at -t)
//!   S        = RZ(pi/2) with global phase pi/4
//!   Z        = RZ(pi) with global phase pi/2
//!   X        = H Z H
//!   Y        = Z then X with global phase pi/2
//!   CNOT     = the two-wire fragment below, leaving the control in place
//!   SWAP     = three CNOTs
//!
//! Fragments are emitted interleaved and the result is standardized,
//! signal-shifted, and simplified, so the output is a standard-form
//! pattern whose inputs are nodes 0..w-1 and whose outputs are the final
//! wire ends in qubit order. Global phases are dropped: patterns
//! implement their unitary up to phase.

use crate::angle::AngleExpr;
use crate::circuit::{Circuit, Gate};
use crate::error::PatternError;
use crate::pattern::{Command, Measurement, Pattern};

struct WireState {
    ends: Vec<usize>,
    next: usize,
    commands: Vec<Command>,
}

impl WireState {
    fn new(width: usize) -> Self {
        WireState { ends: (0..width).collect(), next: width, commands: Vec::new() }
    }

    fn fresh(&mut self) -> usize {
        let id = self.next;
        self.next += 1;
        self.commands.push(Command::AddNode(id));
        id
    }

    /// J(angle) on one wire: extend by a fresh node, measure the old
    /// end at -angle, correct the new end on that outcome.
    fn j_step(&mut self, qubit: usize, angle: &AngleExpr) {
        let old = self.ends[qubit];
        let new = self.fresh();
        self.commands.push(Command::Entangle(old, new));
        self.commands.push(Command::Measure(Measurement::xy(old, angle.neg())));
        self.commands.push(Command::CorrectX { node: new, domain: vec![old] });
        self.ends[qubit] = new;
    }

    fn rz(&mut self, qubit: usize, angle: &AngleExpr) {
        self.j_step(qubit, angle);
        self.j_step(qubit, &AngleExpr::zero());
    }

    fn cnot(&mut self, control: usize, target: usize) {
        let c = self.ends[control];
        let t = self.ends[target];
        let j1 = self.fresh();
        let j2 = self.fresh();
        self.commands.push(Command::Entangle(t, j1));
        self.commands.push(Command::Entangle(c, j1));
        self.commands.push(Command::Entangle(j1, j2));
        self.commands.push(Command::Measure(Measurement::xy(t, AngleExpr::zero())));
        self.commands.push(Command::Measure(Measurement::xy(j1, AngleExpr::zero())));
        self.commands.push(Command::CorrectX { node: j2, domain: vec![j1] });
        self.commands.push(Command::CorrectZ { node: j2, domain: vec![t] });
        self.commands.push(Command::CorrectZ { node: c, domain: vec![t] });
        self.ends[target] = j2;
    }

    fn gate(&mut self, g: &Gate) {
        match g {
            Gate::H(q) => self.j_step(*q, &AngleExpr::zero()),
            Gate::Rz { qubit, angle } => self.rz(*qubit, angle),
            Gate::S(q) => self.rz(*q, &AngleExpr::pi_times(1, 2)),
            Gate::Z(q) => self.rz(*q, &AngleExpr::pi_times(1, 1)),
            Gate::X(q) => {
                self.j_step(*q, &AngleExpr::zero());
                self.rz(*q, &AngleExpr::pi_times(1, 1));
                self.j_step(*q, &AngleExpr::zero());
            }
            Gate::Y(q) => {
                self.rz(*q, &AngleExpr::pi_times(1, 1));
                self.j_step(*q, &AngleExpr::zero());
                self.rz(*q, &AngleExpr::pi_times(1, 1));
                self.j_step(*q, &AngleExpr::zero());
            }
            Gate::Cnot { control, target } => self.cnot(*control, *target),
            Gate::Swap(a, b) => {
                self.cnot(*a, *b);
                self.cnot(*b, *a);
                self.cnot(*a, *b);
            }
        }
    }
}

/// Transpiles a circuit into a standard-form, signal-shifted pattern.
/// Inputs are nodes 0..width-1; outputs are the final wire ends in qubit
/// order. The pattern acts as the circuit's unitary up to global phase.
pub fn circuit_to_pattern(c: &Circuit) -> Result<Pattern, PatternError> {
    let mut w = WireState::new(c.width());
    for g in c.gates() {
        w.gate(g);
    }
    let inputs: Vec<usize> = (0..c.width()).collect();
    let p = Pattern::new(inputs, w.ends.clone(), w.commands)?;
    Ok(p.standardize()?.shift_signals().simplify())
}
