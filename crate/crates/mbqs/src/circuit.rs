//! Gate-list circuit IR over the fixed set {CNOT, S, H, X, Y, Z, SWAP,
//! RZ(angle)} plus a tracked global phase, with greedy depth computation
//! and a conservative peephole optimizer.

use crate::angle::AngleExpr;
use crate::error::CircuitError;

#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    H(usize),
    S(usize),
    X(usize),
    Y(usize),
    Z(usize),
    Cnot { control: usize, target: usize },
    Swap(usize, usize),
    Rz { qubit: usize, angle: AngleExpr },
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::H(q) | Gate::S(q) | Gate::X(q) | Gate::Y(q) | Gate::Z(q) => vec![*q],
            Gate::Rz { qubit, .. } => vec![*qubit],
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::Swap(a, b) => vec![*a, *b],
        }
    }

    /// Composing the gate with itself gives the identity (up to phase).
    fn self_inverse(&self) -> bool {
        !matches!(self, Gate::S(_) | Gate::Rz { .. })
    }

    /// Whether two gates denote the same unitary, treating SWAP operands
    /// as unordered.
    fn same_unitary(&self, other: &Gate) -> bool {
        match (self, other) {
            (Gate::Swap(a1, b1), Gate::Swap(a2, b2)) => {
                (a1, b1) == (a2, b2) || (a1, b1) == (b2, a2)
            }
            _ => self == other,
        }
    }
}

/// Ordered gate list on `width` qubits; the represented operator is the
/// gate product in execution order times `exp(i * global_phase)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    width: usize,
    gates: Vec<Gate>,
    global_phase: AngleExpr,
}

impl Circuit {
    pub fn new(width: usize) -> Self {
        Circuit { width, gates: Vec::new(), global_phase: AngleExpr::zero() }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn global_phase(&self) -> &AngleExpr {
        &self.global_phase
    }

    pub fn add_phase(&mut self, phase: &AngleExpr) {
        self.global_phase = self.global_phase.add(phase);
    }

    pub fn push(&mut self, gate: Gate) -> Result<(), CircuitError> {
        let index = self.gates.len();
        let qs = gate.qubits();
        for &q in &qs {
            if q >= self.width {
                return Err(CircuitError::QubitRange { index, qubit: q, size: self.width });
            }
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(CircuitError::RepeatedQubit { index, qubit: qs[0] });
        }
        self.gates.push(gate);
        Ok(())
    }

    /// Appends another circuit of the same width, gate for gate, adding
    /// its global phase.
    pub fn extend(&mut self, other: &Circuit) -> Result<(), CircuitError> {
        assert_eq!(self.width, other.width, "circuit widths differ");
        for g in &other.gates {
            self.push(g.clone())?;
        }
        self.add_phase(&other.global_phase);
        Ok(())
    }

    /// Greedy as-soon-as-possible layering depth; the empty circuit has
    /// depth 0.
    pub fn depth(&self) -> usize {
        let mut per_qubit = vec![0usize; self.width];
        let mut depth = 0usize;
        for g in &self.gates {
            let qs = g.qubits();
            let d = qs.iter().map(|&q| per_qubit[q]).max().unwrap_or(0) + 1;
            for &q in &qs {
                per_qubit[q] = d;
            }
            depth = depth.max(d);
        }
        depth
    }

    pub fn symbols(&self) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::new();
        for g in &self.gates {
            if let Gate::Rz { angle, .. } = g {
                out.extend(angle.symbols());
            }
        }
        out.extend(self.global_phase.symbols());
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Optimization level 0: the circuit unchanged.
pub fn optimize_level0(c: &Circuit) -> Circuit {
    c.clone()
}

/// Optimization level 1: a peephole pass that cancels adjacent
/// self-inverse pairs (H H, X X, CNOT CNOT on identical operands, and
/// such), merges adjacent RZ rotations on the same qubit, and drops
/// syntactically zero rotations. Cancellations re-expose earlier gates,
/// and the pass repeats until it reaches a fixpoint. Every rewrite is an
/// exact unitary identity, so the represented operator (phase included)
/// is unchanged.
pub fn optimize_level1(c: &Circuit) -> Circuit {
    let mut gates = c.gates.clone();
    loop {
        let (next, changed) = sweep(&gates, c.width);
        gates = next;
        if !changed {
            break;
        }
    }
    let mut out = Circuit::new(c.width);
    for g in gates {
        out.push(g).expect("optimizer preserves operand validity");
    }
    out.add_phase(&c.global_phase);
    out
}

fn sweep(gates: &[Gate], width: usize) -> (Vec<Gate>, bool) {
    // kept[i] is None once a gate has been cancelled; last[q] stacks the
    // indices of live gates touching q so cancellations re-expose the
    // gate before them.
    let mut kept: Vec<Option<Gate>> = Vec::with_capacity(gates.len());
    let mut last: Vec<Vec<usize>> = vec![Vec::new(); width];
    let mut changed = false;

    for g in gates {
        let qs = g.qubits();
        if let Gate::Rz { qubit, angle } = g {
            if angle.is_zero() {
                changed = true;
                continue;
            }
            if let Some(&i) = last[*qubit].last() {
                if let Some(Gate::Rz { angle: prev, .. }) = &kept[i] {
                    let merged = prev.add(angle);
                    changed = true;
                    if merged.is_zero() {
                        kept[i] = None;
                        last[*qubit].pop();
                    } else {
                        kept[i] = Some(Gate::Rz { qubit: *qubit, angle: merged });
                    }
                    continue;
                }
            }
        } else if g.self_inverse() {
            let tops: Vec<Option<&usize>> = qs.iter().map(|&q| last[q].last()).collect();
            if let Some(&i) = tops[0] {
                let aligned = tops.iter().all(|t| *t == Some(&i));
                let same = kept[i].as_ref().is_some_and(|prev| prev.same_unitary(g));
                if aligned && same {
                    kept[i] = None;
                    for &q in &qs {
                        last[q].pop();
                    }
                    changed = true;
                    continue;
                }
            }
        }
        let idx = kept.len();
        kept.push(Some(g.clone()));
        for &q in &qs {
            last[q].push(idx);
        }
    }
    (kept.into_iter().flatten().collect(), changed)
}
