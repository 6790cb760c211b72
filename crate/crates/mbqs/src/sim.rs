//! Dense statevector simulation of circuits and patterns.
//!
//! Qubit 0 is the most significant index bit, so the state of a register
//! read left to right matches the bit string of the amplitude index.
//!
//! Pattern simulation instantiates nodes lazily: a node enters the
//! register when it is first measured or acted on, at which point its
//! still-pending CZ edges are applied (instantiating partners as |+> as
//! needed). Peak register size therefore tracks the measurement frontier
//! rather than total pattern size. A naive mode instantiates everything
//! upfront as an independent cross-check for small patterns.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use crate::angle::Binding;
use crate::circuit::{Circuit, Gate};
use crate::error::SimError;
use crate::pattern::{Command, Pattern, Plane};

/// Hard cap on live register width; 2^26 amplitudes is the largest
/// state this crate will allocate.
const MAX_LIVE_QUBITS: usize = 26;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// |0...0> on n qubits.
    pub fn zero_state(n: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        StateVector { num_qubits: n, amps }
    }

    /// |+...+> on n qubits.
    pub fn plus_state(n: usize) -> Self {
        let amp = Complex64::new(1.0 / ((1usize << n) as f64).sqrt(), 0.0);
        StateVector { num_qubits: n, amps: vec![amp; 1 << n] }
    }

    pub fn from_amps(n: usize, amps: Vec<Complex64>) -> Result<Self, SimError> {
        if amps.len() != 1 << n {
            return Err(SimError::InputDim { found: amps.len(), expected: 1 << n });
        }
        Ok(StateVector { num_qubits: n, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 1e-300 {
            for a in &mut self.amps {
                *a /= n;
            }
        }
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        assert_eq!(self.num_qubits, other.num_qubits);
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    fn shift(&self, pos: usize) -> usize {
        self.num_qubits - 1 - pos
    }

    fn apply_1q(&mut self, pos: usize, m: &[[Complex64; 2]; 2]) {
        let bit = 1usize << self.shift(pos);
        for idx in 0..self.amps.len() {
            if idx & bit == 0 {
                let a0 = self.amps[idx];
                let a1 = self.amps[idx | bit];
                self.amps[idx] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[idx | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    fn apply_cz(&mut self, pa: usize, pb: usize) {
        let (ba, bb) = (1usize << self.shift(pa), 1usize << self.shift(pb));
        for (idx, amp) in self.amps.iter_mut().enumerate() {
            if idx & ba != 0 && idx & bb != 0 {
                *amp = -*amp;
            }
        }
    }

    fn apply_cnot(&mut self, pc: usize, pt: usize) {
        let (bc, bt) = (1usize << self.shift(pc), 1usize << self.shift(pt));
        for idx in 0..self.amps.len() {
            if idx & bc != 0 && idx & bt == 0 {
                self.amps.swap(idx, idx | bt);
            }
        }
    }

    fn apply_swap(&mut self, pa: usize, pb: usize) {
        let (ba, bb) = (1usize << self.shift(pa), 1usize << self.shift(pb));
        for idx in 0..self.amps.len() {
            if idx & ba != 0 && idx & bb == 0 {
                self.amps.swap(idx, (idx ^ ba) | bb);
            }
        }
    }

    fn scale(&mut self, c: Complex64) {
        for a in &mut self.amps {
            *a *= c;
        }
    }

    /// Appends one qubit in |+> as the least significant position.
    fn append_plus(&mut self) {
        let inv = Complex64::new(1.0 / 2.0f64.sqrt(), 0.0);
        let mut amps = Vec::with_capacity(self.amps.len() * 2);
        for a in &self.amps {
            amps.push(a * inv);
            amps.push(a * inv);
        }
        self.amps = amps;
        self.num_qubits += 1;
    }

    /// Projects qubit `pos` onto `basis` (un-normalized), removes it, and
    /// returns the branch probability. The caller renormalizes.
    fn project_remove(&mut self, pos: usize, basis: &[Complex64; 2]) -> f64 {
        let sh = self.shift(pos);
        let low_mask = (1usize << sh) - 1;
        let mut amps = Vec::with_capacity(self.amps.len() / 2);
        let (b0, b1) = (basis[0].conj(), basis[1].conj());
        for r in 0..self.amps.len() / 2 {
            let low = r & low_mask;
            let high = (r >> sh) << (sh + 1);
            let idx0 = high | low;
            amps.push(b0 * self.amps[idx0] + b1 * self.amps[idx0 | 1 << sh]);
        }
        let prob: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        self.amps = amps;
        self.num_qubits -= 1;
        prob
    }

    /// Probability of projecting qubit `pos` onto `basis` without
    /// changing the state.
    fn project_prob(&self, pos: usize, basis: &[Complex64; 2]) -> f64 {
        let sh = self.shift(pos);
        let low_mask = (1usize << sh) - 1;
        let (b0, b1) = (basis[0].conj(), basis[1].conj());
        let mut prob = 0.0;
        for r in 0..self.amps.len() / 2 {
            let low = r & low_mask;
            let high = (r >> sh) << (sh + 1);
            let idx0 = high | low;
            prob += (b0 * self.amps[idx0] + b1 * self.amps[idx0 | 1 << sh]).norm_sqr();
        }
        prob
    }

    /// Reorders qubits so that new position k holds old position perm[k].
    fn permute(&mut self, perm: &[usize]) {
        assert_eq!(perm.len(), self.num_qubits);
        let n = self.num_qubits;
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (old_idx, amp) in self.amps.iter().enumerate() {
            let mut new_idx = 0usize;
            for (k, &p) in perm.iter().enumerate() {
                let bit = (old_idx >> (n - 1 - p)) & 1;
                new_idx |= bit << (n - 1 - k);
            }
            out[new_idx] = *amp;
        }
        self.amps = out;
    }
}

/// |<a|b>|: unity exactly when the states agree up to global phase.
pub fn fidelity(a: &StateVector, b: &StateVector) -> f64 {
    a.inner(b).norm()
}

/// Bhattacharyya coefficient of the computational-basis distributions.
pub fn bhattacharyya(a: &StateVector, b: &StateVector) -> f64 {
    assert_eq!(a.num_qubits, b.num_qubits);
    a.amps.iter().zip(&b.amps).map(|(x, y)| x.norm() * y.norm()).sum()
}

/// Rotates `state` by a global phase so its dominant amplitude matches
/// `reference`'s phase at the same index, making amplitudes directly
/// comparable.
pub fn phase_align(reference: &StateVector, state: &StateVector) -> StateVector {
    let k = (0..state.amps.len())
        .max_by(|&i, &j| {
            (state.amps[i].norm() * reference.amps[i].norm())
                .total_cmp(&(state.amps[j].norm() * reference.amps[j].norm()))
        })
        .unwrap_or(0);
    let mut out = state.clone();
    if state.amps[k].norm() > 1e-12 && reference.amps[k].norm() > 1e-12 {
        let rot = (reference.amps[k] / reference.amps[k].norm())
            * (state.amps[k] / state.amps[k].norm()).conj();
        out.scale(rot);
    }
    out
}

/// Haar-like random state: complex normal amplitudes, normalized.
pub fn random_state<R: Rng>(n: usize, rng: &mut R) -> StateVector {
    let mut amps = Vec::with_capacity(1 << n);
    for _ in 0..1usize << n {
        let u1: f64 = rng.random::<f64>().max(1e-300);
        let u2: f64 = rng.random();
        let r = (-2.0 * u1.ln()).sqrt();
        amps.push(Complex64::new(r * (2.0 * PI * u2).cos(), r * (2.0 * PI * u2).sin()));
    }
    let mut sv = StateVector { num_qubits: n, amps };
    sv.normalize();
    sv
}

fn gate_matrix_h() -> [[Complex64; 2]; 2] {
    let inv = Complex64::new(1.0 / 2.0f64.sqrt(), 0.0);
    [[inv, inv], [inv, -inv]]
}

fn const_mat(entries: [[(f64, f64); 2]; 2]) -> [[Complex64; 2]; 2] {
    entries.map(|row| row.map(|(re, im)| Complex64::new(re, im)))
}

/// Applies a circuit to an input state and returns the output including
/// the global phase factor.
pub fn simulate_circuit(
    c: &Circuit,
    input: &StateVector,
    binding: &Binding,
) -> Result<StateVector, SimError> {
    if input.num_qubits != c.width() {
        return Err(SimError::InputDim { found: 1 << input.num_qubits, expected: 1 << c.width() });
    }
    if c.width() > MAX_LIVE_QUBITS {
        return Err(SimError::TooLarge { qubits: c.width(), limit: MAX_LIVE_QUBITS });
    }
    let mut sv = input.clone();
    let eval = |a: &crate::angle::AngleExpr| a.eval(binding).map_err(SimError::UnboundCoefficient);
    for g in c.gates() {
        match g {
            Gate::H(q) => sv.apply_1q(*q, &gate_matrix_h()),
            Gate::S(q) => sv.apply_1q(*q, &const_mat([[(1.0, 0.0), (0.0, 0.0)], [(0.0, 0.0), (0.0, 1.0)]])),
            Gate::X(q) => sv.apply_1q(*q, &const_mat([[(0.0, 0.0), (1.0, 0.0)], [(1.0, 0.0), (0.0, 0.0)]])),
            Gate::Y(q) => sv.apply_1q(*q, &const_mat([[(0.0, 0.0), (0.0, -1.0)], [(0.0, 1.0), (0.0, 0.0)]])),
            Gate::Z(q) => sv.apply_1q(*q, &const_mat([[(1.0, 0.0), (0.0, 0.0)], [(0.0, 0.0), (-1.0, 0.0)]])),
            Gate::Rz { qubit, angle } => {
                let t = eval(angle)?;
                let m = [
                    [Complex64::from_polar(1.0, -t / 2.0), Complex64::new(0.0, 0.0)],
                    [Complex64::new(0.0, 0.0), Complex64::from_polar(1.0, t / 2.0)],
                ];
                sv.apply_1q(*qubit, &m);
            }
            Gate::Cnot { control, target } => sv.apply_cnot(*control, *target),
            Gate::Swap(a, b) => sv.apply_swap(*a, *b),
        }
    }
    let phase = eval(c.global_phase())?;
    if phase != 0.0 {
        sv.scale(Complex64::from_polar(1.0, phase));
    }
    Ok(sv)
}

/// How measurement outcomes are chosen during pattern simulation.
#[derive(Clone, Debug)]
pub enum OutcomePolicy {
    /// Project every measurement onto outcome 0.
    AllZero,
    /// Sample each outcome from the Born rule with a seeded generator.
    Random(u64),
    /// Use the listed outcomes in measurement order.
    Fixed(Vec<bool>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeRecord {
    pub node: usize,
    pub outcome: bool,
    pub probability: f64,
}

/// Measurement basis vectors (outcome 0, outcome 1) for a plane and
/// angle. Outcome 0 is the +1 eigenvector of the measured observable:
/// cos(t) X + sin(t) Y for XY, cos(t) Z + sin(t) X for XZ, and
/// cos(t) Z + sin(t) Y for YZ.
fn basis_vectors(plane: Plane, theta: f64) -> ([Complex64; 2], [Complex64; 2]) {
    let plus = |t: f64| -> [Complex64; 2] {
        match plane {
            Plane::XY => {
                let inv = 1.0 / 2.0f64.sqrt();
                [Complex64::new(inv, 0.0), Complex64::from_polar(inv, t)]
            }
            Plane::XZ => {
                [Complex64::new((t / 2.0).cos(), 0.0), Complex64::new((t / 2.0).sin(), 0.0)]
            }
            Plane::YZ => {
                [Complex64::new((t / 2.0).cos(), 0.0), Complex64::new(0.0, (t / 2.0).sin())]
            }
        }
    };
    (plus(theta), plus(theta + PI))
}

struct PatternRun<'a> {
    pattern: &'a Pattern,
    state: StateVector,
    live: Vec<usize>,
    edges: Vec<(usize, usize)>,
    /// An edge participates only once its Entangle command has executed;
    /// until then it must not be pulled forward past non-commuting
    /// operations on its endpoints (composite patterns interleave
    /// corrections with later entangling).
    edge_enabled: Vec<bool>,
    edge_applied: Vec<bool>,
    next_edge: usize,
    node_edges: BTreeMap<usize, Vec<usize>>,
    outcomes: BTreeMap<usize, bool>,
    records: Vec<OutcomeRecord>,
    rng: Option<ChaCha8Rng>,
    fixed: Vec<bool>,
    fixed_used: usize,
    policy_all_zero: bool,
}

impl<'a> PatternRun<'a> {
    fn position(&self, node: usize) -> Option<usize> {
        self.live.iter().position(|&n| n == node)
    }

    fn ensure_live(&mut self, node: usize) -> Result<usize, SimError> {
        if let Some(p) = self.position(node) {
            return Ok(p);
        }
        if self.live.len() >= MAX_LIVE_QUBITS {
            return Err(SimError::TooLarge { qubits: self.live.len() + 1, limit: MAX_LIVE_QUBITS });
        }
        self.live.push(node);
        self.state.append_plus();
        Ok(self.live.len() - 1)
    }

    /// Applies all enabled, still-pending edges at `node`, instantiating
    /// partners as needed. A pending CZ commutes with every operation
    /// executed since its Entangle command (those acted on other nodes),
    /// so applying it at first touch is exact.
    fn apply_edges_at(&mut self, node: usize) -> Result<(), SimError> {
        let idxs = self.node_edges.get(&node).cloned().unwrap_or_default();
        for ei in idxs {
            if !self.edge_enabled[ei] || self.edge_applied[ei] {
                continue;
            }
            let (a, b) = self.edges[ei];
            let pa = self.ensure_live(a)?;
            let pb = self.ensure_live(b)?;
            self.state.apply_cz(pa, pb);
            self.edge_applied[ei] = true;
        }
        Ok(())
    }

    fn parity(&self, domain: &[usize]) -> bool {
        domain.iter().fold(false, |acc, d| acc ^ self.outcomes[d])
    }

    fn choose_outcome(&mut self, p0: f64) -> Result<bool, SimError> {
        if self.policy_all_zero {
            return Ok(false);
        }
        if let Some(rng) = &mut self.rng {
            return Ok(rng.random::<f64>() >= p0);
        }
        if self.fixed_used >= self.fixed.len() {
            return Err(SimError::OutcomesExhausted(self.pattern.measurements().count()));
        }
        let o = self.fixed[self.fixed_used];
        self.fixed_used += 1;
        Ok(o)
    }
}

/// Runs a pattern on an input state over its input nodes (in input
/// order), choosing outcomes by `policy`, and returns the output state
/// over the output nodes (in output order) together with the outcome
/// records in measurement order. Correction and Clifford commands apply
/// in listed order; an explicit `ShiftSignal` relabels the recorded
/// signal it names.
pub fn simulate_pattern(
    p: &Pattern,
    input: &StateVector,
    policy: &OutcomePolicy,
    binding: &Binding,
) -> Result<(StateVector, Vec<OutcomeRecord>), SimError> {
    run_pattern(p, input, policy, binding, true)
}

/// Reference implementation that instantiates every node upfront (edges
/// still apply at their command positions); exponential in total pattern
/// size, used to cross-check the lazy engine on small patterns.
pub fn simulate_pattern_naive(
    p: &Pattern,
    input: &StateVector,
    policy: &OutcomePolicy,
    binding: &Binding,
) -> Result<(StateVector, Vec<OutcomeRecord>), SimError> {
    run_pattern(p, input, policy, binding, false)
}

fn run_pattern(
    p: &Pattern,
    input: &StateVector,
    policy: &OutcomePolicy,
    binding: &Binding,
    lazy: bool,
) -> Result<(StateVector, Vec<OutcomeRecord>), SimError> {
    if input.num_qubits != p.inputs().len() {
        return Err(SimError::InputDim {
            found: 1 << input.num_qubits,
            expected: 1 << p.inputs().len(),
        });
    }
    let edges: Vec<(usize, usize)> = p
        .commands()
        .iter()
        .filter_map(|c| match c {
            Command::Entangle(a, b) => Some((*a, *b)),
            _ => None,
        })
        .collect();
    let mut node_edges: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (ei, &(a, b)) in edges.iter().enumerate() {
        node_edges.entry(a).or_default().push(ei);
        node_edges.entry(b).or_default().push(ei);
    }
    let edge_enabled = vec![false; edges.len()];
    let edge_applied = vec![false; edges.len()];
    let mut run = PatternRun {
        pattern: p,
        state: input.clone(),
        live: p.inputs().to_vec(),
        edges,
        edge_enabled,
        edge_applied,
        next_edge: 0,
        node_edges,
        outcomes: BTreeMap::new(),
        records: Vec::new(),
        rng: match policy {
            OutcomePolicy::Random(seed) => Some(ChaCha8Rng::seed_from_u64(*seed)),
            _ => None,
        },
        fixed: match policy {
            OutcomePolicy::Fixed(v) => v.clone(),
            _ => Vec::new(),
        },
        fixed_used: 0,
        policy_all_zero: matches!(policy, OutcomePolicy::AllZero),
    };

    if !lazy {
        for n in p.nodes() {
            run.ensure_live(n)?;
        }
    }

    for cmd in p.commands() {
        match cmd {
            Command::AddNode(_) => {}
            Command::Entangle(..) => {
                // Edges were collected in command order, so the k-th
                // Entangle reached here is edges[k].
                run.edge_enabled[run.next_edge] = true;
                run.next_edge += 1;
            }
            Command::Measure(m) => {
                let pos = run.ensure_live(m.node)?;
                run.apply_edges_at(m.node)?;
                let pos = if lazy { run.position(m.node).unwrap() } else { pos };
                let base = m.angle.eval(binding).map_err(SimError::UnboundCoefficient)?;
                let mut theta = if run.parity(&m.s_domain) { -base } else { base };
                if run.parity(&m.t_domain) {
                    theta += PI;
                }
                let (b0, b1) = basis_vectors(m.plane, theta);
                let p0 = run.state.project_prob(pos, &b0);
                let outcome = run.choose_outcome(p0)?;
                let basis = if outcome { &b1 } else { &b0 };
                let prob = run.state.project_remove(pos, basis);
                run.state.normalize();
                run.live.remove(pos);
                run.outcomes.insert(m.node, outcome);
                run.records.push(OutcomeRecord { node: m.node, outcome, probability: prob });
            }
            Command::CorrectX { node, domain } => {
                if run.parity(domain) {
                    run.ensure_live(*node)?;
                    run.apply_edges_at(*node)?;
                    let pos = run.position(*node).unwrap();
                    run.state.apply_1q(
                        pos,
                        &const_mat([[(0.0, 0.0), (1.0, 0.0)], [(1.0, 0.0), (0.0, 0.0)]]),
                    );
                }
            }
            Command::CorrectZ { node, domain } => {
                if run.parity(domain) {
                    run.ensure_live(*node)?;
                    run.apply_edges_at(*node)?;
                    let pos = run.position(*node).unwrap();
                    run.state.apply_1q(
                        pos,
                        &const_mat([[(1.0, 0.0), (0.0, 0.0)], [(0.0, 0.0), (-1.0, 0.0)]]),
                    );
                }
            }
            Command::ApplyClifford { node, op } => {
                run.ensure_live(*node)?;
                run.apply_edges_at(*node)?;
                let pos = run.position(*node).unwrap();
                let m = op.matrix();
                run.state.apply_1q(pos, &m);
            }
            Command::ShiftSignal { node, domain } => {
                let flip = run.parity(domain);
                if flip {
                    let v = run.outcomes.get_mut(node).expect("shift names a recorded signal");
                    *v = !*v;
                }
            }
        }
    }

    // remaining outputs and output-output edges
    for &o in p.outputs() {
        run.ensure_live(o)?;
        run.apply_edges_at(o)?;
    }
    debug_assert!(run.edge_applied.iter().all(|&a| a));
    debug_assert_eq!(run.live.len(), p.outputs().len());

    let perm: Vec<usize> = p
        .outputs()
        .iter()
        .map(|&o| run.position(o).expect("output is live"))
        .collect();
    run.state.permute(&perm);
    Ok((run.state, run.records))
}

/// One complete outcome assignment of a pattern simulation.
#[derive(Clone, Debug)]
pub struct Branch {
    pub outcomes: Vec<bool>,
    pub probability: f64,
    pub state: StateVector,
}

/// Enumerates every outcome branch with nonzero probability; branch
/// probabilities are the products of the per-measurement projection
/// probabilities and sum to one.
pub fn enumerate_branches(
    p: &Pattern,
    input: &StateVector,
    binding: &Binding,
) -> Result<Vec<Branch>, SimError> {
    let m = p.measurements().count();
    if m > 20 {
        return Err(SimError::TooLarge { qubits: m, limit: 20 });
    }
    let mut branches = Vec::new();
    for mask in 0..1usize << m {
        let outcomes: Vec<bool> = (0..m).map(|k| mask >> k & 1 == 1).collect();
        let (state, records) =
            simulate_pattern(p, input, &OutcomePolicy::Fixed(outcomes.clone()), binding)?;
        let probability: f64 = records.iter().map(|r| r.probability).product();
        if probability > 1e-12 {
            branches.push(Branch { outcomes, probability, state });
        }
    }
    Ok(branches)
}

/// Per-trial outcome of pattern-versus-circuit validation.
#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub trials: usize,
    pub seed: u64,
    pub min_fidelity: f64,
    pub min_bhattacharyya: f64,
    pub failed_trials: Vec<usize>,
    pub pass: bool,
}

/// Simulates pattern and circuit on shared random inputs with sampled
/// outcomes and compares the outputs. A trial passes when the
/// Bhattacharyya coefficient exceeds 0.999 and the fidelity is within
/// 1e-8 of unity; unbound coefficient symbols are given seeded random
/// values in [-1, 1].
pub fn validate_pattern_vs_circuit(
    p: &Pattern,
    c: &Circuit,
    trials: usize,
    seed: u64,
) -> Result<ValidationReport, SimError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut binding = Binding::empty();
    let symbols: BTreeSet<usize> = p.symbols().chain(c.symbols()).collect();
    for s in symbols {
        binding.set(s, rng.random::<f64>() * 2.0 - 1.0);
    }
    let mut report = ValidationReport {
        trials,
        seed,
        min_fidelity: 1.0,
        min_bhattacharyya: 1.0,
        failed_trials: Vec::new(),
        pass: true,
    };
    for trial in 0..trials {
        let input = random_state(c.width(), &mut rng);
        let want = simulate_circuit(c, &input, &binding)?;
        let policy = OutcomePolicy::Random(seed ^ (trial as u64).wrapping_mul(0x9e3779b97f4a7c15));
        let (got, _) = simulate_pattern(p, &input, &policy, &binding)?;
        let fid = fidelity(&want, &got);
        let bc = bhattacharyya(&want, &got);
        report.min_fidelity = report.min_fidelity.min(fid);
        report.min_bhattacharyya = report.min_bhattacharyya.min(bc);
        if !(bc > 0.999 && fid >= 1.0 - 1e-8) {
            report.failed_trials.push(trial);
            report.pass = false;
        }
    }
    Ok(report)
}

/// Like [`validate_pattern_vs_circuit`], but replays only the all-plus
/// input. Rewrites that carry a plus-inputs guarantee are equivalent on
/// that state alone, so the trials vary the sampled measurement outcomes
/// rather than the input.
pub fn validate_pattern_vs_circuit_plus(
    p: &Pattern,
    c: &Circuit,
    trials: usize,
    seed: u64,
) -> Result<ValidationReport, SimError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut binding = Binding::empty();
    let symbols: BTreeSet<usize> = p.symbols().chain(c.symbols()).collect();
    for s in symbols {
        binding.set(s, rng.random::<f64>() * 2.0 - 1.0);
    }
    let mut report = ValidationReport {
        trials,
        seed,
        min_fidelity: 1.0,
        min_bhattacharyya: 1.0,
        failed_trials: Vec::new(),
        pass: true,
    };
    let input = StateVector::plus_state(c.width());
    let want = simulate_circuit(c, &input, &binding)?;
    for trial in 0..trials {
        let policy = OutcomePolicy::Random(seed ^ (trial as u64).wrapping_mul(0x9e3779b97f4a7c15));
        let (got, _) = simulate_pattern(p, &input, &policy, &binding)?;
        let fid = fidelity(&want, &got);
        let bc = bhattacharyya(&want, &got);
        report.min_fidelity = report.min_fidelity.min(fid);
        report.min_bhattacharyya = report.min_bhattacharyya.min(bc);
        if !(bc > 0.999 && fid >= 1.0 - 1e-8) {
            report.failed_trials.push(trial);
            report.pass = false;
        }
    }
    Ok(report)
}

/// Checks that a pattern's output is outcome-independent: one random
/// input is simulated under the all-zero policy and `trials` sampled
/// policies, and every pair of outputs must have fidelity within 1e-9 of
/// unity.
pub fn determinism_check(p: &Pattern, trials: usize, seed: u64) -> Result<bool, SimError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut binding = Binding::empty();
    for s in p.symbols() {
        binding.set(s, rng.random::<f64>() * 2.0 - 1.0);
    }
    let input = random_state(p.inputs().len(), &mut rng);
    outcome_independent(p, &input, &binding, trials, seed)
}

/// [`determinism_check`] restricted to the all-plus input, the only state
/// a plus-inputs rewrite promises anything about.
pub fn determinism_check_plus(p: &Pattern, trials: usize, seed: u64) -> Result<bool, SimError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut binding = Binding::empty();
    for s in p.symbols() {
        binding.set(s, rng.random::<f64>() * 2.0 - 1.0);
    }
    let input = StateVector::plus_state(p.inputs().len());
    outcome_independent(p, &input, &binding, trials, seed)
}

fn outcome_independent(
    p: &Pattern,
    input: &StateVector,
    binding: &Binding,
    trials: usize,
    seed: u64,
) -> Result<bool, SimError> {
    let mut outputs = Vec::new();
    let (base, _) = simulate_pattern(p, input, &OutcomePolicy::AllZero, binding)?;
    outputs.push(base);
    for k in 0..trials {
        let (out, _) =
            simulate_pattern(p, input, &OutcomePolicy::Random(seed.wrapping_add(k as u64 + 1)), binding)?;
        outputs.push(out);
    }
    for i in 0..outputs.len() {
        for j in i + 1..outputs.len() {
            if fidelity(&outputs[i], &outputs[j]) < 1.0 - 1e-9 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angle::AngleExpr;
    use crate::pattern::Measurement;
    use crate::transpile::circuit_to_pattern;

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn circuit_gates_act_on_the_expected_qubits() {
        // qubit 0 is the most significant bit
        let mut c = Circuit::new(2);
        c.push(Gate::X(0)).unwrap();
        let out = simulate_circuit(&c, &StateVector::zero_state(2), &Binding::empty()).unwrap();
        assert!((out.amps()[0b10].norm() - 1.0).abs() < 1e-12);

        let mut c = Circuit::new(2);
        c.push(Gate::H(0)).unwrap();
        c.push(Gate::Cnot { control: 0, target: 1 }).unwrap();
        let out = simulate_circuit(&c, &StateVector::zero_state(2), &Binding::empty()).unwrap();
        assert!((out.amps()[0b00].norm_sqr() - 0.5).abs() < 1e-12);
        assert!((out.amps()[0b11].norm_sqr() - 0.5).abs() < 1e-12);

        let mut c = Circuit::new(2);
        c.push(Gate::X(0)).unwrap();
        c.push(Gate::Swap(0, 1)).unwrap();
        let out = simulate_circuit(&c, &StateVector::zero_state(2), &Binding::empty()).unwrap();
        assert!((out.amps()[0b01].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rz_and_phase_follow_the_half_angle_convention() {
        let mut c = Circuit::new(1);
        c.push(Gate::Rz { qubit: 0, angle: AngleExpr::coeff_term(0, 1.0) }).unwrap();
        c.add_phase(&AngleExpr::pi_times(1, 2));
        let mut binding = Binding::empty();
        binding.set(0, PI);
        let input = StateVector::plus_state(1);
        let out = simulate_circuit(&c, &input, &binding).unwrap();
        // RZ(pi) = diag(-i, i), phase i: diag(1, -1) on |+> gives |->
        assert!((out.amps()[0] - c64(1.0 / 2.0f64.sqrt(), 0.0)).norm() < 1e-12);
        assert!((out.amps()[1] + c64(1.0 / 2.0f64.sqrt(), 0.0)).norm() < 1e-12);
    }

    #[test]
    fn teleportation_chain_reproduces_hh_on_random_inputs() {
        let mut c = Circuit::new(1);
        c.push(Gate::H(0)).unwrap();
        c.push(Gate::H(0)).unwrap();
        let p = circuit_to_pattern(&c).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for trial in 0..8 {
            let input = random_state(1, &mut rng);
            let (got, _) =
                simulate_pattern(&p, &input, &OutcomePolicy::Random(trial), &Binding::empty())
                    .unwrap();
            assert!(fidelity(&got, &input) > 1.0 - 1e-10, "trial {trial}");
        }
    }

    #[test]
    fn lazy_and_naive_agree_branch_by_branch() {
        let mut c = Circuit::new(2);
        c.push(Gate::H(0)).unwrap();
        c.push(Gate::Cnot { control: 0, target: 1 }).unwrap();
        c.push(Gate::Rz { qubit: 1, angle: AngleExpr::pi_times(1, 3) }).unwrap();
        let p = circuit_to_pattern(&c).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let input = random_state(2, &mut rng);
        let m = p.measurements().count();
        for mask in 0..1usize << m {
            let outcomes: Vec<bool> = (0..m).map(|k| mask >> k & 1 == 1).collect();
            let policy = OutcomePolicy::Fixed(outcomes);
            let a = simulate_pattern(&p, &input, &policy, &Binding::empty()).unwrap();
            let b = simulate_pattern_naive(&p, &input, &policy, &Binding::empty()).unwrap();
            let pa: f64 = a.1.iter().map(|r| r.probability).product();
            let pb: f64 = b.1.iter().map(|r| r.probability).product();
            assert!((pa - pb).abs() < 1e-12);
            if pa > 1e-12 {
                assert!(fidelity(&a.0, &b.0) > 1.0 - 1e-10);
            }
        }
    }

    #[test]
    fn edges_interleaved_with_corrections_apply_in_command_order() {
        // Two teleportation steps chained as written: the second E
        // command sits after the first step's X correction and must not
        // be pulled ahead of it (CZ and X on the same node do not
        // commute). The composite is H then H, the identity.
        let step = Pattern::new(
            vec![0],
            vec![1],
            vec![
                Command::AddNode(1),
                Command::Entangle(0, 1),
                Command::Measure(Measurement::xy(0, AngleExpr::zero())),
                Command::CorrectX { node: 1, domain: vec![0] },
            ],
        )
        .unwrap();
        let two = step.then(&step).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        let input = random_state(1, &mut rng);
        for bits in 0..4u8 {
            let policy = OutcomePolicy::Fixed(vec![bits & 1 != 0, bits & 2 != 0]);
            let (out, _) = simulate_pattern(&two, &input, &policy, &Binding::empty()).unwrap();
            assert!(fidelity(&out, &input) > 1.0 - 1e-10, "lazy branch {bits:02b}");
            let (out, _) =
                simulate_pattern_naive(&two, &input, &policy, &Binding::empty()).unwrap();
            assert!(fidelity(&out, &input) > 1.0 - 1e-10, "naive branch {bits:02b}");
        }
    }

    #[test]
    fn branch_probabilities_sum_to_one() {
        let mut c = Circuit::new(1);
        c.push(Gate::S(0)).unwrap();
        let p = circuit_to_pattern(&c).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let input = random_state(1, &mut rng);
        let branches = enumerate_branches(&p, &input, &Binding::empty()).unwrap();
        let total: f64 = branches.iter().map(|b| b.probability).sum();
        assert!((total - 1.0).abs() < 1e-9);
        // flow-driven patterns are deterministic across branches
        for b in &branches {
            assert!(fidelity(&b.state, &branches[0].state) > 1.0 - 1e-9);
        }
    }

    #[test]
    fn validation_and_determinism_pass_for_a_transpiled_gate() {
        let mut c = Circuit::new(2);
        c.push(Gate::Cnot { control: 0, target: 1 }).unwrap();
        c.push(Gate::S(1)).unwrap();
        let p = circuit_to_pattern(&c).unwrap();
        let report = validate_pattern_vs_circuit(&p, &c, 10, 77).unwrap();
        assert!(report.pass, "{report:?}");
        assert!(determinism_check(&p, 6, 78).unwrap());
    }

    #[test]
    fn corrupted_pattern_fails_validation() {
        let mut c = Circuit::new(1);
        c.push(Gate::H(0)).unwrap();
        let p = circuit_to_pattern(&c).unwrap();
        // drop the X correction: outcome 1 now leaves an error
        let cmds: Vec<Command> = p
            .commands()
            .iter()
            .filter(|cmd| !matches!(cmd, Command::CorrectX { .. }))
            .cloned()
            .collect();
        let bad = Pattern::new(p.inputs().to_vec(), p.outputs().to_vec(), cmds).unwrap();
        let report = validate_pattern_vs_circuit(&bad, &c, 20, 3).unwrap();
        assert!(!report.pass);
        assert!(!determinism_check(&bad, 10, 4).unwrap());
    }

    #[test]
    fn unbound_symbols_are_reported() {
        let mut c = Circuit::new(1);
        c.push(Gate::Rz { qubit: 0, angle: AngleExpr::coeff_term(3, 2.0) }).unwrap();
        let p = circuit_to_pattern(&c).unwrap();
        let err = simulate_pattern(
            &p,
            &StateVector::plus_state(1),
            &OutcomePolicy::AllZero,
            &Binding::empty(),
        );
        assert!(matches!(err, Err(SimError::UnboundCoefficient(3))));
    }

    #[test]
    fn yz_and_xz_bases_match_their_observables() {
        // YZ at angle 0 measures Z: |0> gives outcome 0 deterministically
        let p = Pattern::new(
            vec![0],
            vec![1],
            vec![
                Command::AddNode(1),
                Command::Measure(Measurement {
                    node: 0,
                    plane: Plane::YZ,
                    angle: AngleExpr::zero(),
                    s_domain: vec![],
                    t_domain: vec![],
                }),
            ],
        )
        .unwrap();
        let (_, recs) = simulate_pattern(
            &p,
            &StateVector::zero_state(1),
            &OutcomePolicy::Random(1),
            &Binding::empty(),
        )
        .unwrap();
        assert!(!recs[0].outcome);
        assert!((recs[0].probability - 1.0).abs() < 1e-12);
        // XZ at angle pi/2 measures X: |+> gives outcome 0
        let p = Pattern::new(
            vec![0],
            vec![1],
            vec![
                Command::AddNode(1),
                Command::Measure(Measurement {
                    node: 0,
                    plane: Plane::XZ,
                    angle: AngleExpr::pi_times(1, 2),
                    s_domain: vec![],
                    t_domain: vec![],
                }),
            ],
        )
        .unwrap();
        let (_, recs) = simulate_pattern(
            &p,
            &StateVector::plus_state(1),
            &OutcomePolicy::Random(1),
            &Binding::empty(),
        )
        .unwrap();
        assert!(!recs[0].outcome);
        assert!((recs[0].probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn output_reordering_follows_the_output_list() {
        // swap via outputs listed in reverse: state X|00> = |10> must
        // come out as |01>
        let p = Pattern::new(vec![0, 1], vec![1, 0], vec![]).unwrap();
        let mut input = StateVector::zero_state(2);
        input.apply_1q(0, &const_mat([[(0.0, 0.0), (1.0, 0.0)], [(1.0, 0.0), (0.0, 0.0)]]));
        let (out, _) =
            simulate_pattern(&p, &input, &OutcomePolicy::AllZero, &Binding::empty()).unwrap();
        assert!((out.amps()[0b01].norm() - 1.0).abs() < 1e-12);
    }
}
