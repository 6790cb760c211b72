//! Pattern size reduction.
//!
//! Two rewrites are provided. `contract_wire_x_pairs` removes adjacent
//! pairs of internal degree-2 nodes measured at angle zero; such a pair
//! is a teleportation wire segment, and projecting both onto |+> turns
//! the three edges x-a, a-b, b-y into a single (toggled) edge x-y. The
//! rewrite is exact for any input state.
//!
//! `eliminate_pauli_measurements` removes every internal measurement at
//! a multiple of pi/2 by playing it out on the underlying graph state
//! ahead of time: measuring a Pauli observable on one vertex of a graph
//! state leaves a graph state on the remaining vertices, up to local
//! Cliffords on the old neighborhood. The accumulated Cliffords are
//! folded into the retained measurement bases (which may leave the XY
//! plane) and emitted as explicit Clifford commands on outputs. Playing
//! measurements ahead of time treats input vertices as |+> preparations,
//! so whenever a node is actually removed the rewritten pattern is only
//! guaranteed to agree on |+...+> inputs; the report records which
//! guarantee applies.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::angle::AngleExpr;
use crate::clifford::{Axis, LocalClifford, SignedAxis};
use crate::error::PatternError;
use crate::flow::{compute_metrics, dependency_layering, find_causal_flow, pattern_from_flow, Metrics};
use crate::pattern::{Command, Measurement, NodeSet, OpenGraph, Pattern, Plane};

/// Input-state assumption under which a rewritten pattern reproduces
/// the original.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputGuarantee {
    /// Exact for every input state.
    AnyInput,
    /// Exact when every input qubit starts in |+>.
    PlusInputs,
}

/// What a compactification pass did and what it cost.
#[derive(Clone, Debug)]
pub struct CompactReport {
    pub nodes_before: usize,
    pub nodes_after: usize,
    pub measurements_removed: usize,
    /// Measurement planes other than XY present afterwards.
    pub planes_introduced: Vec<Plane>,
    pub metrics_before: Metrics,
    pub metrics_after: Metrics,
    /// Whether the before/after metrics use a causal-flow layering
    /// (false means the dependency fallback was used).
    pub layering_before_causal: bool,
    pub layering_after_causal: bool,
    pub guarantee: InputGuarantee,
    /// Removed nodes in processing order, with the special neighbor
    /// chosen for X-observable eliminations (or the partner node for
    /// wire contractions).
    pub removals: Vec<(usize, Option<usize>)>,
}

/// Upper bound on how many measurements Clifford-based compactification
/// can remove: the number of measurements at a multiple of pi/2.
pub fn lc_gain_bound(p: &Pattern) -> usize {
    p.measurements().filter(|m| pauli_quarter(&m.angle).is_some()).count()
}

/// Quarter-turn index q in 0..=3 with angle = q*pi/2 (mod 2pi), if the
/// angle is a constant within 1e-9 of such a multiple.
fn pauli_quarter(angle: &AngleExpr) -> Option<i64> {
    let v = angle.const_value()?;
    let r = v.rem_euclid(2.0 * PI);
    let q = (r / FRAC_PI_2).round();
    if (r - q * FRAC_PI_2).abs() > 1e-9 {
        return None;
    }
    Some((q as i64) % 4)
}

/// The plane's observable at angle t is cos(t) Q1 + sin(t) Q2.
fn plane_observables(plane: Plane) -> (Axis, Axis) {
    match plane {
        Plane::XY => (Axis::X, Axis::Y),
        Plane::XZ => (Axis::Z, Axis::X),
        Plane::YZ => (Axis::Z, Axis::Y),
    }
}

/// The measured observable of a plane at a quarter-turn angle.
fn observable_for(plane: Plane, q: i64) -> SignedAxis {
    let (q1, q2) = plane_observables(plane);
    match q {
        0 => SignedAxis::new(q1, false),
        1 => SignedAxis::new(q2, false),
        2 => SignedAxis::new(q1, true),
        _ => SignedAxis::new(q2, true),
    }
}

/// Which plane has observables along the given (unordered) axis pair,
/// and whether the pair arrives swapped relative to that plane's
/// canonical (Q1, Q2) order.
fn plane_for_axes(a1: Axis, a2: Axis) -> (Plane, bool) {
    for plane in [Plane::XY, Plane::XZ, Plane::YZ] {
        let (q1, q2) = plane_observables(plane);
        if (a1, a2) == (q1, q2) {
            return (plane, false);
        }
        if (a1, a2) == (q2, q1) {
            return (plane, true);
        }
    }
    unreachable!("conjugated plane axes are always a distinct pair")
}

fn vop_apply(vops: &mut BTreeMap<usize, LocalClifford>, node: usize, op: &LocalClifford) {
    let cur = vops.get(&node).cloned().unwrap_or(LocalClifford::IDENTITY);
    vops.insert(node, cur.after(op));
}

/// Plays out a measurement of the plain observable `axis` with outcome
/// `minus` on vertex `v` of the graph state, leaving the reduced graph
/// and pushing the byproduct Cliffords onto the neighbors' decorations.
/// Returns the special neighbor used for X observables.
fn measure_graph_vertex(
    g: &mut OpenGraph,
    vops: &mut BTreeMap<usize, LocalClifford>,
    v: usize,
    axis: Axis,
    minus: bool,
) -> Option<usize> {
    let nv: BTreeSet<usize> = g.neighbors(v).collect();
    match axis {
        Axis::Z => {
            if minus {
                for &b in &nv {
                    vop_apply(vops, b, &LocalClifford::Z);
                }
            }
            g.remove_node(v);
            None
        }
        Axis::Y => {
            let u = if minus { LocalClifford::SDG } else { LocalClifford::S };
            for &b in &nv {
                vop_apply(vops, b, &u);
            }
            g.local_complement(v);
            g.remove_node(v);
            None
        }
        Axis::X => {
            if nv.is_empty() {
                g.remove_node(v);
                return None;
            }
            let b0 = *nv.iter().next().unwrap();
            let nb0: BTreeSet<usize> = g.neighbors(b0).collect();
            if !minus {
                vop_apply(vops, b0, &LocalClifford::SQRT_IY);
                for &c in nv.difference(&nb0) {
                    if c != b0 {
                        vop_apply(vops, c, &LocalClifford::Z);
                    }
                }
            } else {
                vop_apply(vops, b0, &LocalClifford::SQRT_MIY);
                for &c in nb0.difference(&nv) {
                    if c != v {
                        vop_apply(vops, c, &LocalClifford::Z);
                    }
                }
            }
            g.local_complement(b0);
            g.local_complement(v);
            g.remove_node(v);
            g.local_complement(b0);
            Some(b0)
        }
    }
}

fn metrics_with_fallback(p: &Pattern) -> (Metrics, bool) {
    match find_causal_flow(&p.graph()) {
        Some(fl) => (compute_metrics(p, &fl), true),
        None => (compute_metrics(p, &dependency_layering(p)), false),
    }
}

fn planes_outside_xy(p: &Pattern) -> Vec<Plane> {
    let mut out = Vec::new();
    for plane in [Plane::XZ, Plane::YZ] {
        if p.measurements().any(|m| m.plane == plane) {
            out.push(plane);
        }
    }
    out
}

/// Removes every internal (non-input, non-output) measurement whose
/// angle is a multiple of pi/2 by precomputing its effect on the graph
/// state. Retained measurements keep their original relative order with
/// bases conjugated through the accumulated local Cliffords; leftover
/// Cliffords on outputs become explicit commands ahead of the
/// corrections, which keep their original form. Node ids are preserved.
pub fn eliminate_pauli_measurements(p: &Pattern) -> Result<(Pattern, CompactReport), PatternError> {
    let std = p.standardize()?.shift_signals().simplify();
    let (metrics_before, layering_before_causal) = metrics_with_fallback(&std);
    let inputs_set: BTreeSet<usize> = std.inputs().iter().copied().collect();

    // Rewrite every domain in terms of raw outcomes: measurements at a
    // multiple of pi ignore their sign domain entirely, and a domain on
    // a measurement at an odd multiple of pi/2 only relabels the
    // outcome, which later references absorb.
    let expand = |dom: &[usize], delta: &BTreeMap<usize, NodeSet>| -> Vec<usize> {
        let mut out = NodeSet::from_slice(dom);
        for d in dom {
            if let Some(extra) = delta.get(d) {
                out.xor_with(extra);
            }
        }
        out.to_vec()
    };
    let mut delta: BTreeMap<usize, NodeSet> = BTreeMap::new();
    let mut meas: Vec<Measurement> = Vec::new();
    let mut corrections: Vec<Command> = Vec::new();
    for cmd in std.commands() {
        match cmd {
            Command::AddNode(_) | Command::Entangle(..) => {}
            Command::Measure(m) => {
                let s = expand(&m.s_domain, &delta);
                let mut m2 = m.clone();
                m2.s_domain = s;
                match pauli_quarter(&m2.angle) {
                    Some(q) if q % 2 == 0 => m2.s_domain = Vec::new(),
                    Some(_) => {
                        if !m2.s_domain.is_empty() {
                            delta.insert(m2.node, NodeSet::from_slice(&m2.s_domain));
                            m2.s_domain = Vec::new();
                        }
                    }
                    None => {}
                }
                meas.push(m2);
            }
            Command::CorrectX { node, domain } => {
                corrections.push(Command::CorrectX { node: *node, domain: expand(domain, &delta) });
            }
            Command::CorrectZ { node, domain } => {
                corrections.push(Command::CorrectZ { node: *node, domain: expand(domain, &delta) });
            }
            Command::ApplyClifford { .. } | Command::ShiftSignal { .. } => {
                unreachable!("standardized shifted patterns contain no such commands")
            }
        }
    }

    // Play the internal Pauli measurements out on the graph in order,
    // fixing each removed outcome to a constant (zero unless the
    // observable is forced on an isolated vertex).
    let mut g = std.graph();
    let mut vops: BTreeMap<usize, LocalClifford> = BTreeMap::new();
    let mut consts: BTreeMap<usize, bool> = BTreeMap::new();
    let mut removals: Vec<(usize, Option<usize>)> = Vec::new();
    let mut retained: Vec<Measurement> = Vec::new();
    for m in meas {
        let quarter = pauli_quarter(&m.angle);
        if inputs_set.contains(&m.node) || quarter.is_none() {
            retained.push(m);
            continue;
        }
        let obs = observable_for(m.plane, quarter.unwrap());
        let w = vops.remove(&m.node).unwrap_or(LocalClifford::IDENTITY);
        let eff = w.inverse().conjugate(obs);
        let forced = eff.axis == Axis::X && g.degree(m.node) == 0;
        let outcome_const = if forced { eff.neg } else { false };
        let eps = outcome_const ^ eff.neg;
        let b0 = measure_graph_vertex(&mut g, &mut vops, m.node, eff.axis, eps);
        consts.insert(m.node, outcome_const);
        removals.push((m.node, b0));
    }

    // Substitute the fixed outcomes into the surviving domains. A
    // constant one in a sign domain negates the base angle; in a
    // correction domain it splits off an unconditional Pauli, folded
    // into the output's Clifford decoration below.
    let subst = |dom: &[usize]| -> (Vec<usize>, bool) {
        let mut flip = false;
        let mut kept = Vec::with_capacity(dom.len());
        for &d in dom {
            match consts.get(&d) {
                Some(&c) => flip ^= c,
                None => kept.push(d),
            }
        }
        (kept, flip)
    };
    for m in &mut retained {
        let (kept, flip) = subst(&m.s_domain);
        m.s_domain = kept;
        if flip {
            m.angle = m.angle.neg();
        }
    }
    let mut extra_pauli: BTreeMap<usize, (bool, bool)> = BTreeMap::new();
    let mut kept_corrections: Vec<Command> = Vec::new();
    for c in corrections {
        match c {
            Command::CorrectX { node, domain } => {
                let (kept, flip) = subst(&domain);
                if flip {
                    extra_pauli.entry(node).or_default().0 ^= true;
                }
                if !kept.is_empty() {
                    kept_corrections.push(Command::CorrectX { node, domain: kept });
                }
            }
            Command::CorrectZ { node, domain } => {
                let (kept, flip) = subst(&domain);
                if flip {
                    extra_pauli.entry(node).or_default().1 ^= true;
                }
                if !kept.is_empty() {
                    kept_corrections.push(Command::CorrectZ { node, domain: kept });
                }
            }
            _ => unreachable!(),
        }
    }

    // Fold each retained node's decoration into its measurement. The
    // rewritten pattern holds the bare graph state while the source
    // semantics live behind the decoration, so the executed observable
    // is the source observable conjugated through the decoration's
    // inverse. This maps plane angles affinely (t -> sigma*t + k*pi/2)
    // and, for odd k, makes the old sign domain also act as a t domain.
    for m in &mut retained {
        let w = vops.remove(&m.node).unwrap_or(LocalClifford::IDENTITY);
        if w.is_identity() {
            continue;
        }
        let winv = w.inverse();
        let (p1, p2) = plane_observables(m.plane);
        let a1 = winv.conjugate(SignedAxis::new(p1, false));
        let a2 = winv.conjugate(SignedAxis::new(p2, false));
        let (new_plane, swapped) = plane_for_axes(a1.axis, a2.axis);
        let (k, sigma_pos) = if !swapped {
            let k: i64 = if a1.neg { 2 } else { 0 };
            (k, a2.neg == (k == 2))
        } else {
            let k: i64 = if a1.neg { 3 } else { 1 };
            (k, a2.neg != (k == 3))
        };
        let base = if sigma_pos { m.angle.clone() } else { m.angle.neg() };
        m.angle = base.add_pi_halves(k);
        m.plane = new_plane;
        if k % 2 == 1 {
            m.t_domain = m.s_domain.clone();
        }
    }

    // Assemble: reduced graph, retained measurements, output
    // decorations (the rewritten pattern holds the bare state, so each
    // output must be decorated before the source corrections apply),
    // then the corrections.
    let mut commands: Vec<Command> = Vec::new();
    for n in g.nodes() {
        if !inputs_set.contains(&n) {
            commands.push(Command::AddNode(n));
        }
    }
    for (a, b) in g.edges() {
        commands.push(Command::Entangle(a, b));
    }
    for m in retained {
        commands.push(Command::Measure(m));
    }
    let mut outs: Vec<usize> = std.outputs().to_vec();
    outs.sort_unstable();
    for o in outs {
        let mut w = vops.remove(&o).unwrap_or(LocalClifford::IDENTITY);
        let (ex, ez) = extra_pauli.get(&o).copied().unwrap_or((false, false));
        if ez {
            w = LocalClifford::Z.after(&w);
        }
        if ex {
            w = LocalClifford::X.after(&w);
        }
        if !w.is_identity() {
            commands.push(Command::ApplyClifford { node: o, op: w });
        }
    }
    commands.extend(kept_corrections);
    let assembled = Pattern::new(std.inputs().to_vec(), std.outputs().to_vec(), commands)?;
    let result = assembled.shift_signals().simplify();

    let (metrics_after, layering_after_causal) = metrics_with_fallback(&result);
    let guarantee = if removals.is_empty() || std.inputs().is_empty() {
        InputGuarantee::AnyInput
    } else {
        InputGuarantee::PlusInputs
    };
    let report = CompactReport {
        nodes_before: std.num_nodes(),
        nodes_after: result.num_nodes(),
        measurements_removed: removals.len(),
        planes_introduced: planes_outside_xy(&result),
        metrics_before,
        metrics_after,
        layering_before_causal,
        layering_after_causal,
        guarantee,
        removals,
    };
    Ok((result, report))
}

/// Repeatedly removes adjacent internal degree-2 node pairs measured in
/// XY at angle zero, toggling the edge between their outer neighbors,
/// and regenerates the pattern from the causal flow of the reduced
/// graph. Applies only to XY-plane flow patterns; anything else is
/// returned unchanged. Node ids are renumbered densely at the end. The
/// rewrite is exact for any input state.
pub fn contract_wire_x_pairs(p: &Pattern) -> Result<(Pattern, CompactReport), PatternError> {
    let std = p.standardize()?.shift_signals().simplify();
    let (metrics_before, layering_before_causal) = metrics_with_fallback(&std);
    let mut cur = std.clone();
    let mut removals: Vec<(usize, Option<usize>)> = Vec::new();

    'outer: loop {
        if cur.measurements().any(|m| m.plane != Plane::XY)
            || cur.commands().iter().any(|c| matches!(c, Command::ApplyClifford { .. }))
        {
            break;
        }
        let g = cur.graph();
        if find_causal_flow(&g).is_none() {
            break;
        }
        let inputs: BTreeSet<usize> = cur.inputs().iter().copied().collect();
        let outputs: BTreeSet<usize> = cur.outputs().iter().copied().collect();
        let zero_x: BTreeSet<usize> =
            cur.measurements().filter(|m| m.angle.is_zero()).map(|m| m.node).collect();
        let internal = |n: usize| !inputs.contains(&n) && !outputs.contains(&n);
        let angles: BTreeMap<usize, (Plane, AngleExpr)> =
            cur.measurements().map(|m| (m.node, (m.plane, m.angle.clone()))).collect();
        let candidates: Vec<(usize, usize)> = g
            .edges()
            .filter(|&(a, b)| {
                zero_x.contains(&a)
                    && zero_x.contains(&b)
                    && g.degree(a) == 2
                    && g.degree(b) == 2
                    && internal(a)
                    && internal(b)
            })
            .collect();
        for (a, b) in candidates {
            let x = g.neighbors(a).find(|&n| n != b).unwrap();
            let y = g.neighbors(b).find(|&n| n != a).unwrap();
            if x == y {
                continue;
            }
            let mut g2 = g.clone();
            g2.remove_node(a);
            g2.remove_node(b);
            g2.toggle_edge(x, y);
            if let Some(fl2) = find_causal_flow(&g2) {
                let mut angles2 = angles.clone();
                angles2.remove(&a);
                angles2.remove(&b);
                cur = pattern_from_flow(&g2, &angles2, &fl2)?;
                removals.push((a, Some(b)));
                continue 'outer;
            }
        }
        break;
    }

    let result = cur.renumber_dense();
    let (metrics_after, layering_after_causal) = metrics_with_fallback(&result);
    let report = CompactReport {
        nodes_before: std.num_nodes(),
        nodes_after: result.num_nodes(),
        measurements_removed: removals.len() * 2,
        planes_introduced: planes_outside_xy(&result),
        metrics_before,
        metrics_after,
        layering_before_causal,
        layering_after_causal,
        guarantee: InputGuarantee::AnyInput,
        removals,
    };
    Ok((result, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angle::Binding;
    use crate::circuit::{Circuit, Gate};
    use crate::sim::{
        fidelity, simulate_pattern, validate_pattern_vs_circuit, OutcomePolicy, StateVector,
    };
    use crate::transpile::circuit_to_pattern;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Simulates projecting vertex `v` of the graph state onto the
    /// `minus` eigenstate of `axis` and checks the graph rule
    /// reproduces the post-measurement state exactly.
    fn check_rule(n: usize, edges: &[(usize, usize)], v: usize, axis: Axis, minus: bool) {
        let outputs: Vec<usize> = (0..n).filter(|&k| k != v).collect();
        let (plane, angle) = match axis {
            Axis::X => (Plane::XY, AngleExpr::zero()),
            Axis::Y => (Plane::XY, AngleExpr::pi_times(1, 2)),
            Axis::Z => (Plane::YZ, AngleExpr::zero()),
        };
        let mut cmds: Vec<Command> = (0..n).map(Command::AddNode).collect();
        cmds.extend(edges.iter().map(|&(a, b)| Command::Entangle(a, b)));
        cmds.push(Command::Measure(Measurement {
            node: v,
            plane,
            angle,
            s_domain: vec![],
            t_domain: vec![],
        }));
        let direct = Pattern::new(vec![], outputs.clone(), cmds).unwrap();
        let (want, recs) = simulate_pattern(
            &direct,
            &StateVector::zero_state(0),
            &OutcomePolicy::Fixed(vec![minus]),
            &Binding::empty(),
        )
        .unwrap();
        if recs[0].probability < 1e-9 {
            return; // impossible branch, nothing to compare
        }

        let mut g = OpenGraph::new(vec![], outputs.clone());
        for k in 0..n {
            g.add_node(k);
        }
        for &(a, b) in edges {
            g.add_edge(a, b);
        }
        let mut vops = BTreeMap::new();
        measure_graph_vertex(&mut g, &mut vops, v, axis, minus);
        let mut cmds: Vec<Command> = g.nodes().map(Command::AddNode).collect();
        cmds.extend(g.edges().map(|(a, b)| Command::Entangle(a, b)));
        for (node, op) in vops {
            if !op.is_identity() {
                cmds.push(Command::ApplyClifford { node, op });
            }
        }
        let predicted = Pattern::new(vec![], outputs, cmds).unwrap();
        let (got, _) = simulate_pattern(
            &predicted,
            &StateVector::zero_state(0),
            &OutcomePolicy::AllZero,
            &Binding::empty(),
        )
        .unwrap();
        assert!(
            fidelity(&want, &got) > 1.0 - 1e-9,
            "rule mismatch: n={n} v={v} {axis:?} minus={minus} edges={edges:?}"
        );
    }

    #[test]
    fn graph_measurement_rules_match_direct_projection() {
        let graphs: Vec<(usize, Vec<(usize, usize)>)> = vec![
            (2, vec![(0, 1)]),
            (3, vec![(0, 1), (1, 2)]),
            (3, vec![(0, 1), (1, 2), (0, 2)]),
            (4, vec![(0, 1), (1, 2), (2, 3)]),
            (5, vec![(0, 1), (0, 2), (0, 3), (0, 4)]),
            (5, vec![(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (1, 3)]),
            (4, vec![(0, 1)]), // includes isolated vertices
        ];
        for (n, edges) in &graphs {
            for v in 0..*n {
                for axis in [Axis::X, Axis::Y, Axis::Z] {
                    for minus in [false, true] {
                        check_rule(*n, edges, v, axis, minus);
                    }
                }
            }
        }
    }

    #[test]
    fn random_graph_rules_match_direct_projection() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..25 {
            let n = rng.random_range(2..6);
            let mut edges = Vec::new();
            for a in 0..n {
                for b in a + 1..n {
                    if rng.random::<f64>() < 0.5 {
                        edges.push((a, b));
                    }
                }
            }
            let v = rng.random_range(0..n);
            let axis = [Axis::X, Axis::Y, Axis::Z][rng.random_range(0..3)];
            let minus = rng.random::<bool>();
            check_rule(n, &edges, v, axis, minus);
        }
    }

    fn random_clifford_heavy_circuit(rng: &mut ChaCha8Rng, width: usize, len: usize) -> Circuit {
        let mut c = Circuit::new(width);
        for _ in 0..len {
            let q = rng.random_range(0..width);
            match rng.random_range(0..8) {
                0 => c.push(Gate::H(q)).unwrap(),
                1 => c.push(Gate::S(q)).unwrap(),
                2 => c.push(Gate::X(q)).unwrap(),
                3 => c.push(Gate::Z(q)).unwrap(),
                4 => c.push(Gate::Rz { qubit: q, angle: AngleExpr::pi_times(1, 4) }).unwrap(),
                5 => c.push(Gate::Rz { qubit: q, angle: AngleExpr::from_float(0.7) }).unwrap(),
                _ => {
                    if width > 1 {
                        let mut t = rng.random_range(0..width);
                        while t == q {
                            t = rng.random_range(0..width);
                        }
                        c.push(Gate::Cnot { control: q, target: t }).unwrap();
                    }
                }
            }
        }
        c
    }

    #[test]
    fn elimination_preserves_action_on_plus_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for case in 0..20 {
            let width = rng.random_range(1..3);
            let len = rng.random_range(2..7);
            let c = random_clifford_heavy_circuit(&mut rng, width, len);
            let p = circuit_to_pattern(&c).unwrap();
            let (q, report) = eliminate_pauli_measurements(&p).unwrap();
            let input = StateVector::plus_state(width);
            for k in 0..4u64 {
                let (a, _) =
                    simulate_pattern(&p, &input, &OutcomePolicy::Random(k), &Binding::empty())
                        .unwrap();
                let (b, _) = simulate_pattern(
                    &q,
                    &input,
                    &OutcomePolicy::Random(k + 100),
                    &Binding::empty(),
                )
                .unwrap();
                assert!(
                    fidelity(&a, &b) > 1.0 - 1e-9,
                    "case {case}: fidelity {} report {report:?}\nbefore: {p:?}\nafter: {q:?}",
                    fidelity(&a, &b)
                );
            }
            assert!(report.measurements_removed <= lc_gain_bound(&p));
        }
    }

    #[test]
    fn elimination_without_removals_is_exact_for_any_input() {
        // a pattern whose only internal measurement is non-Pauli
        let direct = Pattern::new(
            vec![0],
            vec![1],
            vec![
                Command::AddNode(1),
                Command::Entangle(0, 1),
                Command::Measure(Measurement {
                    node: 0,
                    plane: Plane::XY,
                    angle: AngleExpr::from_float(-0.4),
                    s_domain: vec![],
                    t_domain: vec![],
                }),
                Command::CorrectX { node: 1, domain: vec![0] },
            ],
        )
        .unwrap();
        let (q, report) = eliminate_pauli_measurements(&direct).unwrap();
        assert_eq!(report.measurements_removed, 0);
        assert_eq!(report.guarantee, InputGuarantee::AnyInput);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let input = crate::sim::random_state(1, &mut rng);
        let (a, _) =
            simulate_pattern(&direct, &input, &OutcomePolicy::Random(1), &Binding::empty())
                .unwrap();
        let (b, _) =
            simulate_pattern(&q, &input, &OutcomePolicy::Random(2), &Binding::empty()).unwrap();
        assert!(fidelity(&a, &b) > 1.0 - 1e-9);
    }

    #[test]
    fn elimination_keeps_interface_and_respects_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..10 {
            let width = rng.random_range(1..3);
            let c = random_clifford_heavy_circuit(&mut rng, width, 6);
            let p = circuit_to_pattern(&c).unwrap();
            let (q, report) = eliminate_pauli_measurements(&p).unwrap();
            assert_eq!(q.inputs(), p.inputs());
            assert_eq!(q.outputs(), p.outputs());
            assert!(report.measurements_removed <= lc_gain_bound(&p));
            assert_eq!(
                report.nodes_before,
                report.nodes_after + report.measurements_removed
            );
        }
    }

    #[test]
    fn contracting_the_five_node_wire_gives_the_three_node_wire() {
        let mut c = Circuit::new(1);
        for _ in 0..4 {
            c.push(Gate::H(0)).unwrap();
        }
        let five = circuit_to_pattern(&c).unwrap();
        let (three, report) = contract_wire_x_pairs(&five).unwrap();
        assert_eq!(report.measurements_removed, 2);
        assert_eq!(three.num_nodes(), 3);
        // exact command-level equality with the direct three-node chain
        let direct = Pattern::new(
            vec![0],
            vec![2],
            vec![
                Command::AddNode(1),
                Command::AddNode(2),
                Command::Entangle(0, 1),
                Command::Entangle(1, 2),
                Command::Measure(Measurement::xy(0, AngleExpr::zero())),
                Command::Measure(Measurement::xy(1, AngleExpr::zero())),
                Command::CorrectZ { node: 2, domain: vec![0] },
                Command::CorrectX { node: 2, domain: vec![1] },
            ],
        )
        .unwrap();
        assert_eq!(three, direct);
    }

    #[test]
    fn contraction_preserves_semantics_on_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        for case in 0..10 {
            let width = rng.random_range(1..3);
            let c = random_clifford_heavy_circuit(&mut rng, width, 5);
            let p = circuit_to_pattern(&c).unwrap();
            let (q, report) = contract_wire_x_pairs(&p).unwrap();
            assert_eq!(report.guarantee, InputGuarantee::AnyInput);
            let input = crate::sim::random_state(width, &mut rng);
            let (a, _) =
                simulate_pattern(&p, &input, &OutcomePolicy::Random(9), &Binding::empty()).unwrap();
            let (b, _) =
                simulate_pattern(&q, &input, &OutcomePolicy::Random(10), &Binding::empty())
                    .unwrap();
            assert!(fidelity(&a, &b) > 1.0 - 1e-9, "case {case} report {report:?}");
        }
    }

    #[test]
    fn contraction_never_worsens_width_or_degree() {
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        for _ in 0..10 {
            let width = rng.random_range(1..4);
            let c = random_clifford_heavy_circuit(&mut rng, width, 6);
            let p = circuit_to_pattern(&c).unwrap();
            let (_, report) = contract_wire_x_pairs(&p).unwrap();
            assert!(report.metrics_after.m_w <= report.metrics_before.m_w);
            assert!(report.metrics_after.m_d <= report.metrics_before.m_d);
        }
    }

    #[test]
    fn eliminated_pattern_still_validates_against_its_circuit_on_plus_input() {
        // validate_pattern_vs_circuit draws arbitrary inputs, so build
        // the comparison by hand on |+...+>
        let mut c = Circuit::new(2);
        c.push(Gate::H(0)).unwrap();
        c.push(Gate::Cnot { control: 0, target: 1 }).unwrap();
        c.push(Gate::Rz { qubit: 1, angle: AngleExpr::from_float(0.37) }).unwrap();
        let p = circuit_to_pattern(&c).unwrap();
        let (q, _) = eliminate_pauli_measurements(&p).unwrap();
        let input = StateVector::plus_state(2);
        let want = crate::sim::simulate_circuit(&c, &input, &Binding::empty()).unwrap();
        for k in 0..5 {
            let (got, _) =
                simulate_pattern(&q, &input, &OutcomePolicy::Random(k), &Binding::empty()).unwrap();
            assert!(fidelity(&want, &got) > 1.0 - 1e-9);
        }
        // and the uncompacted pattern passes full validation
        assert!(validate_pattern_vs_circuit(&p, &c, 5, 11).unwrap().pass);
    }
}
