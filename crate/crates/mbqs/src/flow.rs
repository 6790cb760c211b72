//! Causal flow discovery, flow-derived layering, and pattern metrics.
//!
//! A causal flow on an open graph is a successor function f from
//! measured nodes to non-input nodes together with a partial order such
//! that each node is adjacent to its successor, precedes it, and
//! precedes every other neighbor of it. Existence guarantees the pattern
//! can be run deterministically with X corrections on f(i) and Z
//! corrections on the remaining neighbors of f(i).
//!
//! Layers are the maximally-delayed schedule: outputs sit at layer 0 and
//! measurements at layer k can only fire after everything at layers
//! below k-... above k has been measured. Metrics are read off the graph
//! and that layering.

use std::collections::{BTreeMap, BTreeSet};

use crate::angle::PauliClass;
use crate::pattern::{Command, Measurement, OpenGraph, Pattern, Plane};
use crate::error::PatternError;

/// Successor function and maximally-delayed layering of a causal flow.
/// Outputs occupy layer 0; larger layers are measured earlier.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowLayering {
    pub successor: BTreeMap<usize, usize>,
    pub layer: BTreeMap<usize, usize>,
}

impl FlowLayering {
    pub fn num_layers(&self) -> usize {
        self.layer.values().max().map_or(0, |&m| m + 1)
    }
}

/// Finds a causal flow by reverse peeling: starting from the outputs, a
/// processed non-input node with exactly one unprocessed neighbor
/// corrects that neighbor, and all such assignments in a round share a
/// layer. Returns None when the peeling stalls before covering every
/// node (no causal flow exists). Correctors are scanned in ascending id
/// order, which fixes the successor choice deterministically.
pub fn find_causal_flow(g: &OpenGraph) -> Option<FlowLayering> {
    let inputs: BTreeSet<usize> = g.inputs().iter().copied().collect();
    let mut processed: BTreeSet<usize> = g.outputs().iter().copied().collect();
    let mut layer: BTreeMap<usize, usize> = g.outputs().iter().map(|&o| (o, 0)).collect();
    let mut successor: BTreeMap<usize, usize> = BTreeMap::new();

    let mut remaining: usize = g.num_nodes() - processed.len();
    let mut round = 0usize;
    while remaining > 0 {
        round += 1;
        let mut assignments: Vec<(usize, usize)> = Vec::new();
        let mut claimed: BTreeSet<usize> = BTreeSet::new();
        for v in processed.iter().copied() {
            if inputs.contains(&v) {
                continue;
            }
            let mut unprocessed = g.neighbors(v).filter(|n| !processed.contains(n));
            let (first, second) = (unprocessed.next(), unprocessed.next());
            if let (Some(u), None) = (first, second) {
                if claimed.insert(u) {
                    assignments.push((u, v));
                }
            }
        }
        if assignments.is_empty() {
            return None;
        }
        for (u, v) in assignments {
            successor.insert(u, v);
            layer.insert(u, round);
            processed.insert(u);
            remaining -= 1;
        }
    }
    Some(FlowLayering { successor, layer })
}

/// Independent validity check of a successor function plus layering
/// against the flow conditions: f(i) is a non-input neighbor of i, i
/// strictly precedes f(i), and i strictly precedes every other neighbor
/// of f(i) (earlier measurement means a larger layer). Every non-output
/// node must be assigned and every node layered.
pub fn check_flow(g: &OpenGraph, fl: &FlowLayering) -> Result<(), String> {
    let inputs: BTreeSet<usize> = g.inputs().iter().copied().collect();
    let outputs: BTreeSet<usize> = g.outputs().iter().copied().collect();
    for n in g.nodes() {
        if !fl.layer.contains_key(&n) {
            return Err(format!("node {n} has no layer"));
        }
        if outputs.contains(&n) {
            if fl.layer[&n] != 0 {
                return Err(format!("output {n} not at layer 0"));
            }
            continue;
        }
        let f = match fl.successor.get(&n) {
            Some(&f) => f,
            None => return Err(format!("measured node {n} has no successor")),
        };
        if inputs.contains(&f) {
            return Err(format!("successor {f} of {n} is an input"));
        }
        if !g.has_edge(n, f) {
            return Err(format!("successor {f} of {n} is not adjacent"));
        }
        if fl.layer[&n] <= fl.layer[&f] {
            return Err(format!("node {n} does not precede its successor {f}"));
        }
        for k in g.neighbors(f) {
            if k != n && fl.layer[&n] <= fl.layer[&k] {
                return Err(format!("node {n} does not precede {k}, a neighbor of f({n})={f}"));
            }
        }
    }
    Ok(())
}

/// Layering fallback for patterns without causal flow (compactified
/// remnants): a measurement's distance from the end is one more than the
/// largest distance among the signals it depends on, outputs close at
/// layer 0, and layers count down toward the outputs as in the flow
/// case.
pub fn dependency_layering(p: &Pattern) -> FlowLayering {
    let mut depth: BTreeMap<usize, usize> = BTreeMap::new();
    let mut max_depth = 0usize;
    for m in p.measurements() {
        let d = m
            .s_domain
            .iter()
            .chain(&m.t_domain)
            .map(|dep| depth.get(dep).copied().unwrap_or(0))
            .max()
            .map_or(1, |d| d + 1);
        depth.insert(m.node, d);
        max_depth = max_depth.max(d);
    }
    let mut layer: BTreeMap<usize, usize> = BTreeMap::new();
    for n in p.nodes() {
        let l = match depth.get(&n) {
            Some(&d) => max_depth + 1 - d,
            None => 0,
        };
        layer.insert(n, l);
    }
    FlowLayering { successor: BTreeMap::new(), layer }
}

/// Size, connectivity, measurement-class, and depth summary of a
/// pattern under a given layering.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Metrics {
    /// node count
    pub n: usize,
    /// edge count
    pub n_e: usize,
    /// maximum degree
    pub m_d: usize,
    /// measurements at an angle that is a multiple of pi
    pub pauli_x: usize,
    /// measurements at an odd multiple of pi/2
    pub pauli_y: usize,
    /// total Pauli measurements
    pub n_p: usize,
    /// maximum number of measurements in one layer
    pub m_w: usize,
    /// number of layers, output layer included
    pub n_l: usize,
    /// maximum layer distance across an edge
    pub m_ld: usize,
}

pub fn compute_metrics(p: &Pattern, fl: &FlowLayering) -> Metrics {
    let g = p.graph();
    let mut pauli_x = 0usize;
    let mut pauli_y = 0usize;
    let mut per_layer: BTreeMap<usize, usize> = BTreeMap::new();
    for m in p.measurements() {
        match m.angle.pauli_class() {
            Some(PauliClass::X) => pauli_x += 1,
            Some(PauliClass::Y) => pauli_y += 1,
            None => {}
        }
        *per_layer.entry(fl.layer[&m.node]).or_insert(0) += 1;
    }
    let m_ld = g
        .edges()
        .map(|(a, b)| fl.layer[&a].abs_diff(fl.layer[&b]))
        .max()
        .unwrap_or(0);
    Metrics {
        n: g.num_nodes(),
        n_e: g.num_edges(),
        m_d: g.max_degree(),
        pauli_x,
        pauli_y,
        n_p: pauli_x + pauli_y,
        m_w: per_layer.values().max().copied().unwrap_or(0),
        n_l: fl.num_layers(),
        m_ld,
    }
}

/// Rebuilds a runnable pattern from an open graph, per-node measurement
/// assignments, and a causal flow: nodes are measured in descending
/// layer order (ascending id within a layer), each measurement of i is
/// followed by the canonical X correction on f(i) and Z corrections on
/// the other neighbors of f(i), and the result is standardized, shifted,
/// and simplified.
pub fn pattern_from_flow(
    g: &OpenGraph,
    angles: &BTreeMap<usize, (Plane, crate::angle::AngleExpr)>,
    fl: &FlowLayering,
) -> Result<Pattern, PatternError> {
    let inputs: BTreeSet<usize> = g.inputs().iter().copied().collect();
    let outputs: BTreeSet<usize> = g.outputs().iter().copied().collect();
    let mut commands: Vec<Command> = Vec::new();
    for n in g.nodes() {
        if !inputs.contains(&n) {
            commands.push(Command::AddNode(n));
        }
    }
    for (a, b) in g.edges() {
        commands.push(Command::Entangle(a, b));
    }
    let mut order: Vec<usize> = g.nodes().filter(|n| !outputs.contains(n)).collect();
    order.sort_by_key(|n| (usize::MAX - fl.layer[n], *n));
    for i in order {
        let (plane, angle) = angles
            .get(&i)
            .cloned()
            .ok_or(PatternError::UnmeasuredNode { node: i })?;
        commands.push(Command::Measure(Measurement {
            node: i,
            plane,
            angle,
            s_domain: Vec::new(),
            t_domain: Vec::new(),
        }));
        let f = fl.successor[&i];
        commands.push(Command::CorrectX { node: f, domain: vec![i] });
        for k in g.neighbors(f) {
            if k != i {
                commands.push(Command::CorrectZ { node: k, domain: vec![i] });
            }
        }
    }
    let p = Pattern::new(g.inputs().to_vec(), g.outputs().to_vec(), commands)?;
    Ok(p.standardize()?.shift_signals().simplify())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angle::AngleExpr;
    use crate::pattern::Measurement;

    fn chain(n: usize) -> OpenGraph {
        let mut g = OpenGraph::new(vec![0], vec![n - 1]);
        for i in 0..n - 1 {
            g.add_edge(i, i + 1);
        }
        g
    }

    #[test]
    fn chain_flow_layers_count_down_from_the_input() {
        let g = chain(5);
        let fl = find_causal_flow(&g).expect("chain has causal flow");
        check_flow(&g, &fl).unwrap();
        for (i, l) in [(0usize, 4usize), (1, 3), (2, 2), (3, 1), (4, 0)] {
            assert_eq!(fl.layer[&i], l);
        }
        for i in 0..4usize {
            assert_eq!(fl.successor[&i], i + 1);
        }
        assert_eq!(fl.num_layers(), 5);
    }

    #[test]
    fn flowless_graph_is_rejected() {
        // two inputs feeding one output through a shared middle node:
        // the middle cannot correct both inputs.
        let mut g = OpenGraph::new(vec![0, 1], vec![3]);
        g.add_edge(0, 2);
        g.add_edge(1, 2);
        g.add_edge(2, 3);
        assert!(find_causal_flow(&g).is_none());
    }

    #[test]
    fn check_flow_rejects_corrupted_layerings() {
        let g = chain(3);
        let fl = find_causal_flow(&g).unwrap();
        let mut bad = fl.clone();
        bad.layer.insert(0, 1);
        assert!(check_flow(&g, &bad).is_err());
        let mut bad = fl.clone();
        bad.successor.insert(0, 2);
        assert!(check_flow(&g, &bad).is_err());
        let mut bad = fl;
        bad.successor.remove(&1);
        assert!(check_flow(&g, &bad).is_err());
    }

    #[test]
    fn metrics_of_the_five_node_chain() {
        let mut cmds = Vec::new();
        for k in 1..5usize {
            cmds.push(Command::AddNode(k));
        }
        for k in 0..4usize {
            cmds.push(Command::Entangle(k, k + 1));
        }
        for k in 0..4usize {
            cmds.push(Command::Measure(Measurement::xy(k, AngleExpr::zero())));
        }
        let p = Pattern::new(vec![0], vec![4], cmds).unwrap();
        let fl = find_causal_flow(&p.graph()).unwrap();
        let m = compute_metrics(&p, &fl);
        assert_eq!(
            m,
            Metrics {
                n: 5,
                n_e: 4,
                m_d: 2,
                pauli_x: 4,
                pauli_y: 0,
                n_p: 4,
                m_w: 1,
                n_l: 5,
                m_ld: 1
            }
        );
    }

    #[test]
    fn dependency_layering_orders_by_signal_depth() {
        // measurements: 0 free, 1 free, 2 depends on 1
        let cmds = vec![
            Command::AddNode(1),
            Command::AddNode(2),
            Command::AddNode(3),
            Command::Entangle(0, 1),
            Command::Entangle(1, 2),
            Command::Entangle(2, 3),
            Command::Measure(Measurement::xy(0, AngleExpr::zero())),
            Command::Measure(Measurement::xy(1, AngleExpr::pi_times(1, 4))),
            Command::Measure(
                Measurement::xy(2, AngleExpr::pi_times(1, 4)).with_s_domain(vec![1]),
            ),
        ];
        let p = Pattern::new(vec![0], vec![3], cmds).unwrap();
        let fl = dependency_layering(&p);
        assert_eq!(fl.layer[&3], 0);
        assert_eq!(fl.layer[&2], 1);
        assert_eq!(fl.layer[&0], 2);
        assert_eq!(fl.layer[&1], 2);
        assert_eq!(fl.num_layers(), 3);
    }

    #[test]
    fn pattern_from_flow_rebuilds_the_identity_chain() {
        let g = chain(3);
        let fl = find_causal_flow(&g).unwrap();
        let mut angles = BTreeMap::new();
        angles.insert(0, (Plane::XY, AngleExpr::zero()));
        angles.insert(1, (Plane::XY, AngleExpr::zero()));
        let p = pattern_from_flow(&g, &angles, &fl).unwrap();
        let cmds = p.commands();
        assert_eq!(
            cmds,
            &[
                Command::AddNode(1),
                Command::AddNode(2),
                Command::Entangle(0, 1),
                Command::Entangle(1, 2),
                Command::Measure(Measurement::xy(0, AngleExpr::zero())),
                Command::Measure(Measurement::xy(1, AngleExpr::zero())),
                Command::CorrectZ { node: 2, domain: vec![0] },
                Command::CorrectX { node: 2, domain: vec![1] },
            ]
        );
    }
}
