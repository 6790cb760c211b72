//! Measurement-calculus pattern intermediate representation.
//!
//! A pattern is an ordered command sequence over an open graph state:
//! node preparations (N), entangling CZ operations (E), adaptive
//! single-qubit measurements (M) whose angles depend on earlier outcomes
//! through signal domains, and Pauli byproduct corrections (X, Z) on
//! later nodes. Commands execute left to right. A pattern in standard
//! form lists all N, then all E, then all M, then corrections; signal
//! shifting additionally removes every t-domain so only sign-flip
//! dependencies remain.
//!
//! Signal domains are sets of node ids with XOR semantics: the signal of
//! a domain is the parity of the recorded outcomes of its members. An
//! s-domain flips the measurement angle's sign, a t-domain adds pi.
//!
//! Two command kinds go beyond the v1.0 file grammar and appear only in
//! compactified patterns or internal rewrites: `ApplyClifford` (a local
//! Clifford on an output node) and `ShiftSignal` (an explicit signal
//! substitution, eliminated by `shift_signals`).

use std::collections::{BTreeMap, BTreeSet};

use crate::angle::AngleExpr;
use crate::clifford::LocalClifford;
use crate::error::PatternError;

/// Measurement plane. Generator output is XY-only; YZ and XZ arise from
/// compactification folding local Cliffords into measurement bases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Plane {
    XY,
    YZ,
    XZ,
}

impl Plane {
    pub fn name(&self) -> &'static str {
        match self {
            Plane::XY => "XY",
            Plane::YZ => "YZ",
            Plane::XZ => "XZ",
        }
    }
}

/// A single adaptive measurement. The measured basis angle is
/// `(-1)^(parity of s_domain outcomes) * angle + (parity of t_domain) * pi`.
#[derive(Clone, Debug, PartialEq)]
pub struct Measurement {
    pub node: usize,
    pub plane: Plane,
    pub angle: AngleExpr,
    pub s_domain: Vec<usize>,
    pub t_domain: Vec<usize>,
}

impl Measurement {
    /// XY-plane measurement with no dependencies.
    pub fn xy(node: usize, angle: AngleExpr) -> Self {
        Measurement { node, plane: Plane::XY, angle, s_domain: Vec::new(), t_domain: Vec::new() }
    }

    pub fn with_s_domain(mut self, s: Vec<usize>) -> Self {
        self.s_domain = s;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    /// N(i): prepare node i in |+>.
    AddNode(usize),
    /// E(i,j): apply CZ between nodes i and j.
    Entangle(usize, usize),
    /// M(...): measure a node adaptively.
    Measure(Measurement),
    /// X(i,{...}): Pauli X on node i conditioned on the domain parity.
    CorrectX { node: usize, domain: Vec<usize> },
    /// Z(i,{...}): Pauli Z on node i conditioned on the domain parity.
    CorrectZ { node: usize, domain: Vec<usize> },
    /// C(i,word): unconditional local Clifford on an output node
    /// (compactified patterns only).
    ApplyClifford { node: usize, op: LocalClifford },
    /// Internal signal substitution; never written to files.
    ShiftSignal { node: usize, domain: Vec<usize> },
}

impl Command {
    fn is_kind_order(&self) -> u8 {
        match self {
            Command::AddNode(_) => 0,
            Command::Entangle(..) => 1,
            Command::Measure(_) => 2,
            Command::ApplyClifford { .. } => 3,
            Command::CorrectX { .. } | Command::CorrectZ { .. } => 4,
            Command::ShiftSignal { .. } => 5,
        }
    }
}

/// Dynamic bitset over node ids with XOR-merge semantics. Domain algebra
/// during standardization and signal shifting is all symmetric
/// difference, which is word-parallel here.
#[derive(Clone, Debug, Default, PartialEq)]
pub(crate) struct NodeSet {
    words: Vec<u64>,
}

impl NodeSet {
    pub(crate) fn new() -> Self {
        NodeSet::default()
    }

    pub(crate) fn from_slice(ids: &[usize]) -> Self {
        let mut s = NodeSet::new();
        for &i in ids {
            s.toggle(i);
        }
        s
    }

    fn grow(&mut self, i: usize) {
        let need = i / 64 + 1;
        if self.words.len() < need {
            self.words.resize(need, 0);
        }
    }

    pub(crate) fn toggle(&mut self, i: usize) {
        self.grow(i);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    #[cfg(test)]
    pub(crate) fn contains(&self, i: usize) -> bool {
        self.words.get(i / 64).is_some_and(|w| w >> (i % 64) & 1 == 1)
    }

    pub(crate) fn xor_with(&mut self, other: &NodeSet) {
        if self.words.len() < other.words.len() {
            self.words.resize(other.words.len(), 0);
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Member ids in ascending order.
    pub(crate) fn to_vec(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (wi, &w) in self.words.iter().enumerate() {
            let mut bits = w;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                out.push(wi * 64 + b);
                bits &= bits - 1;
            }
        }
        out
    }
}

/// An ordered command sequence with designated input and output nodes.
/// Well-formedness is checked on construction; transformation operations
/// return new patterns.
#[derive(Clone, Debug, PartialEq)]
pub struct Pattern {
    inputs: Vec<usize>,
    outputs: Vec<usize>,
    commands: Vec<Command>,
    symbols: BTreeSet<usize>,
}

impl Pattern {
    /// Validates well-formedness: nodes declared before use, every
    /// non-output measured exactly once, outputs never measured, domains
    /// referencing only earlier measurements, simple graph.
    pub fn new(
        inputs: Vec<usize>,
        outputs: Vec<usize>,
        commands: Vec<Command>,
    ) -> Result<Self, PatternError> {
        let mut declared: BTreeSet<usize> = BTreeSet::new();
        for &i in &inputs {
            if !declared.insert(i) {
                return Err(PatternError::DuplicateNode { index: 0, node: i });
            }
        }
        {
            let mut outs = BTreeSet::new();
            for &o in &outputs {
                if !outs.insert(o) {
                    return Err(PatternError::DuplicateNode { index: 0, node: o });
                }
            }
        }
        let output_set: BTreeSet<usize> = outputs.iter().copied().collect();
        let mut measured: BTreeSet<usize> = BTreeSet::new();
        let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
        let mut symbols = BTreeSet::new();

        let check_domain = |index: usize, dom: &[usize], measured: &BTreeSet<usize>| {
            let mut seen = BTreeSet::new();
            for &d in dom {
                if !measured.contains(&d) || !seen.insert(d) {
                    return Err(PatternError::ForwardDomain { index, dep: d });
                }
            }
            Ok(())
        };

        for (index, cmd) in commands.iter().enumerate() {
            match cmd {
                Command::AddNode(i) => {
                    if !declared.insert(*i) {
                        return Err(PatternError::DuplicateNode { index, node: *i });
                    }
                }
                Command::Entangle(i, j) => {
                    if i == j {
                        return Err(PatternError::SelfLoop { index, node: *i });
                    }
                    for n in [i, j] {
                        if !declared.contains(n) {
                            return Err(PatternError::UnknownNode { index, node: *n });
                        }
                        if measured.contains(n) {
                            return Err(PatternError::UseAfterMeasure { index, node: *n });
                        }
                    }
                    let key = (*i.min(j), *i.max(j));
                    if !edges.insert(key) {
                        return Err(PatternError::DuplicateEdge { index, a: key.0, b: key.1 });
                    }
                }
                Command::Measure(m) => {
                    if !declared.contains(&m.node) {
                        return Err(PatternError::UnknownNode { index, node: m.node });
                    }
                    if output_set.contains(&m.node) {
                        return Err(PatternError::MeasuredOutput { node: m.node });
                    }
                    if measured.contains(&m.node) {
                        return Err(PatternError::DoubleMeasure { index, node: m.node });
                    }
                    check_domain(index, &m.s_domain, &measured)?;
                    check_domain(index, &m.t_domain, &measured)?;
                    symbols.extend(m.angle.symbols());
                    measured.insert(m.node);
                }
                Command::CorrectX { node, domain }
                | Command::CorrectZ { node, domain }
                | Command::ShiftSignal { node, domain } => {
                    let shift = matches!(cmd, Command::ShiftSignal { .. });
                    if !declared.contains(node) {
                        return Err(PatternError::UnknownNode { index, node: *node });
                    }
                    // Corrections act on live nodes; a shift refers to an
                    // already-recorded signal instead.
                    if !shift && measured.contains(node) {
                        return Err(PatternError::UseAfterMeasure { index, node: *node });
                    }
                    if shift && !measured.contains(node) {
                        return Err(PatternError::ForwardDomain { index, dep: *node });
                    }
                    check_domain(index, domain, &measured)?;
                }
                Command::ApplyClifford { node, .. } => {
                    if !declared.contains(node) {
                        return Err(PatternError::UnknownNode { index, node: *node });
                    }
                    if measured.contains(node) {
                        return Err(PatternError::UseAfterMeasure { index, node: *node });
                    }
                }
            }
        }

        for &o in &outputs {
            if !declared.contains(&o) {
                return Err(PatternError::OutputNotDeclared { node: o });
            }
        }
        for &n in &declared {
            if !output_set.contains(&n) && !measured.contains(&n) {
                return Err(PatternError::UnmeasuredNode { node: n });
            }
        }

        Ok(Pattern { inputs, outputs, commands, symbols })
    }

    /// A width-k pattern with no commands: inputs pass straight to outputs.
    pub fn identity(width: usize) -> Self {
        let wires: Vec<usize> = (0..width).collect();
        Pattern::new(wires.clone(), wires, Vec::new()).unwrap()
    }

    pub fn inputs(&self) -> &[usize] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn commands(&self) -> &[Command] {
        &self.commands
    }

    /// Coefficient symbols referenced by measurement angles.
    pub fn symbols(&self) -> impl Iterator<Item = usize> + '_ {
        self.symbols.iter().copied()
    }

    pub fn measurements(&self) -> impl Iterator<Item = &Measurement> {
        self.commands.iter().filter_map(|c| match c {
            Command::Measure(m) => Some(m),
            _ => None,
        })
    }

    /// All node ids: inputs plus declared nodes.
    pub fn nodes(&self) -> BTreeSet<usize> {
        let mut set: BTreeSet<usize> = self.inputs.iter().copied().collect();
        for c in &self.commands {
            if let Command::AddNode(i) = c {
                set.insert(*i);
            }
        }
        set
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes().len()
    }

    pub fn max_node_id(&self) -> usize {
        self.nodes().iter().max().copied().unwrap_or(0)
    }

    /// Sequential composition: runs `self` first, then `later`, whose
    /// k-th input attaches to this pattern's k-th output. Nodes of
    /// `later` that are not inputs are renamed above this pattern's ids
    /// (ascending, in id order), so the two command lists concatenate
    /// without collision. The junction must stay a simple graph: if
    /// `later` entangles two of its inputs along an edge `self` already
    /// created between the matching outputs, composition fails. Patterns
    /// produced by the transpiler route every two-qubit interaction
    /// through a measured node, so they never trip this.
    pub fn then(&self, later: &Pattern) -> Result<Pattern, PatternError> {
        if later.inputs().len() != self.outputs().len() {
            return Err(PatternError::InterfaceChanged {
                reason: format!(
                    "cannot chain {} outputs into {} inputs",
                    self.outputs().len(),
                    later.inputs().len()
                ),
            });
        }
        let mut map: BTreeMap<usize, usize> = BTreeMap::new();
        for (&i, &o) in later.inputs().iter().zip(self.outputs()) {
            map.insert(i, o);
        }
        let mut next = self.max_node_id() + 1;
        for n in later.nodes() {
            map.entry(n).or_insert_with(|| {
                next += 1;
                next - 1
            });
        }
        let md = |dom: &[usize]| -> Vec<usize> { dom.iter().map(|d| map[d]).collect() };
        let mut commands = self.commands.clone();
        commands.reserve(later.commands.len());
        for cmd in &later.commands {
            commands.push(match cmd {
                Command::AddNode(i) => Command::AddNode(map[i]),
                Command::Entangle(a, b) => Command::Entangle(map[a], map[b]),
                Command::Measure(m) => Command::Measure(Measurement {
                    node: map[&m.node],
                    plane: m.plane,
                    angle: m.angle.clone(),
                    s_domain: md(&m.s_domain),
                    t_domain: md(&m.t_domain),
                }),
                Command::CorrectX { node, domain } => {
                    Command::CorrectX { node: map[node], domain: md(domain) }
                }
                Command::CorrectZ { node, domain } => {
                    Command::CorrectZ { node: map[node], domain: md(domain) }
                }
                Command::ApplyClifford { node, op } => {
                    Command::ApplyClifford { node: map[node], op: *op }
                }
                Command::ShiftSignal { node, domain } => {
                    Command::ShiftSignal { node: map[node], domain: md(domain) }
                }
            });
        }
        let outputs = later.outputs().iter().map(|o| map[o]).collect();
        Pattern::new(self.inputs.clone(), outputs, commands)
    }

    /// NEMC phase order, with Clifford commands between measurements and
    /// corrections.
    pub fn is_standard(&self) -> bool {
        let mut phase = 0u8;
        for c in &self.commands {
            let k = c.is_kind_order();
            if k == 5 {
                return false;
            }
            if k < phase {
                return false;
            }
            phase = k;
        }
        true
    }

    /// True when no t-domains and no explicit shifts remain.
    pub fn is_shifted(&self) -> bool {
        self.commands.iter().all(|c| match c {
            Command::Measure(m) => m.t_domain.is_empty(),
            Command::ShiftSignal { .. } => false,
            _ => true,
        })
    }

    /// Rewrites into NEMC standard form: E commands move before
    /// measurements and corrections propagate rightward, folding into the
    /// measurement domains they cross (X flips the angle sign, Z adds pi,
    /// with the plane-specific variants for YZ/XZ) and accumulating on
    /// output nodes as trailing Z-then-X correction blocks. Semantics are
    /// preserved for every binding and outcome assignment, up to a
    /// branch-dependent global phase.
    pub fn standardize(&self) -> Result<Pattern, PatternError> {
        let mut node_cmds = Vec::new();
        let mut edge_cmds = Vec::new();
        let mut meas_cmds: Vec<Measurement> = Vec::new();
        let mut pending_x: BTreeMap<usize, NodeSet> = BTreeMap::new();
        let mut pending_z: BTreeMap<usize, NodeSet> = BTreeMap::new();

        for (index, cmd) in self.commands.iter().enumerate() {
            match cmd {
                Command::AddNode(i) => node_cmds.push(*i),
                Command::Entangle(i, j) => {
                    // CZ * X_i = X_i Z_j * CZ: a deferred X picks up a Z
                    // on the partner as the edge moves left past it.
                    if let Some(sx) = pending_x.get(i) {
                        let sx = sx.clone();
                        pending_z.entry(*j).or_default().xor_with(&sx);
                    }
                    if let Some(sx) = pending_x.get(j) {
                        let sx = sx.clone();
                        pending_z.entry(*i).or_default().xor_with(&sx);
                    }
                    edge_cmds.push((*i, *j));
                }
                Command::Measure(m) => {
                    let sx = pending_x.remove(&m.node).filter(|s| !s.is_empty());
                    let sz = pending_z.remove(&m.node).filter(|s| !s.is_empty());
                    if sx.is_none() && sz.is_none() {
                        meas_cmds.push(m.clone());
                        continue;
                    }
                    let mut s = NodeSet::from_slice(&m.s_domain);
                    let mut t = NodeSet::from_slice(&m.t_domain);
                    let sx = sx.unwrap_or_default();
                    let sz = sz.unwrap_or_default();
                    match m.plane {
                        Plane::XY => {
                            s.xor_with(&sx);
                            t.xor_with(&sz);
                        }
                        Plane::XZ => {
                            s.xor_with(&sx);
                            t.xor_with(&sx);
                            s.xor_with(&sz);
                        }
                        Plane::YZ => {
                            t.xor_with(&sx);
                            s.xor_with(&sz);
                        }
                    }
                    let mut m2 = m.clone();
                    m2.s_domain = s.to_vec();
                    m2.t_domain = t.to_vec();
                    meas_cmds.push(m2);
                }
                Command::CorrectX { node, domain } => {
                    pending_x.entry(*node).or_default().xor_with(&NodeSet::from_slice(domain));
                }
                Command::CorrectZ { node, domain } => {
                    pending_z.entry(*node).or_default().xor_with(&NodeSet::from_slice(domain));
                }
                Command::ApplyClifford { .. } | Command::ShiftSignal { .. } => {
                    return Err(PatternError::Token {
                        index,
                        token: format!("{cmd:?}"),
                        reason: "standardization only handles N/E/M/X/Z command streams".into(),
                    });
                }
            }
        }

        let mut commands: Vec<Command> = Vec::new();
        commands.extend(node_cmds.into_iter().map(Command::AddNode));
        commands.extend(edge_cmds.into_iter().map(|(i, j)| Command::Entangle(i, j)));
        commands.extend(meas_cmds.into_iter().map(Command::Measure));
        for (&node, dom) in &pending_z {
            if !dom.is_empty() {
                commands.push(Command::CorrectZ { node, domain: dom.to_vec() });
            }
        }
        for (&node, dom) in &pending_x {
            if !dom.is_empty() {
                commands.push(Command::CorrectX { node, domain: dom.to_vec() });
            }
        }
        Pattern::new(self.inputs.clone(), self.outputs.clone(), commands)
    }

    /// Removes every t-domain by outcome relabeling: a measurement at
    /// angle a + pi equals the measurement at a with the outcome bit
    /// flipped, so the t-parity is substituted into all later references
    /// to this node's signal. Explicit `ShiftSignal` commands are folded
    /// the same way and dropped.
    pub fn shift_signals(&self) -> Pattern {
        // delta[i] = sigma(i) xor {i}, stored only when nontrivial
        let mut delta: BTreeMap<usize, NodeSet> = BTreeMap::new();
        let expand = |dom: &[usize], delta: &BTreeMap<usize, NodeSet>| -> NodeSet {
            let mut out = NodeSet::from_slice(dom);
            for d in dom {
                if let Some(extra) = delta.get(d) {
                    out.xor_with(extra);
                }
            }
            out
        };

        let mut commands = Vec::with_capacity(self.commands.len());
        for cmd in &self.commands {
            match cmd {
                Command::Measure(m) => {
                    let s = expand(&m.s_domain, &delta);
                    let t = expand(&m.t_domain, &delta);
                    let mut m2 = m.clone();
                    m2.s_domain = s.to_vec();
                    m2.t_domain = Vec::new();
                    if !t.is_empty() {
                        delta.insert(m.node, t);
                    }
                    commands.push(Command::Measure(m2));
                }
                Command::CorrectX { node, domain } => {
                    commands.push(Command::CorrectX {
                        node: *node,
                        domain: expand(domain, &delta).to_vec(),
                    });
                }
                Command::CorrectZ { node, domain } => {
                    commands.push(Command::CorrectZ {
                        node: *node,
                        domain: expand(domain, &delta).to_vec(),
                    });
                }
                Command::ShiftSignal { node, domain } => {
                    let extra = expand(domain, &delta);
                    let slot = delta.entry(*node).or_default();
                    slot.xor_with(&extra);
                    if slot.is_empty() {
                        delta.remove(node);
                    }
                }
                other => commands.push(other.clone()),
            }
        }
        Pattern::new(self.inputs.clone(), self.outputs.clone(), commands)
            .expect("signal shifting preserves well-formedness")
    }

    /// Drops semantically inert clutter: s-domains on measurements whose
    /// angle is an exact multiple of pi (the sign flip does nothing
    /// there), and correction commands whose domain is empty.
    pub fn simplify(&self) -> Pattern {
        let commands = self
            .commands
            .iter()
            .filter_map(|cmd| match cmd {
                Command::Measure(m) => {
                    let mut m2 = m.clone();
                    if !m2.s_domain.is_empty() && angle_is_multiple_of_pi(&m2.angle) {
                        m2.s_domain = Vec::new();
                    }
                    Some(Command::Measure(m2))
                }
                Command::CorrectX { domain, .. } | Command::CorrectZ { domain, .. }
                    if domain.is_empty() =>
                {
                    None
                }
                other => Some(other.clone()),
            })
            .collect();
        Pattern::new(self.inputs.clone(), self.outputs.clone(), commands)
            .expect("dropping inert commands preserves well-formedness")
    }

    /// Sequential composition: `second`'s inputs are identified with
    /// `first`'s outputs positionally, `second`'s other nodes are
    /// relabeled above `first`'s largest id, and the combined command
    /// stream is standardized, signal-shifted, and simplified.
    pub fn concat(first: &Pattern, second: &Pattern) -> Result<Pattern, PatternError> {
        if first.outputs.len() != second.inputs.len() {
            return Err(PatternError::InterfaceChanged {
                reason: format!(
                    "cannot chain {} outputs into {} inputs",
                    first.outputs.len(),
                    second.inputs.len()
                ),
            });
        }
        let offset = first.max_node_id() + 1;
        let map_node = |n: usize| -> usize {
            match second.inputs.iter().position(|&i| i == n) {
                Some(pos) => first.outputs[pos],
                None => n + offset,
            }
        };
        let map_dom = |dom: &[usize]| -> Vec<usize> { dom.iter().map(|&d| map_node(d)).collect() };

        let mut commands = first.commands.clone();
        for cmd in &second.commands {
            commands.push(match cmd {
                Command::AddNode(i) => Command::AddNode(map_node(*i)),
                Command::Entangle(i, j) => Command::Entangle(map_node(*i), map_node(*j)),
                Command::Measure(m) => Command::Measure(Measurement {
                    node: map_node(m.node),
                    plane: m.plane,
                    angle: m.angle.clone(),
                    s_domain: map_dom(&m.s_domain),
                    t_domain: map_dom(&m.t_domain),
                }),
                Command::CorrectX { node, domain } => {
                    Command::CorrectX { node: map_node(*node), domain: map_dom(domain) }
                }
                Command::CorrectZ { node, domain } => {
                    Command::CorrectZ { node: map_node(*node), domain: map_dom(domain) }
                }
                Command::ApplyClifford { node, op } => {
                    Command::ApplyClifford { node: map_node(*node), op: *op }
                }
                Command::ShiftSignal { node, domain } => {
                    Command::ShiftSignal { node: map_node(*node), domain: map_dom(domain) }
                }
            });
        }
        let outputs = second.outputs.iter().map(|&o| map_node(o)).collect();
        let merged = Pattern::new(first.inputs.clone(), outputs, commands)?;
        Ok(merged.standardize()?.shift_signals().simplify())
    }

    /// The underlying open graph: nodes, CZ edges, input/output subsets.
    pub fn graph(&self) -> OpenGraph {
        let mut g = OpenGraph::new(self.inputs.clone(), self.outputs.clone());
        for n in self.nodes() {
            g.add_node(n);
        }
        for c in &self.commands {
            if let Command::Entangle(i, j) = c {
                g.add_edge(*i, *j);
            }
        }
        g
    }

    /// Relabels nodes to 0..n-1 preserving id order (inputs keep the
    /// lowest ids when they had them, which generator output guarantees).
    pub fn renumber_dense(&self) -> Pattern {
        let nodes = self.nodes();
        let map: BTreeMap<usize, usize> =
            nodes.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        let m = |n: usize| map[&n];
        let md = |dom: &[usize]| -> Vec<usize> { dom.iter().map(|&d| m(d)).collect() };
        let commands = self
            .commands
            .iter()
            .map(|cmd| match cmd {
                Command::AddNode(i) => Command::AddNode(m(*i)),
                Command::Entangle(i, j) => Command::Entangle(m(*i), m(*j)),
                Command::Measure(meas) => Command::Measure(Measurement {
                    node: m(meas.node),
                    plane: meas.plane,
                    angle: meas.angle.clone(),
                    s_domain: md(&meas.s_domain),
                    t_domain: md(&meas.t_domain),
                }),
                Command::CorrectX { node, domain } => {
                    Command::CorrectX { node: m(*node), domain: md(domain) }
                }
                Command::CorrectZ { node, domain } => {
                    Command::CorrectZ { node: m(*node), domain: md(domain) }
                }
                Command::ApplyClifford { node, op } => {
                    Command::ApplyClifford { node: m(*node), op: *op }
                }
                Command::ShiftSignal { node, domain } => {
                    Command::ShiftSignal { node: m(*node), domain: md(domain) }
                }
            })
            .collect();
        Pattern::new(
            self.inputs.iter().map(|&i| m(i)).collect(),
            self.outputs.iter().map(|&o| m(o)).collect(),
            commands,
        )
        .expect("dense renumbering preserves well-formedness")
    }
}

fn angle_is_multiple_of_pi(a: &AngleExpr) -> bool {
    !a.has_symbols() && a.float_part() == 0.0 && a.pi_part().is_integer()
}

/// Simple undirected graph with designated input and output node subsets.
#[derive(Clone, Debug, PartialEq)]
pub struct OpenGraph {
    adj: BTreeMap<usize, BTreeSet<usize>>,
    inputs: Vec<usize>,
    outputs: Vec<usize>,
}

impl OpenGraph {
    pub fn new(inputs: Vec<usize>, outputs: Vec<usize>) -> Self {
        let mut g = OpenGraph { adj: BTreeMap::new(), inputs, outputs };
        for n in g.inputs.clone() {
            g.add_node(n);
        }
        for n in g.outputs.clone() {
            g.add_node(n);
        }
        g
    }

    pub fn inputs(&self) -> &[usize] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn add_node(&mut self, n: usize) {
        self.adj.entry(n).or_default();
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        assert_ne!(a, b, "self-loop on node {a}");
        self.add_node(a);
        self.add_node(b);
        self.adj.get_mut(&a).unwrap().insert(b);
        self.adj.get_mut(&b).unwrap().insert(a);
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj.get(&a).is_some_and(|s| s.contains(&b))
    }

    pub fn toggle_edge(&mut self, a: usize, b: usize) {
        if self.has_edge(a, b) {
            self.adj.get_mut(&a).unwrap().remove(&b);
            self.adj.get_mut(&b).unwrap().remove(&a);
        } else {
            self.add_edge(a, b);
        }
    }

    pub fn remove_node(&mut self, n: usize) {
        if let Some(nbrs) = self.adj.remove(&n) {
            for b in nbrs {
                self.adj.get_mut(&b).unwrap().remove(&n);
            }
        }
        self.inputs.retain(|&i| i != n);
        self.outputs.retain(|&o| o != n);
    }

    pub fn nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.adj.keys().copied()
    }

    pub fn contains(&self, n: usize) -> bool {
        self.adj.contains_key(&n)
    }

    pub fn num_nodes(&self) -> usize {
        self.adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.values().map(|s| s.len()).sum::<usize>() / 2
    }

    pub fn neighbors(&self, n: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj.get(&n).into_iter().flatten().copied()
    }

    pub fn degree(&self, n: usize) -> usize {
        self.adj.get(&n).map_or(0, |s| s.len())
    }

    pub fn max_degree(&self) -> usize {
        self.adj.values().map(|s| s.len()).max().unwrap_or(0)
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .flat_map(|(&a, nbrs)| nbrs.iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
    }

    /// Complements the edge set within the neighborhood of `v`.
    pub fn local_complement(&mut self, v: usize) {
        let nbrs: Vec<usize> = self.neighbors(v).collect();
        for (i, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[i + 1..] {
                self.toggle_edge(a, b);
            }
        }
    }
}
