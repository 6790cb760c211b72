//! Partitioning Hamiltonian terms into simulation subsets.
//!
//! Strategies: one pattern per term (one-to-one), greedy coloring of the
//! anticommutation graph in smallest-last order so each color class is a
//! commuting subset, or a single subset holding the whole step. Subset
//! order and the order of indices inside a subset both follow the global
//! term order, so products taken subset by subset reproduce the original
//! term order exactly.

use std::cmp::Reverse;
use std::collections::BTreeSet;

use crate::pauli::Hamiltonian;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    OneToOne,
    SmallestLast,
    Full,
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::OneToOne => "one-to-one",
            Strategy::SmallestLast => "smallest-last",
            Strategy::Full => "full",
        }
    }

    pub fn from_name(s: &str) -> Option<Strategy> {
        match s {
            "one-to-one" => Some(Strategy::OneToOne),
            "smallest-last" => Some(Strategy::SmallestLast),
            "full" => Some(Strategy::Full),
            _ => None,
        }
    }
}

/// Term indices grouped into ordered subsets. For the smallest-last
/// strategy `removal_order` records the degeneracy ordering that
/// produced the coloring, so validators can replay it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetPartition {
    pub strategy: Strategy,
    pub subsets: Vec<Vec<usize>>,
    pub removal_order: Vec<usize>,
}

/// Adjacency lists of the anticommutation graph: terms are vertices,
/// with an edge where the Pauli strings anticommute.
pub fn anticommutation_graph(h: &Hamiltonian) -> Vec<Vec<usize>> {
    let n = h.len();
    let mut adj = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if !h.terms()[i].string.commutes_with(&h.terms()[j].string) {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    adj
}

pub fn group(h: &Hamiltonian, strategy: Strategy) -> SubsetPartition {
    let subsets = match strategy {
        Strategy::OneToOne => (0..h.len()).map(|i| vec![i]).collect(),
        Strategy::Full => vec![(0..h.len()).collect()],
        Strategy::SmallestLast => {
            let (subsets, order) = smallest_last_coloring(&anticommutation_graph(h));
            return SubsetPartition { strategy, subsets, removal_order: order };
        }
    };
    SubsetPartition { strategy, subsets, removal_order: Vec::new() }
}

/// Smallest-last greedy coloring: repeatedly remove a vertex of minimum
/// residual degree, then color in reverse removal order with the
/// smallest color unused by already-colored neighbors. Color classes
/// become subsets ordered by color index, ascending inside. Degree ties
/// prefer the vertex with the largest original degree (then the lowest
/// index), so heavily constrained vertices are colored last, when most
/// of their neighborhood is fixed; this keeps the early color classes
/// large.
fn smallest_last_coloring(adj: &[Vec<usize>]) -> (Vec<Vec<usize>>, Vec<usize>) {
    let n = adj.len();
    let original: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut degree = original.clone();
    let mut removed = vec![false; n];
    // buckets[d] holds candidate vertices of current residual degree d,
    // keyed so iteration yields the tie-break winner first
    let key = |v: usize| (Reverse(original[v]), v);
    let mut buckets: Vec<BTreeSet<(Reverse<usize>, usize)>> = vec![BTreeSet::new(); n.max(1)];
    for v in 0..n {
        buckets[degree[v]].insert(key(v));
    }
    let mut removal_order = Vec::with_capacity(n);
    for _ in 0..n {
        let d = buckets.iter().position(|b| !b.is_empty()).expect("vertex remains");
        let v = buckets[d].iter().next().unwrap().1;
        buckets[d].remove(&key(v));
        removed[v] = true;
        removal_order.push(v);
        for &u in &adj[v] {
            if !removed[u] {
                buckets[degree[u]].remove(&key(u));
                degree[u] -= 1;
                buckets[degree[u]].insert(key(u));
            }
        }
    }

    let mut color = vec![usize::MAX; n];
    let mut num_colors = 0usize;
    for &v in removal_order.iter().rev() {
        let taken: BTreeSet<usize> =
            adj[v].iter().filter_map(|&u| (color[u] != usize::MAX).then_some(color[u])).collect();
        let c = (0..).find(|c| !taken.contains(c)).unwrap();
        color[v] = c;
        num_colors = num_colors.max(c + 1);
    }
    let mut subsets = vec![Vec::new(); num_colors];
    for v in 0..n {
        subsets[color[v]].push(v);
    }
    (subsets, removal_order)
}

/// Partition defects, empty when the partition is sound.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PartitionReport {
    pub violations: Vec<String>,
}

impl PartitionReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks exact coverage (every term index once), ascending order inside
/// each subset, and pairwise commutation within subsets. The full
/// strategy trades commutation for a single product in term order, so
/// its subsets are exempt from the commutation check.
pub fn validate_partition(p: &SubsetPartition, h: &Hamiltonian) -> PartitionReport {
    let mut report = PartitionReport::default();
    let mut seen = vec![false; h.len()];
    for (si, subset) in p.subsets.iter().enumerate() {
        for window in subset.windows(2) {
            if window[0] >= window[1] {
                report
                    .violations
                    .push(format!("subset {si}: indices {} and {} out of order", window[0], window[1]));
            }
        }
        for &t in subset {
            if t >= h.len() {
                report.violations.push(format!("subset {si}: index {t} out of range"));
                continue;
            }
            if seen[t] {
                report.violations.push(format!("subset {si}: index {t} appears twice"));
            }
            seen[t] = true;
        }
        if p.strategy != Strategy::Full {
            for (k, &a) in subset.iter().enumerate() {
                for &b in &subset[k + 1..] {
                    if a < h.len()
                        && b < h.len()
                        && !h.terms()[a].string.commutes_with(&h.terms()[b].string)
                    {
                        report
                            .violations
                            .push(format!("subset {si}: terms {a} and {b} anticommute"));
                    }
                }
            }
        }
    }
    for (t, &covered) in seen.iter().enumerate() {
        if !covered {
            report.violations.push(format!("term {t} missing from every subset"));
        }
    }
    if p.strategy == Strategy::SmallestLast && !p.removal_order.is_empty() {
        if let Err(msg) = replay_degeneracy_order(&anticommutation_graph(h), &p.removal_order) {
            report.violations.push(msg);
        }
    }
    report
}

/// Replays a removal order and confirms each removed vertex had minimum
/// residual degree in the remaining graph. Tie-breaking among equal
/// degrees is the generator's business, so only the degree is checked.
fn replay_degeneracy_order(adj: &[Vec<usize>], order: &[usize]) -> Result<(), String> {
    let n = adj.len();
    if order.len() != n {
        return Err(format!("removal order covers {} of {n} vertices", order.len()));
    }
    let mut removed = vec![false; n];
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    for &v in order {
        if removed[v] {
            return Err(format!("vertex {v} removed twice"));
        }
        let least = (0..n).filter(|&u| !removed[u]).map(|u| degree[u]).min().unwrap();
        if degree[v] != least {
            return Err(format!(
                "vertex {v} removed at degree {} while degree {least} was available",
                degree[v]
            ));
        }
        removed[v] = true;
        for &u in &adj[v] {
            if !removed[u] {
                degree[u] -= 1;
            }
        }
    }
    Ok(())
}
