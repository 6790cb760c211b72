//! End-to-end orchestration shared by the command-line tool and the
//! integration tests: Hamiltonian text in, verified pattern library out.
//!
//! Per-subset work (synthesis, transpilation, compactification,
//! validation) is independent, so those loops run on the rayon pool.

use rayon::prelude::*;

use crate::circuit::{optimize_level0, optimize_level1, Circuit};
use crate::compactify::{
    contract_wire_x_pairs, eliminate_pauli_measurements, CompactReport, InputGuarantee,
};
use crate::error::PatternError;
use crate::flow::{compute_metrics, dependency_layering, find_causal_flow, Metrics};
use crate::grouping::{group, Strategy};
use crate::io::jsonl::{CompactTag, LibraryEntry, LibraryFile, LibraryHeader, Provenance};
use crate::pattern::Pattern;
use crate::pauli::Hamiltonian;
use crate::sim::{determinism_check, validate_pattern_vs_circuit, ValidationReport};
use crate::synth::synth_terms_circuit;
use crate::transpile::circuit_to_pattern;

#[derive(Clone, Debug)]
pub struct BuildOptions {
    pub strategy: Strategy,
    /// 0 keeps circuits as synthesized; 1 runs the peephole pass.
    pub opt_level: u8,
    /// Recorded in the header provenance; validation seeds derive from it.
    pub seed: u64,
    /// Instance name recorded in the header (e.g. the input file stem).
    pub instance: String,
}

impl BuildOptions {
    pub fn new(strategy: Strategy, instance: impl Into<String>) -> Self {
        BuildOptions { strategy, opt_level: 1, seed: 0, instance: instance.into() }
    }
}

/// Groups the Hamiltonian, synthesizes one circuit per subset, and
/// transpiles each into a measurement pattern. Entries keep their term
/// lists so later validation can rebuild the reference circuits.
pub fn build_library(h: &Hamiltonian, opts: &BuildOptions) -> Result<LibraryFile, PatternError> {
    let partition = group(h, opts.strategy);
    let entries: Result<Vec<LibraryEntry>, PatternError> = partition
        .subsets
        .par_iter()
        .enumerate()
        .map(|(k, terms)| {
            let synthesized = synth_terms_circuit(h, terms);
            let circuit = match opts.opt_level {
                0 => optimize_level0(&synthesized),
                _ => optimize_level1(&synthesized),
            };
            let pattern = circuit_to_pattern(&circuit)?;
            Ok(LibraryEntry {
                subset: k as u64,
                terms: Some(terms.clone()),
                pattern,
                compact: None,
            })
        })
        .collect();
    let entries = entries?;
    let header = LibraryHeader {
        instance: opts.instance.clone(),
        qubits: h.num_qubits(),
        terms: h.len(),
        strategy: opts.strategy.name().into(),
        subsets: entries.len(),
        provenance: Some(Provenance::current(opts.opt_level, opts.seed)),
    };
    Ok(LibraryFile { header: Some(header), entries, warnings: Vec::new() })
}

/// The reference circuit an entry was built from, when the entry still
/// carries its term list.
pub fn entry_circuit(h: &Hamiltonian, entry: &LibraryEntry) -> Option<Circuit> {
    entry.terms.as_ref().map(|t| synth_terms_circuit(h, t))
}

#[derive(Clone, Debug)]
pub enum EntryOutcome {
    /// Not checked, with the reason; does not count against the verdict.
    Skipped(String),
    /// Checking failed to run; counts as a failure.
    Error(String),
    Checked { report: ValidationReport, deterministic: bool },
}

#[derive(Clone, Debug)]
pub struct EntryValidation {
    pub subset: u64,
    /// The input class the entry was checked on, taken from its compact
    /// tag; untagged entries are held to any input.
    pub guarantee: InputGuarantee,
    pub outcome: EntryOutcome,
}

#[derive(Clone, Debug)]
pub struct LibraryValidation {
    pub entries: Vec<EntryValidation>,
    pub pass: bool,
}

/// Replays every affordable entry against its reference circuit on
/// random inputs with random measurement outcomes, and checks outcome
/// independence. Entries wider than `max_qubits` wires are skipped, as
/// are entries without term lists (nothing to compare against).
pub fn validate_library(
    lib: &LibraryFile,
    h: &Hamiltonian,
    trials: usize,
    seed: u64,
    max_qubits: usize,
) -> LibraryValidation {
    let entries: Vec<EntryValidation> = lib
        .entries
        .par_iter()
        .map(|entry| {
            let subset = entry.subset;
            let width = entry.pattern.inputs().len();
            if width > max_qubits {
                return EntryValidation {
                    subset,
                    outcome: EntryOutcome::Skipped(format!(
                        "{width} wires exceed the {max_qubits}-qubit budget"
                    )),
                };
            }
            let Some(circuit) = entry_circuit(h, entry) else {
                return EntryValidation {
                    subset,
                    outcome: EntryOutcome::Skipped("entry has no term list".into()),
                };
            };
            let dtrials = trials.clamp(2, 5);
            let outcome = match (
                validate_pattern_vs_circuit(&entry.pattern, &circuit, trials, seed ^ subset),
                determinism_check(&entry.pattern, dtrials, seed.rotate_left(17) ^ subset),
            ) {
                (Ok(report), Ok(deterministic)) => EntryOutcome::Checked { report, deterministic },
                (Err(e), _) | (_, Err(e)) => EntryOutcome::Error(e.to_string()),
            };
            EntryValidation { subset, outcome }
        })
        .collect();
    let pass = entries.iter().all(|e| match &e.outcome {
        EntryOutcome::Skipped(_) => true,
        EntryOutcome::Error(_) => false,
        EntryOutcome::Checked { report, deterministic } => report.pass && *deterministic,
    });
    LibraryValidation { entries, pass }
}

/// Chains every entry pattern in library order into one pattern over the
/// same wires (one Trotter step when entries partition a Hamiltonian).
pub fn concat_library(lib: &LibraryFile) -> Result<Pattern, PatternError> {
    let mut entries = lib.entries.iter();
    let Some(first) = entries.next() else {
        return Err(PatternError::InterfaceChanged { reason: "nothing to chain".into() });
    };
    let mut out = first.pattern.clone();
    for entry in entries {
        out = out.then(&entry.pattern)?;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompactMethod {
    /// Contract adjacent zero-angle measurement pairs on straight wires.
    Wires,
    /// Eliminate internal Pauli-basis measurements via graph rules.
    Pauli,
}

impl CompactMethod {
    pub fn name(&self) -> &'static str {
        match self {
            CompactMethod::Wires => "wire-contraction",
            CompactMethod::Pauli => "pauli-elimination",
        }
    }

    pub fn from_name(s: &str) -> Option<CompactMethod> {
        match s {
            "wires" | "wire-contraction" => Some(CompactMethod::Wires),
            "pauli" | "pauli-elimination" => Some(CompactMethod::Pauli),
            _ => None,
        }
    }
}

fn guarantee_name(g: InputGuarantee) -> &'static str {
    match g {
        InputGuarantee::AnyInput => "any-input",
        InputGuarantee::PlusInputs => "plus-inputs",
    }
}

/// Rewrites every entry with the chosen compactification pass and tags
/// it with what the pass did. Reports come back in entry order.
pub fn compactify_library(
    lib: &LibraryFile,
    method: CompactMethod,
) -> Result<(LibraryFile, Vec<CompactReport>), PatternError> {
    let rewritten: Result<Vec<(LibraryEntry, CompactReport)>, PatternError> = lib
        .entries
        .par_iter()
        .map(|entry| {
            let (pattern, report) = match method {
                CompactMethod::Wires => contract_wire_x_pairs(&entry.pattern)?,
                CompactMethod::Pauli => eliminate_pauli_measurements(&entry.pattern)?,
            };
            let tag = CompactTag {
                method: method.name().into(),
                guarantee: guarantee_name(report.guarantee).into(),
                planes: report.planes_introduced.iter().map(|p| p.name().into()).collect(),
                removed: report.measurements_removed,
                layering: if report.layering_after_causal { "causal-flow" } else { "dependency" }
                    .into(),
            };
            let entry = LibraryEntry {
                subset: entry.subset,
                terms: entry.terms.clone(),
                pattern,
                compact: Some(tag),
            };
            Ok((entry, report))
        })
        .collect();
    let (entries, reports) = rewritten?.into_iter().unzip();
    let packed = LibraryFile { header: lib.header.clone(), entries, warnings: Vec::new() };
    Ok((packed, reports))
}

fn entry_metrics(p: &Pattern) -> (Metrics, bool) {
    match find_causal_flow(&p.graph()) {
        Some(fl) => (compute_metrics(p, &fl), true),
        None => (compute_metrics(p, &dependency_layering(p)), false),
    }
}

/// Per-entry metric table in CSV form, one row per entry.
pub fn report_csv(lib: &LibraryFile) -> String {
    let mut out = String::from(
        "subset,terms,nodes,edges,max_degree,pauli_x,pauli_y,pauli_total,\
         non_pauli,width,layers,max_span,layering,method\n",
    );
    for entry in &lib.entries {
        let (m, causal) = entry_metrics(&entry.pattern);
        let non_pauli = entry.pattern.measurements().count() - m.n_p;
        let row = format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            entry.subset,
            entry.terms.as_ref().map_or(0, Vec::len),
            m.n,
            m.n_e,
            m.m_d,
            m.pauli_x,
            m.pauli_y,
            m.n_p,
            non_pauli,
            m.m_w,
            m.n_l,
            m.m_ld,
            if causal { "causal-flow" } else { "dependency" },
            entry.compact.as_ref().map_or("", |c| c.method.as_str()),
        );
        out.push_str(&row);
    }
    out
}
