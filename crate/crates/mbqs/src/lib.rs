//! Compiler and verifier for measurement-based quantum simulation
//! pattern libraries.
//!
//! The crate takes a qubit Hamiltonian written as weighted Pauli strings,
//! groups its terms into commuting subsets, synthesizes an exponentiation
//! circuit per subset, transpiles each circuit into a one-way-model
//! measurement pattern, and verifies the result against dense-matrix
//! simulation. Patterns are stored in a line-oriented JSON library format
//! with a compact ASCII command grammar; see `docs/formats.md` at the
//! repository root.

pub mod angle;
pub mod circuit;
pub mod clifford;
pub mod compactify;
pub mod error;
pub mod flow;
pub mod grouping;
pub mod io;
pub mod pattern;
pub mod pauli;
pub mod pipeline;
pub mod sim;
pub mod synth;
pub mod transpile;

pub use angle::{AngleExpr, Binding, PauliClass};
pub use circuit::{Circuit, Gate};
pub use clifford::LocalClifford;
pub use compactify::{
    contract_wire_x_pairs, eliminate_pauli_measurements, lc_gain_bound, CompactReport,
    InputGuarantee,
};
pub use flow::{compute_metrics, find_causal_flow, FlowLayering, Metrics};
pub use grouping::{group, validate_partition, Strategy, SubsetPartition};
pub use io::{
    circuit_to_text, parse_circuit_text, parse_pattern_ascii, pattern_to_ascii, read_library,
    write_library, LibraryEntry, LibraryFile, LibraryHeader, Provenance, ReadMode,
};
pub use pattern::{Command, Measurement, OpenGraph, Pattern, Plane};
pub use pauli::{Hamiltonian, PauliAxis, PauliString, Term};
pub use pipeline::{
    build_library, compactify_library, concat_library, report_csv, validate_library,
    BuildOptions, CompactMethod, EntryOutcome, EntryValidation, LibraryValidation,
};
pub use sim::{
    bhattacharyya, determinism_check, enumerate_branches, fidelity, phase_align, random_state,
    simulate_circuit, simulate_pattern, simulate_pattern_naive, validate_pattern_vs_circuit,
    Branch, OutcomePolicy, OutcomeRecord, StateVector, ValidationReport,
};
pub use synth::{synth_string_exponential, synth_subset_circuit, synth_terms_circuit};
pub use transpile::circuit_to_pattern;
