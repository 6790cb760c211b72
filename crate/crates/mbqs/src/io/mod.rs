//! Serialization: plain-text pattern lines, JSONL pattern libraries, and
//! the small circuit text format accepted by the command-line tool.

pub mod ascii;
pub mod jsonl;
pub mod qasm;

pub use ascii::{parse_pattern_ascii, pattern_to_ascii};
pub use jsonl::{
    read_library, write_library, LibraryEntry, LibraryFile, LibraryHeader, Provenance, ReadMode,
};
pub use qasm::{circuit_to_text, parse_circuit_text};
