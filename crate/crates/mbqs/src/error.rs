//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
#[error("cannot parse angle `{input}`: {reason}")]
pub struct AngleParseError {
    pub input: String,
    pub reason: String,
}

impl AngleParseError {
    pub fn new(input: impl Into<String>, reason: impl Into<String>) -> Self {
        AngleParseError { input: input.into(), reason: reason.into() }
    }
}

#[derive(Debug, Error)]
pub enum HamiltonianError {
    #[error("line {line}: expected `<index> <coefficient> <pauli string>`, got `{text}`")]
    Malformed { line: usize, text: String },
    #[error("line {line}: bad Pauli string `{text}` (letters must be I, X, Y, Z)")]
    BadString { line: usize, text: String },
    #[error("line {line}: term index {found} out of order (expected {expected})")]
    IndexOrder { line: usize, found: usize, expected: usize },
    #[error("line {line}: string length {found} differs from qubit count {expected}")]
    LengthMismatch { line: usize, found: usize, expected: usize },
    #[error("hamiltonian is empty")]
    Empty,
}

#[derive(Debug, Error)]
pub enum PatternError {
    #[error("token {index}: cannot parse `{token}`: {reason}")]
    Token { index: usize, token: String, reason: String },
    #[error("command {index}: node {node} used before N({node})")]
    UnknownNode { index: usize, node: usize },
    #[error("command {index}: node {node} declared twice")]
    DuplicateNode { index: usize, node: usize },
    #[error("command {index}: edge ({a},{b}) declared twice")]
    DuplicateEdge { index: usize, a: usize, b: usize },
    #[error("command {index}: self-loop edge on node {node}")]
    SelfLoop { index: usize, node: usize },
    #[error("command {index}: node {node} measured twice")]
    DoubleMeasure { index: usize, node: usize },
    #[error("command {index}: node {node} acted on after its measurement")]
    UseAfterMeasure { index: usize, node: usize },
    #[error("command {index}: domain references node {dep} not measured yet")]
    ForwardDomain { index: usize, dep: usize },
    #[error("input node {node} is missing from the node list")]
    InputNotDeclared { node: usize },
    #[error("output node {node} is missing from the node list")]
    OutputNotDeclared { node: usize },
    #[error("output node {node} is measured")]
    MeasuredOutput { node: usize },
    #[error("non-output node {node} is never measured")]
    UnmeasuredNode { node: usize },
    #[error("pattern inputs/outputs changed: {reason}")]
    InterfaceChanged { reason: String },
    #[error("pattern carries pending signal shifts; run shift_signals before writing")]
    NotShifted,
}

#[derive(Debug, Error)]
pub enum LibraryError {
    #[error("line {line}: {source}")]
    Json {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("line {line}: {reason}")]
    Schema { line: usize, reason: String },
    #[error("line {line}: pattern: {source}")]
    Pattern {
        line: usize,
        #[source]
        source: PatternError,
    },
    #[error("line {line}: metadata field `{field}` is {found}, recomputed {expected}")]
    MetaMismatch { line: usize, field: String, found: String, expected: String },
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("pattern requires inputs prepared as |+>, got a general input state")]
    PlusInputsRequired,
    #[error("state over {qubits} qubits exceeds the simulation limit of {limit}")]
    TooLarge { qubits: usize, limit: usize },
    #[error("angle references unbound coefficient c[{0}]")]
    UnboundCoefficient(usize),
    #[error("fixed outcome list shorter than the {0} measurements in the pattern")]
    OutcomesExhausted(usize),
    #[error("input state dimension {found} does not match {expected} input qubits")]
    InputDim { found: usize, expected: usize },
}

#[derive(Debug, Error)]
pub enum CircuitError {
    #[error("line {line}: cannot parse `{text}`: {reason}")]
    Parse { line: usize, text: String, reason: String },
    #[error("gate {index} targets qubit {qubit} outside register of size {size}")]
    QubitRange { index: usize, qubit: usize, size: usize },
    #[error("gate {index} repeats qubit {qubit}")]
    RepeatedQubit { index: usize, qubit: usize },
}
