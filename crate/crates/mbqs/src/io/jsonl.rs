//! JSONL pattern libraries.
//!
//! A library file holds one JSON object per line. The first line may be a
//! header (recognized by its `schema` key); every other line is a pattern
//! entry:
//!
//! ```json
//! {"Commuting subset": 32,
//!  "terms": [32],
//!  "meta": {"node number": 44, "input_nodes": [...], ...},
//!  "pattern_ascii": "N(6) ... X(43,{17,19,21,23,25})",
//!  "compactified": {"method": "pauli-elimination", ...}}
//! ```
//!
//! `terms` (which Hamiltonian terms the subset covers) and `compactified`
//! are optional. The `meta` block is always recomputed from the pattern on
//! write; on read, strict mode recomputes it and rejects any disagreement,
//! while lenient mode records disagreements as warnings and trusts the
//! pattern text.

use serde_json::{json, Map, Value};

use crate::error::LibraryError;
use crate::flow::{compute_metrics, dependency_layering, find_causal_flow};
use crate::io::ascii::{parse_pattern_ascii, pattern_to_ascii};
use crate::pattern::Pattern;

pub const SCHEMA: &str = "mbqs-patlib/1";

/// Build provenance stamped into a library header.
#[derive(Clone, Debug, PartialEq)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub optimization_level: u8,
    pub seed: u64,
    pub unix_time: u64,
}

impl Provenance {
    /// Provenance for the running build at the current wall-clock time.
    pub fn current(optimization_level: u8, seed: u64) -> Self {
        let unix_time = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Provenance {
            tool: "mbqs".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            optimization_level,
            seed,
            unix_time,
        }
    }
}

/// Optional first line of a library file.
#[derive(Clone, Debug, PartialEq)]
pub struct LibraryHeader {
    pub instance: String,
    pub qubits: usize,
    pub terms: usize,
    pub strategy: String,
    pub subsets: usize,
    pub provenance: Option<Provenance>,
}

/// Annotation on entries rewritten by a compactification pass.
#[derive(Clone, Debug, PartialEq)]
pub struct CompactTag {
    pub method: String,
    pub guarantee: String,
    pub planes: Vec<String>,
    pub removed: usize,
    /// "causal-flow" when the meta layering comes from a causal flow,
    /// "dependency" when it falls back to command-order layering.
    pub layering: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LibraryEntry {
    pub subset: u64,
    pub terms: Option<Vec<usize>>,
    pub pattern: Pattern,
    pub compact: Option<CompactTag>,
}

#[derive(Clone, Debug, Default)]
pub struct LibraryFile {
    pub header: Option<LibraryHeader>,
    pub entries: Vec<LibraryEntry>,
    /// Populated by lenient reads; empty after a strict read.
    pub warnings: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReadMode {
    /// Recompute every meta field and fail on any disagreement or
    /// unknown key.
    Strict,
    /// Trust the pattern text; collect disagreements as warnings.
    Lenient,
}

const META_KEYS: [&str; 9] = [
    "node number",
    "input_nodes",
    "output_nodes",
    "max degree",
    "number Pauli X measurements",
    "number Pauli Y measurements",
    "number layers (causal flow)",
    "max edge layer span",
    "node_layer_list_causal_flow",
];

/// Recomputes the meta block for a pattern. Uses the causal-flow layering
/// when one exists and the dependency layering otherwise; the second
/// return value reports which one it was.
pub fn build_meta(p: &Pattern) -> (Map<String, Value>, bool) {
    let (fl, causal) = match find_causal_flow(&p.graph()) {
        Some(fl) => (fl, true),
        None => (dependency_layering(p), false),
    };
    let metrics = compute_metrics(p, &fl);
    let mut layers = Map::new();
    for (&node, &layer) in &fl.layer {
        layers.insert(node.to_string(), json!(layer));
    }
    let mut meta = Map::new();
    meta.insert("node number".into(), json!(metrics.n));
    meta.insert("input_nodes".into(), json!(p.inputs()));
    meta.insert("output_nodes".into(), json!(p.outputs()));
    meta.insert("max degree".into(), json!(metrics.m_d));
    meta.insert("number Pauli X measurements".into(), json!(metrics.pauli_x));
    meta.insert("number Pauli Y measurements".into(), json!(metrics.pauli_y));
    meta.insert("number layers (causal flow)".into(), json!(metrics.n_l));
    meta.insert("max edge layer span".into(), json!(metrics.m_ld));
    meta.insert("node_layer_list_causal_flow".into(), Value::Object(layers));
    (meta, causal)
}

fn schema_err(line: usize, reason: impl Into<String>) -> LibraryError {
    LibraryError::Schema { line, reason: reason.into() }
}

fn as_usize(line: usize, key: &str, v: &Value) -> Result<usize, LibraryError> {
    v.as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| schema_err(line, format!("`{key}` must be a non-negative integer")))
}

fn as_usize_list(line: usize, key: &str, v: &Value) -> Result<Vec<usize>, LibraryError> {
    v.as_array()
        .ok_or_else(|| schema_err(line, format!("`{key}` must be an array")))?
        .iter()
        .map(|x| as_usize(line, key, x))
        .collect()
}

fn as_str<'v>(line: usize, key: &str, v: &'v Value) -> Result<&'v str, LibraryError> {
    v.as_str().ok_or_else(|| schema_err(line, format!("`{key}` must be a string")))
}

fn compare_meta(
    line: usize,
    found: &Map<String, Value>,
    expected: &Map<String, Value>,
    mode: ReadMode,
    warnings: &mut Vec<String>,
) -> Result<(), LibraryError> {
    for key in found.keys() {
        if !META_KEYS.contains(&key.as_str()) {
            match mode {
                ReadMode::Strict => {
                    return Err(schema_err(line, format!("unknown meta key `{key}`")));
                }
                ReadMode::Lenient => warnings.push(format!("line {line}: unknown meta key `{key}`")),
            }
        }
    }
    for key in META_KEYS {
        // Interface lists were used to construct the pattern, so they
        // always agree; compare them anyway to catch shape errors.
        let exp = &expected[key];
        match found.get(key) {
            Some(v) if v == exp => {}
            Some(v) => match mode {
                ReadMode::Strict => {
                    return Err(LibraryError::MetaMismatch {
                        line,
                        field: key.into(),
                        found: v.to_string(),
                        expected: exp.to_string(),
                    });
                }
                ReadMode::Lenient => warnings.push(format!(
                    "line {line}: meta `{key}` is {v}, recomputed {exp}"
                )),
            },
            None => match mode {
                ReadMode::Strict => {
                    return Err(schema_err(line, format!("meta is missing `{key}`")));
                }
                ReadMode::Lenient => {
                    warnings.push(format!("line {line}: meta is missing `{key}`"));
                }
            },
        }
    }
    Ok(())
}

fn entry_from_value(
    line: usize,
    value: &Value,
    mode: ReadMode,
    warnings: &mut Vec<String>,
) -> Result<LibraryEntry, LibraryError> {
    let obj = value
        .as_object()
        .ok_or_else(|| schema_err(line, "entry must be a JSON object"))?;
    for key in obj.keys() {
        if !["Commuting subset", "terms", "meta", "pattern_ascii", "compactified"]
            .contains(&key.as_str())
        {
            match mode {
                ReadMode::Strict => {
                    return Err(schema_err(line, format!("unknown entry key `{key}`")));
                }
                ReadMode::Lenient => warnings.push(format!("line {line}: unknown entry key `{key}`")),
            }
        }
    }
    let subset = obj
        .get("Commuting subset")
        .ok_or_else(|| schema_err(line, "entry is missing `Commuting subset`"))?
        .as_u64()
        .ok_or_else(|| schema_err(line, "`Commuting subset` must be an integer"))?;
    let terms = match obj.get("terms") {
        None => None,
        Some(v) => Some(as_usize_list(line, "terms", v)?),
    };
    let meta = obj
        .get("meta")
        .and_then(Value::as_object)
        .ok_or_else(|| schema_err(line, "entry is missing a `meta` object"))?;
    let inputs = as_usize_list(
        line,
        "input_nodes",
        meta.get("input_nodes").ok_or_else(|| schema_err(line, "meta is missing `input_nodes`"))?,
    )?;
    let outputs = as_usize_list(
        line,
        "output_nodes",
        meta.get("output_nodes")
            .ok_or_else(|| schema_err(line, "meta is missing `output_nodes`"))?,
    )?;
    let ascii = as_str(
        line,
        "pattern_ascii",
        obj.get("pattern_ascii")
            .ok_or_else(|| schema_err(line, "entry is missing `pattern_ascii`"))?,
    )?;
    let pattern = parse_pattern_ascii(ascii, inputs, outputs)
        .map_err(|source| LibraryError::Pattern { line, source })?;
    let (expected, _) = build_meta(&pattern);
    compare_meta(line, meta, &expected, mode, warnings)?;
    let compact = match obj.get("compactified") {
        None => None,
        Some(v) => {
            let c = v
                .as_object()
                .ok_or_else(|| schema_err(line, "`compactified` must be an object"))?;
            Some(CompactTag {
                method: as_str(line, "method", c.get("method").unwrap_or(&Value::Null))?.into(),
                guarantee: as_str(line, "guarantee", c.get("guarantee").unwrap_or(&Value::Null))?
                    .into(),
                planes: c
                    .get("planes")
                    .and_then(Value::as_array)
                    .map(|a| {
                        a.iter()
                            .map(|p| as_str(line, "planes", p).map(String::from))
                            .collect::<Result<Vec<_>, _>>()
                    })
                    .transpose()?
                    .unwrap_or_default(),
                removed: as_usize(line, "removed", c.get("removed").unwrap_or(&Value::Null))?,
                layering: as_str(line, "layering", c.get("layering").unwrap_or(&Value::Null))?
                    .into(),
            })
        }
    };
    Ok(LibraryEntry { subset, terms, pattern, compact })
}

fn entry_to_value(index: usize, entry: &LibraryEntry) -> Result<Value, LibraryError> {
    let ascii = pattern_to_ascii(&entry.pattern)
        .map_err(|source| LibraryError::Pattern { line: index + 1, source })?;
    let (meta, _) = build_meta(&entry.pattern);
    let mut obj = Map::new();
    obj.insert("Commuting subset".into(), json!(entry.subset));
    if let Some(terms) = &entry.terms {
        obj.insert("terms".into(), json!(terms));
    }
    obj.insert("meta".into(), Value::Object(meta));
    obj.insert("pattern_ascii".into(), json!(ascii));
    if let Some(c) = &entry.compact {
        obj.insert(
            "compactified".into(),
            json!({
                "method": c.method,
                "guarantee": c.guarantee,
                "planes": c.planes,
                "removed": c.removed,
                "layering": c.layering,
            }),
        );
    }
    Ok(Value::Object(obj))
}

fn header_from_value(line: usize, value: &Value) -> Result<LibraryHeader, LibraryError> {
    let obj = value.as_object().expect("caller checked this is an object");
    let schema = as_str(line, "schema", &obj["schema"])?;
    if schema != SCHEMA {
        return Err(schema_err(line, format!("unsupported schema `{schema}` (expected `{SCHEMA}`)")));
    }
    let get = |key: &str| {
        obj.get(key).ok_or_else(|| schema_err(line, format!("header is missing `{key}`")))
    };
    let provenance = match obj.get("provenance") {
        None => None,
        Some(v) => {
            let p = v
                .as_object()
                .ok_or_else(|| schema_err(line, "`provenance` must be an object"))?;
            let f = |key: &str| {
                p.get(key)
                    .ok_or_else(|| schema_err(line, format!("provenance is missing `{key}`")))
            };
            Some(Provenance {
                tool: as_str(line, "tool", f("tool")?)?.into(),
                version: as_str(line, "version", f("version")?)?.into(),
                optimization_level: as_usize(line, "optimization_level", f("optimization_level")?)?
                    as u8,
                seed: f("seed")?
                    .as_u64()
                    .ok_or_else(|| schema_err(line, "`seed` must be an integer"))?,
                unix_time: f("unix_time")?
                    .as_u64()
                    .ok_or_else(|| schema_err(line, "`unix_time` must be an integer"))?,
            })
        }
    };
    Ok(LibraryHeader {
        instance: as_str(line, "instance", get("instance")?)?.into(),
        qubits: as_usize(line, "qubits", get("qubits")?)?,
        terms: as_usize(line, "terms", get("terms")?)?,
        strategy: as_str(line, "strategy", get("strategy")?)?.into(),
        subsets: as_usize(line, "subsets", get("subsets")?)?,
        provenance,
    })
}

fn header_to_value(h: &LibraryHeader) -> Value {
    let mut obj = Map::new();
    obj.insert("schema".into(), json!(SCHEMA));
    obj.insert("instance".into(), json!(h.instance));
    obj.insert("qubits".into(), json!(h.qubits));
    obj.insert("terms".into(), json!(h.terms));
    obj.insert("strategy".into(), json!(h.strategy));
    obj.insert("subsets".into(), json!(h.subsets));
    if let Some(p) = &h.provenance {
        obj.insert(
            "provenance".into(),
            json!({
                "tool": p.tool,
                "version": p.version,
                "optimization_level": p.optimization_level,
                "seed": p.seed,
                "unix_time": p.unix_time,
            }),
        );
    }
    Value::Object(obj)
}

/// Parses a library from JSONL text. Line numbers in errors are 1-based.
pub fn read_library(text: &str, mode: ReadMode) -> Result<LibraryFile, LibraryError> {
    let mut lib = LibraryFile::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let value: Value =
            serde_json::from_str(raw).map_err(|source| LibraryError::Json { line, source })?;
        let is_header = value.as_object().is_some_and(|o| o.contains_key("schema"));
        if is_header {
            if lib.header.is_some() || !lib.entries.is_empty() {
                return Err(schema_err(line, "header must be the first line"));
            }
            lib.header = Some(header_from_value(line, &value)?);
        } else {
            lib.entries.push(entry_from_value(line, &value, mode, &mut lib.warnings)?);
        }
    }
    Ok(lib)
}

/// Serializes a library to JSONL text, recomputing every meta block.
/// The result ends with a newline.
pub fn write_library(lib: &LibraryFile) -> Result<String, LibraryError> {
    let mut out = String::new();
    if let Some(h) = &lib.header {
        out.push_str(&header_to_value(h).to_string());
        out.push('\n');
    }
    for (index, entry) in lib.entries.iter().enumerate() {
        out.push_str(&entry_to_value(index, entry)?.to_string());
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angle::AngleExpr;
    use crate::pattern::{Command, Measurement};

    fn fixture_text() -> String {
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/subset32.jsonl");
        std::fs::read_to_string(path).unwrap()
    }

    fn tiny_entry(subset: u64) -> LibraryEntry {
        let p = Pattern::new(
            vec![0],
            vec![2],
            vec![
                Command::AddNode(1),
                Command::AddNode(2),
                Command::Entangle(0, 1),
                Command::Entangle(1, 2),
                Command::Measure(Measurement::xy(0, AngleExpr::pi_times(1, 2))),
                Command::Measure(Measurement::xy(1, AngleExpr::zero()).with_s_domain(vec![0])),
                Command::CorrectZ { node: 2, domain: vec![0] },
                Command::CorrectX { node: 2, domain: vec![1] },
            ],
        )
        .unwrap();
        LibraryEntry { subset, terms: Some(vec![subset as usize]), pattern: p, compact: None }
    }

    #[test]
    fn fixture_reads_strictly_and_rewrites_structurally() {
        let text = fixture_text();
        let lib = read_library(&text, ReadMode::Strict).unwrap();
        assert!(lib.header.is_none());
        assert!(lib.warnings.is_empty());
        assert_eq!(lib.entries.len(), 1);
        let entry = &lib.entries[0];
        assert_eq!(entry.subset, 32);
        assert_eq!(entry.pattern.inputs(), &[0, 1, 2, 3, 4, 5]);
        assert_eq!(entry.pattern.outputs(), &[0, 28, 35, 42, 43, 5]);

        let rewritten = write_library(&lib).unwrap();
        let a: Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        let b: Value = serde_json::from_str(rewritten.lines().next().unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn header_and_terms_round_trip() {
        let lib = LibraryFile {
            header: Some(LibraryHeader {
                instance: "be2".into(),
                qubits: 3,
                terms: 2,
                strategy: "one-to-one".into(),
                subsets: 2,
                provenance: Some(Provenance {
                    tool: "mbqs".into(),
                    version: "0.1.0".into(),
                    optimization_level: 1,
                    seed: 7,
                    unix_time: 1_755_000_000,
                }),
            }),
            entries: vec![tiny_entry(0), tiny_entry(1)],
            warnings: Vec::new(),
        };
        let text = write_library(&lib).unwrap();
        assert_eq!(text.lines().count(), 3);
        let back = read_library(&text, ReadMode::Strict).unwrap();
        assert_eq!(back.header, lib.header);
        assert_eq!(back.entries, lib.entries);
    }

    #[test]
    fn compact_tag_round_trips() {
        let mut entry = tiny_entry(4);
        entry.compact = Some(CompactTag {
            method: "pauli-elimination".into(),
            guarantee: "plus-inputs".into(),
            planes: vec!["YZ".into()],
            removed: 3,
            layering: "causal-flow".into(),
        });
        let lib = LibraryFile { header: None, entries: vec![entry], warnings: Vec::new() };
        let text = write_library(&lib).unwrap();
        let back = read_library(&text, ReadMode::Strict).unwrap();
        assert_eq!(back.entries, lib.entries);
    }

    #[test]
    fn strict_mode_rejects_wrong_meta_and_lenient_warns() {
        let text = fixture_text();
        let mut value: Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        value["meta"]["max degree"] = json!(5);
        let corrupted = value.to_string();

        let err = read_library(&corrupted, ReadMode::Strict).unwrap_err();
        match err {
            LibraryError::MetaMismatch { field, found, expected, .. } => {
                assert_eq!(field, "max degree");
                assert_eq!(found, "5");
                assert_eq!(expected, "4");
            }
            other => panic!("unexpected error {other}"),
        }

        let lib = read_library(&corrupted, ReadMode::Lenient).unwrap();
        assert_eq!(lib.entries.len(), 1);
        assert_eq!(lib.warnings.len(), 1);
        assert!(lib.warnings[0].contains("max degree"), "{}", lib.warnings[0]);
    }

    #[test]
    fn schema_and_shape_errors_carry_line_numbers() {
        let bad_json = "{\"Commuting subset\": 0,";
        match read_library(bad_json, ReadMode::Strict) {
            Err(LibraryError::Json { line: 1, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }

        let wrong_schema = "{\"schema\": \"other/9\"}";
        match read_library(wrong_schema, ReadMode::Strict) {
            Err(LibraryError::Schema { line: 1, reason }) => {
                assert!(reason.contains("other/9"), "{reason}");
            }
            other => panic!("unexpected {other:?}"),
        }

        let text = fixture_text();
        let late_header = format!("{text}{{\"schema\": \"mbqs-patlib/1\"}}\n");
        match read_library(&late_header, ReadMode::Strict) {
            Err(LibraryError::Schema { line: 2, reason }) => {
                assert!(reason.contains("first line"), "{reason}");
            }
            other => panic!("unexpected {other:?}"),
        }

        let missing_ascii = "{\"Commuting subset\": 0, \"meta\": {\"input_nodes\": [], \"output_nodes\": []}}";
        match read_library(missing_ascii, ReadMode::Strict) {
            Err(LibraryError::Schema { line: 1, reason }) => {
                assert!(reason.contains("pattern_ascii"), "{reason}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_entry_keys_fail_strict_reads() {
        let text = fixture_text();
        let mut value: Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        value["surprise"] = json!(1);
        let line = value.to_string();
        match read_library(&line, ReadMode::Strict) {
            Err(LibraryError::Schema { reason, .. }) => {
                assert!(reason.contains("surprise"), "{reason}");
            }
            other => panic!("unexpected {other:?}"),
        }
        let lib = read_library(&line, ReadMode::Lenient).unwrap();
        assert_eq!(lib.warnings.len(), 1);
    }
}
