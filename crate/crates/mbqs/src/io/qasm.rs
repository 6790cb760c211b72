//! Circuit text format.
//!
//! One statement per line; `#` starts a comment that runs to the end of
//! the line. A file opens with a version marker and a register size, then
//! lists gates in execution order:
//!
//! ```text
//! version mbqs-circuit/1
//! qubits 3
//! phase pi/4          # optional global phase, at most once
//! h 0
//! s 1
//! cnot 0 1
//! swap 1 2
//! rz 2 -2.0 * c[32]
//! ```
//!
//! Gate keywords are lowercase; qubits are 0-based. `rz` takes its angle
//! as the rest of the line, so coefficient expressions with spaces need no
//! quoting.

use crate::angle::AngleExpr;
use crate::circuit::{Circuit, Gate};
use crate::error::CircuitError;

pub const VERSION: &str = "mbqs-circuit/1";

fn parse_err(line: usize, text: &str, reason: impl Into<String>) -> CircuitError {
    CircuitError::Parse { line, text: text.to_string(), reason: reason.into() }
}

fn parse_qubit(line: usize, text: &str, tok: &str) -> Result<usize, CircuitError> {
    tok.parse::<usize>().map_err(|_| parse_err(line, text, format!("`{tok}` is not a qubit index")))
}

/// Parses the text format into a circuit. Gate arity and qubit ranges are
/// checked as gates are pushed, so errors carry the first offending line.
pub fn parse_circuit_text(text: &str) -> Result<Circuit, CircuitError> {
    let mut circuit: Option<Circuit> = None;
    let mut saw_version = false;
    let mut saw_phase = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let stmt = raw.split('#').next().unwrap_or("").trim();
        if stmt.is_empty() {
            continue;
        }
        let (head, rest) = match stmt.split_once(char::is_whitespace) {
            Some((h, r)) => (h, r.trim()),
            None => (stmt, ""),
        };
        if !saw_version {
            if head != "version" || rest != VERSION {
                return Err(parse_err(line, stmt, format!("expected `version {VERSION}` first")));
            }
            saw_version = true;
            continue;
        }
        if head == "version" {
            return Err(parse_err(line, stmt, "duplicate version line"));
        }
        let circuit = match (&mut circuit, head) {
            (slot @ None, "qubits") => {
                let n = rest
                    .parse::<usize>()
                    .map_err(|_| parse_err(line, stmt, "qubits takes a positive integer"))?;
                if n == 0 {
                    return Err(parse_err(line, stmt, "register must hold at least one qubit"));
                }
                *slot = Some(Circuit::new(n));
                continue;
            }
            (None, _) => {
                return Err(parse_err(line, stmt, "expected `qubits <n>` before gates"));
            }
            (Some(_), "qubits") => {
                return Err(parse_err(line, stmt, "duplicate qubits line"));
            }
            (Some(c), _) => c,
        };
        let mut args = rest.split_whitespace();
        let gate = match head {
            "phase" => {
                if saw_phase {
                    return Err(parse_err(line, stmt, "duplicate phase line"));
                }
                saw_phase = true;
                let angle: AngleExpr =
                    rest.parse().map_err(|e| parse_err(line, stmt, format!("{e}")))?;
                circuit.add_phase(&angle);
                continue;
            }
            "h" | "s" | "x" | "y" | "z" => {
                let q = parse_qubit(line, stmt, args.next().unwrap_or(""))?;
                if args.next().is_some() {
                    return Err(parse_err(line, stmt, format!("{head} takes one qubit")));
                }
                match head {
                    "h" => Gate::H(q),
                    "s" => Gate::S(q),
                    "x" => Gate::X(q),
                    "y" => Gate::Y(q),
                    _ => Gate::Z(q),
                }
            }
            "cnot" | "swap" => {
                let a = parse_qubit(line, stmt, args.next().unwrap_or(""))?;
                let b = parse_qubit(line, stmt, args.next().unwrap_or(""))?;
                if args.next().is_some() {
                    return Err(parse_err(line, stmt, format!("{head} takes two qubits")));
                }
                if head == "cnot" {
                    Gate::Cnot { control: a, target: b }
                } else {
                    Gate::Swap(a, b)
                }
            }
            "rz" => {
                let (q, angle_text) = rest
                    .split_once(char::is_whitespace)
                    .ok_or_else(|| parse_err(line, stmt, "rz takes a qubit and an angle"))?;
                let qubit = parse_qubit(line, stmt, q)?;
                let angle: AngleExpr = angle_text
                    .trim()
                    .parse()
                    .map_err(|e| parse_err(line, stmt, format!("{e}")))?;
                Gate::Rz { qubit, angle }
            }
            other => return Err(parse_err(line, stmt, format!("unknown statement `{other}`"))),
        };
        circuit.push(gate).map_err(|e| parse_err(line, stmt, format!("{e}")))?;
    }
    if !saw_version {
        return Err(parse_err(0, "", "empty input (expected a version line)"));
    }
    circuit.ok_or_else(|| parse_err(0, "", "missing `qubits <n>` line"))
}

/// Renders a circuit in the text format, one gate per line.
pub fn circuit_to_text(c: &Circuit) -> String {
    let mut out = format!("version {VERSION}\nqubits {}\n", c.width());
    if !c.global_phase().is_zero() {
        out.push_str(&format!("phase {}\n", c.global_phase()));
    }
    for gate in c.gates() {
        let line = match gate {
            Gate::H(q) => format!("h {q}"),
            Gate::S(q) => format!("s {q}"),
            Gate::X(q) => format!("x {q}"),
            Gate::Y(q) => format!("y {q}"),
            Gate::Z(q) => format!("z {q}"),
            Gate::Cnot { control, target } => format!("cnot {control} {target}"),
            Gate::Swap(a, b) => format!("swap {a} {b}"),
            Gate::Rz { qubit, angle } => format!("rz {qubit} {angle}"),
        };
        out.push_str(&line);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a_full_program_parses_and_round_trips() {
        let text = "# sample\nversion mbqs-circuit/1\nqubits 3\nphase pi/4\n\
                    h 0\ns 1\nx 2\ny 0\nz 1\ncnot 0 1 # entangle\nswap 1 2\nrz 2 -2.0 * c[32]\n";
        let c = parse_circuit_text(text).unwrap();
        assert_eq!(c.width(), 3);
        assert_eq!(c.gates().len(), 8);
        assert_eq!(c.global_phase().to_string(), "pi/4");
        let printed = circuit_to_text(&c);
        let again = parse_circuit_text(&printed).unwrap();
        assert_eq!(c.gates(), again.gates());
        assert_eq!(circuit_to_text(&again), printed);
    }

    #[test]
    fn rz_angles_keep_symbolic_coefficients() {
        let text = "version mbqs-circuit/1\nqubits 1\nrz 0 pi/2 + 0.25 * c[7]\n";
        let c = parse_circuit_text(text).unwrap();
        match &c.gates()[0] {
            Gate::Rz { qubit: 0, angle } => {
                assert_eq!(angle.to_string(), "pi/2 + 0.25 * c[7]");
            }
            other => panic!("unexpected gate {other:?}"),
        }
    }

    #[test]
    fn structural_mistakes_are_reported_with_lines() {
        let cases = [
            ("qubits 2\nh 0\n", 1, "version"),
            ("version mbqs-circuit/1\nh 0\n", 2, "qubits"),
            ("version mbqs-circuit/1\nqubits 0\n", 2, "at least one"),
            ("version mbqs-circuit/1\nqubits 2\nqubits 3\n", 3, "duplicate"),
            ("version mbqs-circuit/1\nqubits 2\nfrobnicate 0\n", 3, "unknown"),
            ("version mbqs-circuit/1\nqubits 2\nh 0 1\n", 3, "one qubit"),
            ("version mbqs-circuit/1\nqubits 2\ncnot 0\n", 3, "not a qubit"),
            ("version mbqs-circuit/1\nqubits 2\nrz 1\n", 3, "angle"),
            ("version mbqs-circuit/1\nqubits 2\nh 5\n", 3, "register"),
            ("version mbqs-circuit/1\nqubits 2\ncnot 1 1\n", 3, "repeats"),
            ("version mbqs-circuit/1\nqubits 2\nphase pi/4\nphase pi/4\n", 4, "duplicate"),
        ];
        for (text, want_line, want_reason) in cases {
            match parse_circuit_text(text) {
                Err(CircuitError::Parse { line, reason, .. }) => {
                    assert_eq!(line, want_line, "{text}");
                    assert!(
                        reason.to_lowercase().contains(want_reason),
                        "`{reason}` vs `{want_reason}`"
                    );
                }
                other => panic!("{text} gave {other:?}"),
            }
        }
    }

    #[test]
    fn comments_and_blank_lines_are_ignored_anywhere() {
        let text = "\n# top\nversion mbqs-circuit/1\n\n# mid\nqubits 2\n\nh 0 # tail\n\n";
        let c = parse_circuit_text(text).unwrap();
        assert_eq!(c.gates(), &[Gate::H(0)]);
    }
}
