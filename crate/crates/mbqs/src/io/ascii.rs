//! Plain-text pattern lines.
//!
//! A pattern is written as command tokens separated by single spaces,
//! executed left to right:
//!
//! * `N(i)` prepares node `i` in |+>.
//! * `E(i,j)` entangles nodes `i` and `j` with CZ.
//! * `M(i)`, `M(i,angle)`, `M(i,PLANE)`, `M(i,PLANE,angle)` measure node
//!   `i`; the plane defaults to XY and the angle to zero when omitted.
//! * `[M(...)]{a,b,...}` wraps a measurement with its adaptive sign
//!   domain; the braces list earlier nodes whose outcome parity flips the
//!   sign of the angle.
//! * `X(i,{a,...})` and `Z(i,{a,...})` are conditional corrections.
//! * `C(i,WORD)` applies an unconditional local Clifford to an output
//!   node, WORD being letters over {H, S, I} in execution order. Only
//!   compactified patterns use it.
//!
//! Angles may contain spaces (`-2.0 * c[32]`), so tokens are recovered by
//! splitting on spaces at bracket depth zero, not on every space. Domain
//! lists round-trip in their written order, byte for byte.
//!
//! Only patterns without pending signal shifts can be written: the format
//! has no token for a t-dependency, matching the convention that shipped
//! libraries are always signal-shifted first.

use crate::clifford::LocalClifford;
use crate::error::PatternError;
use crate::pattern::{Command, Measurement, Pattern, Plane};

/// Splits a pattern line into command tokens: spaces separate tokens only
/// when no bracket of any kind is open.
fn tokenize(line: &str) -> Result<Vec<&str>, PatternError> {
    let mut tokens = Vec::new();
    let mut depth: i32 = 0;
    let mut start: Option<usize> = None;
    for (pos, ch) in line.char_indices() {
        match ch {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth -= 1,
            _ => {}
        }
        if depth < 0 {
            return Err(PatternError::Token {
                index: tokens.len(),
                token: line[start.unwrap_or(pos)..=pos].to_string(),
                reason: format!("unmatched `{ch}`"),
            });
        }
        if ch == ' ' && depth == 0 {
            if let Some(s) = start.take() {
                tokens.push(&line[s..pos]);
            }
        } else if start.is_none() && ch != ' ' {
            start = Some(pos);
        }
    }
    if let Some(s) = start {
        if depth != 0 {
            return Err(PatternError::Token {
                index: tokens.len(),
                token: line[s..].to_string(),
                reason: "unbalanced brackets".into(),
            });
        }
        tokens.push(&line[s..]);
    }
    Ok(tokens)
}

fn token_err(index: usize, token: &str, reason: impl Into<String>) -> PatternError {
    PatternError::Token { index, token: token.to_string(), reason: reason.into() }
}

/// Splits `args` on commas that sit outside any nested bracket.
fn split_args(args: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0usize;
    for (pos, ch) in args.char_indices() {
        match ch {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&args[start..pos]);
                start = pos + 1;
            }
            _ => {}
        }
    }
    parts.push(&args[start..]);
    parts
}

fn parse_node(index: usize, token: &str, text: &str) -> Result<usize, PatternError> {
    text.trim()
        .parse::<usize>()
        .map_err(|_| token_err(index, token, format!("`{}` is not a node id", text.trim())))
}

/// Parses `{a,b,...}` into an ordered node list. The order is preserved
/// exactly so a reprinted pattern matches its source byte for byte.
fn parse_domain(index: usize, token: &str, text: &str) -> Result<Vec<usize>, PatternError> {
    let inner = text
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .ok_or_else(|| token_err(index, token, format!("expected `{{...}}`, got `{text}`")))?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner.split(',').map(|n| parse_node(index, token, n)).collect()
}

/// Body of a call-shaped token: `name(args)` with nothing trailing.
fn call_args<'t>(index: usize, token: &'t str, name: &str) -> Result<&'t str, PatternError> {
    token
        .strip_prefix(name)
        .and_then(|t| t.strip_prefix('('))
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| token_err(index, token, format!("expected `{name}(...)`")))
}

fn parse_measure(index: usize, token: &str, body: &str) -> Result<Measurement, PatternError> {
    let parts = split_args(body);
    if parts.is_empty() || parts.len() > 3 {
        return Err(token_err(index, token, "expected M(i), M(i,angle), or M(i,plane,angle)"));
    }
    let node = parse_node(index, token, parts[0])?;
    let mut plane = Plane::XY;
    let mut angle_text: Option<&str> = None;
    match parts.len() {
        1 => {}
        2 => match parts[1].trim() {
            "XY" => plane = Plane::XY,
            "YZ" => plane = Plane::YZ,
            "XZ" => plane = Plane::XZ,
            other => angle_text = Some(other),
        },
        _ => {
            plane = match parts[1].trim() {
                "XY" => Plane::XY,
                "YZ" => Plane::YZ,
                "XZ" => Plane::XZ,
                other => {
                    return Err(token_err(index, token, format!("unknown plane `{other}`")));
                }
            };
            angle_text = Some(parts[2].trim());
        }
    }
    let angle = match angle_text {
        None => crate::angle::AngleExpr::zero(),
        Some(t) => t.parse().map_err(|e| token_err(index, token, format!("{e}")))?,
    };
    Ok(Measurement { node, plane, angle, s_domain: Vec::new(), t_domain: Vec::new() })
}

fn parse_token(index: usize, token: &str) -> Result<Command, PatternError> {
    if let Some(rest) = token.strip_prefix('[') {
        // [M(...)]{domain}
        let close = find_close(rest)
            .ok_or_else(|| token_err(index, token, "unterminated `[`"))?;
        let inner = &rest[..close];
        let tail = &rest[close + 1..];
        let body = inner
            .strip_prefix('M')
            .and_then(|t| t.strip_prefix('('))
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| token_err(index, token, "only M(...) can carry a domain"))?;
        let mut m = parse_measure(index, token, body)?;
        m.s_domain = parse_domain(index, token, tail)?;
        return Ok(Command::Measure(m));
    }
    match token.chars().next() {
        Some('N') => Ok(Command::AddNode(parse_node(
            index,
            token,
            call_args(index, token, "N")?,
        )?)),
        Some('E') => {
            let body = call_args(index, token, "E")?;
            let parts = split_args(body);
            if parts.len() != 2 {
                return Err(token_err(index, token, "expected E(i,j)"));
            }
            Ok(Command::Entangle(
                parse_node(index, token, parts[0])?,
                parse_node(index, token, parts[1])?,
            ))
        }
        Some('M') => Ok(Command::Measure(parse_measure(
            index,
            token,
            call_args(index, token, "M")?,
        )?)),
        Some('X') | Some('Z') => {
            let name = &token[..1];
            let body = call_args(index, token, name)?;
            let parts = split_args(body);
            if parts.len() != 2 {
                return Err(token_err(index, token, format!("expected {name}(i,{{...}})")));
            }
            let node = parse_node(index, token, parts[0])?;
            let domain = parse_domain(index, token, parts[1].trim())?;
            Ok(if name == "X" {
                Command::CorrectX { node, domain }
            } else {
                Command::CorrectZ { node, domain }
            })
        }
        Some('C') => {
            let body = call_args(index, token, "C")?;
            let parts = split_args(body);
            if parts.len() != 2 {
                return Err(token_err(index, token, "expected C(i,WORD)"));
            }
            let node = parse_node(index, token, parts[0])?;
            let word = parts[1].trim();
            let op = LocalClifford::from_word(word)
                .ok_or_else(|| token_err(index, token, format!("unknown Clifford word `{word}`")))?;
            Ok(Command::ApplyClifford { node, op })
        }
        _ => Err(token_err(index, token, "unknown command")),
    }
}

/// Position of the `]` matching an implicit opening `[`, scanning `rest`
/// (the text after that `[`) with full bracket depth tracking.
fn find_close(rest: &str) -> Option<usize> {
    let mut depth = 0i32;
    for (pos, ch) in rest.char_indices() {
        match ch {
            '(' | '[' | '{' => depth += 1,
            ']' if depth == 0 => return Some(pos),
            ')' | ']' | '}' => depth -= 1,
            _ => {}
        }
    }
    None
}

/// Parses a pattern line. The text carries no interface information, so
/// the caller supplies the input and output node lists (in wire order).
pub fn parse_pattern_ascii(
    line: &str,
    inputs: Vec<usize>,
    outputs: Vec<usize>,
) -> Result<Pattern, PatternError> {
    let tokens = tokenize(line.trim())?;
    let mut commands = Vec::with_capacity(tokens.len());
    for (index, token) in tokens.iter().enumerate() {
        commands.push(parse_token(index, token)?);
    }
    Pattern::new(inputs, outputs, commands)
}

fn domain_text(domain: &[usize]) -> String {
    let parts: Vec<String> = domain.iter().map(|n| n.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

fn measure_text(m: &Measurement) -> String {
    let mut inner = m.node.to_string();
    if m.plane != Plane::XY {
        inner.push(',');
        inner.push_str(m.plane.name());
    }
    if !m.angle.is_zero() {
        inner.push(',');
        inner.push_str(&m.angle.to_string());
    }
    if m.s_domain.is_empty() {
        format!("M({inner})")
    } else {
        format!("[M({inner})]{}", domain_text(&m.s_domain))
    }
}

fn command_text(cmd: &Command) -> Result<String, PatternError> {
    Ok(match cmd {
        Command::AddNode(i) => format!("N({i})"),
        Command::Entangle(i, j) => format!("E({i},{j})"),
        Command::Measure(m) => {
            if !m.t_domain.is_empty() {
                return Err(PatternError::NotShifted);
            }
            measure_text(m)
        }
        Command::CorrectX { node, domain } => format!("X({node},{})", domain_text(domain)),
        Command::CorrectZ { node, domain } => format!("Z({node},{})", domain_text(domain)),
        Command::ApplyClifford { node, op } => format!("C({node},{})", op.word()),
        Command::ShiftSignal { .. } => return Err(PatternError::NotShifted),
    })
}

/// Renders a pattern as a single line of space-separated command tokens.
/// Commands appear in stored order; domains in stored order. Patterns with
/// pending signal shifts (t-dependencies or shift commands) are rejected.
pub fn pattern_to_ascii(p: &Pattern) -> Result<String, PatternError> {
    let parts: Vec<String> =
        p.commands().iter().map(command_text).collect::<Result<_, _>>()?;
    Ok(parts.join(" "))
}
