//! Reader and writer for the Galileo-style text format.
//!
//! ```text
//! toplevel "T";
//! "T" or "G1" "G2";
//! "G1" or "CF" "OF";
//! "G2" and "LB1" "LB2";
//! "G3" 2of3 "A" "B" "C";
//! "CF" prob=0.01;
//! "OF";
//! ```
//!
//! One statement per line, each ending in `;`. `//` starts a comment.
//! Basic events are declared on their own line, with an optional failure
//! probability.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::error::ParseError;
use crate::tree::{is_valid_name, FaultTree, Gate, GateKind, NodeId, Violation};

/// Render `ft` in canonical form: the `toplevel` line, the top gate, the
/// remaining gates by name, then every basic event by name.
pub fn serialize(ft: &FaultTree) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "toplevel \"{}\";", ft.top());
    let top = ft.gates().get_key_value(ft.top());
    let rest = ft.gates().iter().filter(|(id, _)| *id != ft.top());
    for (id, gate) in top.into_iter().chain(rest) {
        let _ = write!(out, "\"{id}\" ");
        match gate.kind {
            GateKind::And => out.push_str("and"),
            GateKind::Or => out.push_str("or"),
            GateKind::AtLeast(k) => {
                let _ = write!(out, "{k}of{}", gate.inputs.len());
            }
        }
        for input in &gate.inputs {
            let _ = write!(out, " \"{input}\"");
        }
        out.push_str(";\n");
    }
    for be in ft.basic_events() {
        match ft.be_probabilities().get(be) {
            Some(p) => {
                let _ = writeln!(out, "\"{be}\" prob={p};");
            }
            None => {
                let _ = writeln!(out, "\"{be}\";");
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Name(String),
    Word(String),
    Semicolon,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn tokenize(line_no: usize, text: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c == ';' {
            tokens.push((col, Token::Semicolon));
            i += 1;
        } else if c == '"' {
            let start = i + 1;
            let end = chars[start..]
                .iter()
                .position(|&c| c == '"')
                .map(|p| start + p)
                .ok_or_else(|| syntax(line_no, col, "unterminated quoted name"))?;
            let name: String = chars[start..end].iter().collect();
            if !is_valid_name(&name) {
                return Err(syntax(line_no, col, format!("invalid name `{name}`")));
            }
            tokens.push((col, Token::Name(name)));
            i = end + 1;
        } else {
            let start = i;
            while i < chars.len() && !chars[i].is_whitespace() && chars[i] != ';' && chars[i] != '"'
            {
                i += 1;
            }
            tokens.push((col, Token::Word(chars[start..i].iter().collect())));
        }
    }
    Ok(tokens)
}

fn parse_kind(word: &str) -> Option<(GateKind, Option<usize>)> {
    let lower = word.to_ascii_lowercase();
    match lower.as_str() {
        "and" => Some((GateKind::And, None)),
        "or" => Some((GateKind::Or, None)),
        _ => {
            let (k, n) = lower.split_once("of")?;
            let k: u32 = k.parse().ok()?;
            let n: usize = n.parse().ok()?;
            Some((GateKind::AtLeast(k), Some(n)))
        }
    }
}

/// Parse a tree, rejecting syntax errors, duplicate or undefined names,
/// cycles and nodes unreachable from the top.
pub fn parse(text: &str) -> Result<FaultTree, ParseError> {
    let mut top: Option<(usize, NodeId)> = None;
    let mut gates: BTreeMap<NodeId, Gate> = BTreeMap::new();
    let mut gate_lines: HashMap<NodeId, usize> = HashMap::new();
    let mut basic_events: BTreeSet<NodeId> = BTreeSet::new();
    let mut probabilities: BTreeMap<NodeId, f64> = BTreeMap::new();
    let mut references: Vec<(usize, NodeId)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = raw.split("//").next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let mut tokens = tokenize(line_no, content)?;
        match tokens.pop() {
            Some((_, Token::Semicolon)) => {}
            _ => {
                return Err(syntax(
                    line_no,
                    content.trim_end().chars().count() + 1,
                    "expected `;` at end of statement",
                ))
            }
        }
        if let Some((col, _)) = tokens.iter().find(|(_, t)| *t == Token::Semicolon) {
            return Err(syntax(line_no, *col, "one statement per line"));
        }
        let mut iter = tokens.into_iter();
        let (col, first) = iter
            .next()
            .ok_or_else(|| syntax(line_no, 1, "empty statement"))?;

        if top.is_none() {
            match first {
                Token::Word(w) if w.eq_ignore_ascii_case("toplevel") => {
                    let name = match iter.next() {
                        Some((_, Token::Name(n))) => n,
                        Some((c, _)) => return Err(syntax(line_no, c, "expected quoted name")),
                        None => return Err(syntax(line_no, col, "expected top event name")),
                    };
                    if let Some((c, _)) = iter.next() {
                        return Err(syntax(line_no, c, "unexpected token after top event"));
                    }
                    top = Some((line_no, NodeId::from(name)));
                    continue;
                }
                _ => return Err(ParseError::MissingToplevel),
            }
        }

        let name = match first {
            Token::Name(n) => NodeId::from(n),
            Token::Word(w) if w.eq_ignore_ascii_case("toplevel") => {
                return Err(ParseError::Duplicate {
                    line: line_no,
                    name: "toplevel".into(),
                })
            }
            _ => return Err(syntax(line_no, col, "expected quoted node name")),
        };
        if gates.contains_key(&name) || basic_events.contains(&name) {
            return Err(ParseError::Duplicate {
                line: line_no,
                name: name.to_string(),
            });
        }

        match iter.next() {
            None => {
                basic_events.insert(name);
            }
            Some((c, Token::Word(w))) => {
                if let Some(value) = w.strip_prefix("prob=") {
                    let p: f64 = value
                        .parse()
                        .map_err(|_| syntax(line_no, c, format!("invalid probability `{value}`")))?;
                    if !(0.0..=1.0).contains(&p) {
                        return Err(syntax(line_no, c, format!("probability {p} outside [0,1]")));
                    }
                    if let Some((c, _)) = iter.next() {
                        return Err(syntax(line_no, c, "unexpected token after probability"));
                    }
                    probabilities.insert(name.clone(), p);
                    basic_events.insert(name);
                } else {
                    let (kind, declared_n) = parse_kind(&w)
                        .ok_or_else(|| syntax(line_no, c, format!("unknown gate type `{w}`")))?;
                    let mut inputs = BTreeSet::new();
                    for (ic, tok) in iter {
                        match tok {
                            Token::Name(n) => {
                                let id = NodeId::from(n);
                                if !inputs.insert(id.clone()) {
                                    return Err(syntax(line_no, ic, format!("duplicate input `{id}`")));
                                }
                                references.push((line_no, id));
                            }
                            _ => return Err(syntax(line_no, ic, "expected quoted input name")),
                        }
                    }
                    if let Some(n) = declared_n {
                        if n != inputs.len() {
                            return Err(syntax(
                                line_no,
                                c,
                                format!("`{w}` declares {n} inputs but lists {}", inputs.len()),
                            ));
                        }
                    }
                    gate_lines.insert(name.clone(), line_no);
                    gates.insert(name, Gate { kind, inputs });
                }
            }
            Some((c, _)) => return Err(syntax(line_no, c, "expected gate type or prob=")),
        }
    }

    let (top_line, top) = top.ok_or(ParseError::MissingToplevel)?;
    if !gates.contains_key(&top) {
        return Err(ParseError::UndefinedReference {
            line: top_line,
            name: top.to_string(),
        });
    }
    for (line, id) in &references {
        if !gates.contains_key(id) && !basic_events.contains(id) {
            return Err(ParseError::UndefinedReference {
                line: *line,
                name: id.to_string(),
            });
        }
    }

    let ft = FaultTree::from_parts(top, gates, basic_events, probabilities);
    if let Some(v) = ft.validate().into_iter().next() {
        return Err(match v {
            Violation::Cycle(n) | Violation::SelfLoop(n) => ParseError::Cycle { name: n.to_string() },
            Violation::Unreachable(n) => ParseError::Unreachable { name: n.to_string() },
            Violation::Cardinality { gate, k, inputs } => syntax(
                gate_lines.get(&gate).copied().unwrap_or(0),
                1,
                format!("cardinality {k} invalid for {inputs} inputs"),
            ),
            other => syntax(0, 0, other.to_string()),
        });
    }
    Ok(ft)
}

impl FaultTree {
    pub fn to_galileo(&self) -> String {
        serialize(self)
    }

    pub fn from_galileo(text: &str) -> Result<FaultTree, ParseError> {
        parse(text)
    }
}
