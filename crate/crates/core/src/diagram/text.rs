//! Line-oriented text format for diagrams and rewrite rules.
//!
//! ```text
//! gct-diagram 1
//! signature qucirc
//! inputs Q
//! outputs Q
//! node 0 box X phase angle:1.5707963267948966
//! wire in:0 0.0
//! wire 0.0 out:0
//! end
//! ```
//!
//! Wires are written `wire <source> <target>`, where a source is `in:<i>` or
//! `<node>.<output port>` and a target is `out:<j>` or `<node>.<input port>`.
//! `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::{Diagram, Node, NodeId, NodeKind, Phase, Source, SystemType, Target};
use crate::signatures::Signature;

pub const DIAGRAM_HEADER: &str = "gct-diagram 1";
pub const RULE_HEADER: &str = "gct-rule 1";

#[derive(Clone, Debug, PartialEq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

struct Tok<'a> {
    text: &'a str,
    column: usize,
}

struct Line<'a> {
    number: usize,
    toks: Vec<Tok<'a>>,
}

impl Line<'_> {
    fn err(&self, idx: usize, message: impl Into<String>) -> ParseError {
        let column = self.toks.get(idx).map(|t| t.column).unwrap_or(1);
        ParseError { line: self.number, column, message: message.into() }
    }

    fn tok(&self, idx: usize, what: &str) -> Result<&str, ParseError> {
        self.toks.get(idx).map(|t| t.text).ok_or_else(|| self.err(idx.saturating_sub(1), format!("expected {what}")))
    }

    fn usize_at(&self, idx: usize, what: &str) -> Result<usize, ParseError> {
        self.tok(idx, what)?.parse().map_err(|_| self.err(idx, format!("expected {what}")))
    }
}

fn lex(text: &str) -> Vec<Line<'_>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap();
        let mut toks = Vec::new();
        let mut start = None;
        for (pos, ch) in content.char_indices().chain(std::iter::once((content.len(), ' '))) {
            if ch.is_whitespace() {
                if let Some(s) = start.take() {
                    toks.push(Tok { text: &content[s..pos], column: s + 1 });
                }
            } else if start.is_none() {
                start = Some(pos);
            }
        }
        if !toks.is_empty() {
            out.push(Line { number: i + 1, toks });
        }
    }
    out
}

/// Serialises a diagram. Nodes are written in id order and wires in target order, so
/// the output is a function of the diagram's structure and ids.
pub fn print_diagram(d: &Diagram, signature: &str) -> String {
    let mut s = String::new();
    let types = |ts: &[SystemType]| ts.iter().map(|t| format!(" {t}")).collect::<String>();
    writeln!(s, "{DIAGRAM_HEADER}").unwrap();
    writeln!(s, "signature {signature}").unwrap();
    writeln!(s, "inputs{}", types(d.inputs())).unwrap();
    writeln!(s, "outputs{}", types(d.outputs())).unwrap();
    for (id, n) in d.nodes() {
        match &n.kind {
            NodeKind::Box { name, phase, .. } => {
                write!(s, "node {} box {name}", id.0).unwrap();
                if let Some(p) = phase {
                    write!(s, " phase {p}").unwrap();
                }
            }
            NodeKind::Spider { colour, phase } => {
                let sys = n.inputs.first().or(n.outputs.first()).map(|t| t.to_string());
                let sys = sys.unwrap_or_else(|| "-".into());
                write!(s, "node {} spider {colour} {sys} {} {}", id.0, n.inputs.len(), n.outputs.len()).unwrap();
                if !phase.is_zero() {
                    write!(s, " phase {phase}").unwrap();
                }
            }
            NodeKind::Cup => write!(s, "node {} cup {}", id.0, n.outputs[1]).unwrap(),
            NodeKind::Cap => write!(s, "node {} cap {}", id.0, n.inputs[0]).unwrap(),
        }
        s.push('\n');
    }
    let mut wires: Vec<(&Target, &Source)> = d.links().iter().collect();
    wires.sort_by_key(|(t, _)| match t {
        Target::Output(j) => (1, 0, *j),
        Target::In(n, k) => (0, n.0, *k),
    });
    for (t, src) in wires {
        let src = match src {
            Source::Input(i) => format!("in:{i}"),
            Source::Out(n, k) => format!("{}.{k}", n.0),
        };
        let tgt = match t {
            Target::Output(j) => format!("out:{j}"),
            Target::In(n, k) => format!("{}.{k}", n.0),
        };
        writeln!(s, "wire {src} {tgt}").unwrap();
    }
    writeln!(s, "end").unwrap();
    s
}

fn parse_types(sig: &Signature, line: &Line<'_>) -> Result<Vec<SystemType>, ParseError> {
    (1..line.toks.len()).map(|i| sig.ty(line.toks[i].text).map_err(|e| line.err(i, e.to_string()))).collect()
}

fn parse_phase(line: &Line<'_>, idx: usize) -> Result<Option<Phase>, ParseError> {
    match line.toks.get(idx).map(|t| t.text) {
        None => Ok(None),
        Some("phase") => {
            let p = line.tok(idx + 1, "phase value")?;
            let p = p.parse::<Phase>().map_err(|e| line.err(idx + 1, e))?;
            if line.toks.len() > idx + 2 {
                return Err(line.err(idx + 2, "unexpected trailing token"));
            }
            Ok(Some(p))
        }
        Some(_) => Err(line.err(idx, "expected 'phase' or end of line")),
    }
}

fn parse_endpoint(line: &Line<'_>, idx: usize, source: bool) -> Result<Result<Source, Target>, ParseError> {
    let t = line.tok(idx, "wire endpoint")?;
    let boundary = if source { "in:" } else { "out:" };
    if let Some(rest) = t.strip_prefix(boundary) {
        let i: usize = rest.parse().map_err(|_| line.err(idx, "bad boundary index"))?;
        return Ok(if source { Ok(Source::Input(i)) } else { Err(Target::Output(i)) });
    }
    let (n, k) = t.split_once('.').ok_or_else(|| line.err(idx, format!("expected {boundary}<i> or <node>.<port>")))?;
    let n: u32 = n.parse().map_err(|_| line.err(idx, "bad node id"))?;
    let k: usize = k.parse().map_err(|_| line.err(idx, "bad port index"))?;
    Ok(if source { Ok(Source::Out(NodeId(n), k)) } else { Err(Target::In(NodeId(n), k)) })
}

fn parse_block<'a>(lines: &[Line<'a>], pos: &mut usize, sig: &Signature) -> Result<Diagram, ParseError> {
    let eof = |pos: usize| ParseError {
        line: lines.get(pos.saturating_sub(1)).map(|l| l.number).unwrap_or(1),
        column: 1,
        message: "unexpected end of input".into(),
    };
    let header = lines.get(*pos).ok_or_else(|| eof(*pos))?;
    let header_text: Vec<&str> = header.toks.iter().map(|t| t.text).collect();
    if header_text.join(" ") != DIAGRAM_HEADER {
        return Err(header.err(0, format!("expected '{DIAGRAM_HEADER}'")));
    }
    *pos += 1;
    let sig_line = lines.get(*pos).ok_or_else(|| eof(*pos))?;
    if sig_line.toks[0].text != "signature" || sig_line.toks.len() != 2 {
        return Err(sig_line.err(0, "expected 'signature <name>'"));
    }
    if sig_line.toks[1].text != sig.name {
        return Err(sig_line.err(1, format!("diagram is for signature '{}', expected '{}'", sig_line.toks[1].text, sig.name)));
    }
    *pos += 1;
    let mut d = Diagram::empty();
    let (mut inputs, mut outputs) = (None, None);
    let mut ids = BTreeMap::new();
    loop {
        let line = lines.get(*pos).ok_or_else(|| eof(*pos))?;
        *pos += 1;
        match line.toks[0].text {
            "end" => break,
            "inputs" => inputs = Some(parse_types(sig, line)?),
            "outputs" => outputs = Some(parse_types(sig, line)?),
            "node" => {
                let id = line.usize_at(1, "node id")? as u32;
                let kind = line.tok(2, "node kind")?;
                let node = match kind {
                    "box" => {
                        let name = line.tok(3, "generator name")?;
                        let phase = parse_phase(line, 4)?;
                        sig.box_node(name, phase).map_err(|e| line.err(3, e.to_string()))?
                    }
                    "spider" => {
                        let colour = line.tok(3, "colour")?;
                        let sys_text = line.tok(4, "system")?;
                        let n_in = line.usize_at(5, "input count")?;
                        let n_out = line.usize_at(6, "output count")?;
                        let phase = parse_phase(line, 7)?.unwrap_or(Phase::Zero);
                        let node = sig.spider_node(colour, n_in, n_out, phase).map_err(|e| line.err(3, e.to_string()))?;
                        let home = &sig.colour(colour).unwrap().system;
                        if sys_text != "-" && sig.ty(sys_text).map_err(|e| line.err(4, e.to_string()))? != *home {
                            return Err(line.err(4, format!("colour '{colour}' lives on {}", sig.colour(colour).unwrap().system)));
                        }
                        node
                    }
                    "cup" | "cap" => {
                        let sys = sig.ty(line.tok(3, "system")?).map_err(|e| line.err(3, e.to_string()))?;
                        if line.toks.len() > 4 {
                            return Err(line.err(4, "unexpected trailing token"));
                        }
                        let n = if kind == "cup" { Node::cup(&sys) } else { Node::cap(&sys) };
                        n.map_err(|e| line.err(3, e.to_string()))?
                    }
                    _ => return Err(line.err(2, format!("unknown node kind '{kind}'"))),
                };
                if ids.contains_key(&id) {
                    return Err(line.err(1, format!("duplicate node id {id}")));
                }
                d.next_id = id;
                let got = d.add_node(node);
                ids.insert(id, got);
            }
            "wire" => {
                let src = parse_endpoint(line, 1, true)?.unwrap();
                let tgt = parse_endpoint(line, 2, false)?.unwrap_err();
                if line.toks.len() > 3 {
                    return Err(line.err(3, "unexpected trailing token"));
                }
                for (idx, id) in [(1, match src {
                    Source::Out(n, _) => Some(n),
                    _ => None,
                }), (2, match tgt {
                    Target::In(n, _) => Some(n),
                    _ => None,
                })] {
                    if let Some(n) = id {
                        if !ids.contains_key(&n.0) {
                            return Err(line.err(idx, format!("unknown node {}", n.0)));
                        }
                    }
                }
                if d.links.insert(tgt, src).is_some() {
                    return Err(line.err(2, "target already connected"));
                }
            }
            other => return Err(line.err(0, format!("unknown directive '{other}'"))),
        }
    }
    let last = lines[*pos - 1].number;
    d.inputs = inputs.ok_or(ParseError { line: last, column: 1, message: "missing 'inputs' line".into() })?;
    d.outputs = outputs.ok_or(ParseError { line: last, column: 1, message: "missing 'outputs' line".into() })?;
    d.next_id = ids.keys().map(|k| k + 1).max().unwrap_or(0);
    d.validate().map_err(|e| ParseError { line: last, column: 1, message: e.to_string() })?;
    Ok(d)
}

pub fn parse_diagram(text: &str, sig: &Signature) -> Result<Diagram, ParseError> {
    let lines = lex(text);
    let mut pos = 0;
    let d = parse_block(&lines, &mut pos, sig)?;
    if let Some(extra) = lines.get(pos) {
        return Err(extra.err(0, "trailing content after 'end'"));
    }
    Ok(d)
}

/// A named rewrite rule as stored on disk.
#[derive(Clone, Debug, PartialEq)]
pub struct RuleText {
    pub name: String,
    pub spider_aware: bool,
    pub lhs: Diagram,
    pub rhs: Diagram,
}

pub fn print_rule(rule: &RuleText, signature: &str) -> String {
    let mut s = format!("{RULE_HEADER}\nname {}\n", rule.name);
    if rule.spider_aware {
        s.push_str("spider-aware\n");
    }
    s.push_str("lhs\n");
    s.push_str(&print_diagram(&rule.lhs, signature));
    s.push_str("rhs\n");
    s.push_str(&print_diagram(&rule.rhs, signature));
    s
}

pub fn parse_rule(text: &str, sig: &Signature) -> Result<RuleText, ParseError> {
    let lines = lex(text);
    let first = lines.first().ok_or(ParseError { line: 1, column: 1, message: "empty rule file".into() })?;
    if first.toks.iter().map(|t| t.text).collect::<Vec<_>>().join(" ") != RULE_HEADER {
        return Err(first.err(0, format!("expected '{RULE_HEADER}'")));
    }
    let name_line = lines.get(1).ok_or_else(|| first.err(0, "expected 'name <rule>'"))?;
    if name_line.toks[0].text != "name" || name_line.toks.len() != 2 {
        return Err(name_line.err(0, "expected 'name <rule>'"));
    }
    let name = name_line.toks[1].text.to_string();
    let mut pos = 2;
    let mut spider_aware = false;
    if lines.get(pos).map(|l| l.toks[0].text) == Some("spider-aware") {
        spider_aware = true;
        pos += 1;
    }
    let expect = |pos: &mut usize, word: &str| -> Result<(), ParseError> {
        match lines.get(*pos) {
            Some(l) if l.toks.len() == 1 && l.toks[0].text == word => {
                *pos += 1;
                Ok(())
            }
            Some(l) => Err(l.err(0, format!("expected '{word}'"))),
            None => Err(ParseError { line: name_line.number, column: 1, message: format!("missing '{word}' block") }),
        }
    };
    expect(&mut pos, "lhs")?;
    let lhs = parse_block(&lines, &mut pos, sig)?;
    expect(&mut pos, "rhs")?;
    let rhs = parse_block(&lines, &mut pos, sig)?;
    if let Some(extra) = lines.get(pos) {
        return Err(extra.err(0, "trailing content after rule"));
    }
    Ok(RuleText { name, spider_aware, lhs, rhs })
}
