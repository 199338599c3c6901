//! A human-writable, line-oriented text format for valued quivers, plus DOT
//! export for visualization.
//!
//! ```text
//! # optional comment lines
//! vertices 3
//! 1 -> 2
//! 2 -> 3 (2,3)
//! ```
//!
//! The first non-comment line declares the vertex count; every following line
//! declares one arrow. A valuation `(a,b)` lists the head component first and
//! the tail component second. Bare arrow lines for the same ordered pair may
//! repeat: `k` repetitions collapse into a single arrow with valuation
//! `(k,k)`, the path-algebra shorthand for `k` parallel arrows. An
//! explicit-valuation line must be the only line for its pair.
//!
//! The canonical form produced by [`serialize`] sorts arrows by
//! `(tail, head)` and always writes valuations explicitly; parsing it back
//! reproduces the same quiver.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::quiver::{Arrow, Valuation, ValuedQuiver, VertexId};

/// A parsed quiver plus presentation data: optional vertex names (unique and
/// nonempty when present) and the source line of each arrow declaration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuiverDocument {
    pub quiver: ValuedQuiver,
    vertex_names: Option<BTreeMap<VertexId, String>>,
    /// 1-based source line of each arrow's first declaration, parallel to
    /// `quiver.arrows()`; empty for documents built in memory.
    pub arrow_lines: Vec<usize>,
}

impl QuiverDocument {
    pub fn from_quiver(quiver: ValuedQuiver) -> Self {
        Self {
            quiver,
            vertex_names: None,
            arrow_lines: Vec::new(),
        }
    }

    /// Attaches display names. Names must be nonempty, mutually distinct, and
    /// name existing vertices.
    pub fn with_names(
        mut self,
        names: BTreeMap<VertexId, String>,
    ) -> Result<Self, DocumentError> {
        let mut seen = std::collections::BTreeSet::new();
        for (v, name) in &names {
            if !self.quiver.contains(*v) {
                return Err(DocumentError::NameForUnknownVertex { vertex: v.get() });
            }
            if name.is_empty() {
                return Err(DocumentError::EmptyName { vertex: v.get() });
            }
            if !seen.insert(name.clone()) {
                return Err(DocumentError::DuplicateName { name: name.clone() });
            }
        }
        self.vertex_names = Some(names);
        Ok(self)
    }

    pub fn vertex_names(&self) -> Option<&BTreeMap<VertexId, String>> {
        self.vertex_names.as_ref()
    }

    fn display_name(&self, v: VertexId) -> String {
        self.vertex_names
            .as_ref()
            .and_then(|names| names.get(&v).cloned())
            .unwrap_or_else(|| v.get().to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DocumentError {
    #[error("vertex {vertex} has an empty name")]
    EmptyName { vertex: usize },
    #[error("duplicate vertex name {name:?}")]
    DuplicateName { name: String },
    #[error("name attached to unknown vertex {vertex}")]
    NameForUnknownVertex { vertex: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: syntax error: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing 'vertices <n>' header")]
    MissingHeader,
    #[error("line {line}: vertex count must be positive")]
    VertexCountNotPositive { line: usize },
    #[error("line {line}: vertex {vertex} out of range 1..={vertex_count}")]
    VertexOutOfRange {
        line: usize,
        vertex: usize,
        vertex_count: usize,
    },
    #[error("line {line}: duplicate explicit valuation for pair ({tail},{head})")]
    DuplicateExplicit {
        line: usize,
        tail: usize,
        head: usize,
    },
    #[error("line {line}: mixed declarations for pair ({tail},{head})")]
    MixedDeclarations {
        line: usize,
        tail: usize,
        head: usize,
    },
}

/// Per-pair parse state: bare repetitions collapse, explicit valuations are
/// exclusive.
enum PairDecl {
    Bare { count: u64, first_line: usize },
    Explicit { val: Valuation, line: usize },
}

fn parse_index(token: &str) -> Option<usize> {
    if token.is_empty() || !token.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    token.parse().ok()
}

fn parse_u64(token: &str) -> Option<u64> {
    if token.is_empty() || !token.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    token.parse().ok()
}

/// Parses `(a,b)` with no internal whitespace.
fn parse_valuation(token: &str) -> Option<Valuation> {
    let inner = token.strip_prefix('(')?.strip_suffix(')')?;
    let (a, b) = inner.split_once(',')?;
    Some(Valuation::new(parse_u64(a)?, parse_u64(b)?))
}

/// Parses the quiver text format. Accepts `\r\n` line endings and blank
/// lines; `#` starts a comment line.
pub fn parse(text: &str) -> Result<QuiverDocument, ParseError> {
    let mut vertex_count: Option<usize> = None;
    let mut pairs: BTreeMap<(usize, usize), PairDecl> = BTreeMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw).trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }

        let Some(n) = vertex_count else {
            let rest = match line.strip_prefix("vertices") {
                Some(rest) if rest.starts_with(char::is_whitespace) => rest,
                _ => {
                    return Err(ParseError::Syntax {
                        line: line_no,
                        message: "expected 'vertices <n>' header".into(),
                    })
                }
            };
            let rest = rest.trim();
            if let Some(n) = parse_index(rest) {
                if n == 0 {
                    return Err(ParseError::VertexCountNotPositive { line: line_no });
                }
                vertex_count = Some(n);
            } else if rest
                .strip_prefix('-')
                .is_some_and(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
            {
                return Err(ParseError::VertexCountNotPositive { line: line_no });
            } else {
                return Err(ParseError::Syntax {
                    line: line_no,
                    message: "expected 'vertices <n>' header".into(),
                });
            }
            continue;
        };

        let tokens: Vec<&str> = line.split_whitespace().collect();
        let (tail_tok, head_tok, val_tok) = match tokens.as_slice() {
            [t, "->", h] => (*t, *h, None),
            [t, "->", h, val] => (*t, *h, Some(*val)),
            _ => {
                return Err(ParseError::Syntax {
                    line: line_no,
                    message: "expected '<tail> -> <head>' or '<tail> -> <head> (<a>,<b>)'".into(),
                })
            }
        };
        let parse_vertex = |tok: &str| -> Result<usize, ParseError> {
            let v = parse_index(tok).ok_or_else(|| ParseError::Syntax {
                line: line_no,
                message: format!("invalid vertex index {tok:?}"),
            })?;
            if v == 0 || v > n {
                return Err(ParseError::VertexOutOfRange {
                    line: line_no,
                    vertex: v,
                    vertex_count: n,
                });
            }
            Ok(v)
        };
        let tail = parse_vertex(tail_tok)?;
        let head = parse_vertex(head_tok)?;
        let explicit = match val_tok {
            None => None,
            Some(tok) => Some(parse_valuation(tok).ok_or_else(|| ParseError::Syntax {
                line: line_no,
                message: format!("invalid valuation {tok:?}, expected (<a>,<b>)"),
            })?),
        };

        match (pairs.get_mut(&(tail, head)), explicit) {
            (None, None) => {
                pairs.insert(
                    (tail, head),
                    PairDecl::Bare {
                        count: 1,
                        first_line: line_no,
                    },
                );
            }
            (None, Some(val)) => {
                pairs.insert((tail, head), PairDecl::Explicit { val, line: line_no });
            }
            (Some(PairDecl::Bare { count, .. }), None) => *count += 1,
            (Some(PairDecl::Explicit { .. }), Some(_)) => {
                return Err(ParseError::DuplicateExplicit {
                    line: line_no,
                    tail,
                    head,
                })
            }
            (Some(_), _) => {
                return Err(ParseError::MixedDeclarations {
                    line: line_no,
                    tail,
                    head,
                })
            }
        }
    }

    let Some(vertex_count) = vertex_count else {
        return Err(ParseError::MissingHeader);
    };

    let mut arrows = Vec::with_capacity(pairs.len());
    let mut arrow_lines = Vec::with_capacity(pairs.len());
    for ((tail, head), decl) in pairs {
        let (val, line) = match decl {
            PairDecl::Bare { count, first_line } => (Valuation::new(count, count), first_line),
            PairDecl::Explicit { val, line } => (val, line),
        };
        arrows.push(Arrow::with_valuation(
            VertexId::new(tail),
            VertexId::new(head),
            val,
        ));
        arrow_lines.push(line);
    }

    Ok(QuiverDocument {
        quiver: ValuedQuiver::new(vertex_count, arrows),
        vertex_names: None,
        arrow_lines,
    })
}

/// Canonical text form: header, then arrows sorted by `(tail, head)` with
/// explicit valuations. `parse(serialize(doc))` reproduces `doc.quiver`.
pub fn serialize(doc: &QuiverDocument) -> String {
    let mut out = format!("vertices {}\n", doc.quiver.vertex_count());
    for a in doc.quiver.arrows() {
        writeln!(
            out,
            "{} -> {} ({},{})",
            a.tail, a.head, a.val.head_mult, a.val.tail_mult
        )
        .expect("writing to String cannot fail");
    }
    out
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz DOT rendering. Arrows are labeled with their valuation pair;
/// sources render as diamonds, sinks as boxes, isolated vertices (both) as
/// double diamonds.
pub fn export_dot(doc: &QuiverDocument) -> String {
    let q = &doc.quiver;
    let mut out = String::from("digraph quiver {\n");
    for v in q.vertices() {
        let class = q.classify_vertex(v).expect("vertex from iterator");
        let shape = match (class.is_source, class.is_sink) {
            (true, true) => Some("Mdiamond"),
            (true, false) => Some("diamond"),
            (false, true) => Some("box"),
            (false, false) => None,
        };
        let mut attrs = format!("label=\"{}\"", dot_escape(&doc.display_name(v)));
        if let Some(shape) = shape {
            write!(attrs, ", shape={shape}").expect("writing to String cannot fail");
        }
        writeln!(out, "    {v} [{attrs}];").expect("writing to String cannot fail");
    }
    for a in q.arrows() {
        writeln!(
            out,
            "    {} -> {} [label=\"({},{})\"];",
            a.tail, a.head, a.val.head_mult, a.val.tail_mult
        )
        .expect("writing to String cannot fail");
    }
    out.push_str("}\n");
    out
}
