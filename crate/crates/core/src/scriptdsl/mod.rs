//! A small line-oriented language for move scripts.
//!
//! ```text
//! # comments start with '#'
//! manifold V(-3)
//! blowup vertex s1 as e1
//! expect b2=2 sigma=-2 boundary=L(3,1)
//! ```
//!
//! Headers: `V(a)`, `chain(a,b,...)`, `B(n)`, `E(m)`, `empty`, `given`
//! (the start expression is supplied by the caller).
//!
//! Moves:
//!
//! | statement | effect |
//! |---|---|
//! | `blowup [as L]` | unlinked `-1` handle |
//! | `blowup vertex V [mult K] [as L]` | blow up a point of `V` |
//! | `blowup edge A B [as L]` | blow up an intersection point of `A` and `B` |
//! | `blowdown L` | blow down a `-1` handle |
//! | `slide I over J [+\|-]` | handle slide `I <- I +/- J` |
//! | `uncancelpair [as X Z] [link L:v ...]` | introduce a cancelling 1/2 pair |
//! | `cancelpair X Z` | remove a cancelling 1/2 pair |
//! | `rbd chain [A,B,...] n=N [as P]` | rational blow-down |
//! | `rbu P n=N [chain [C1,...]] [couple L:pos:v ...]` | rational blow-up |
//! | `unseal P [as X K] [couple L:w:l ...]` | open a sealed `B_n` into handles |
//! | `seal X K [as P]` | close a `B_n` handle pair into a sealed piece |
//!
//! `expect key=value ...` checks the current state; keys are `b1`, `b2`,
//! `euler`, `sigma`, `det`, `torsion`, `boundary`, `form`, `pieces`,
//! `handles`, `onehandles` and `cn(N)`. `note TEXT` copies text into the
//! ledger.

mod builtin;
mod exec;
mod parse;
mod simple;

use std::fmt;

use crate::handlecalc::Torsion;
use crate::numbers::{format_rational, LensSpace, Rational};

pub use builtin::{em_blowup_count, em_script, thm_a_script, thm_b_script, ScriptError};
pub use exec::{execute, execute_from, ExecError, Execution, Mismatch};
pub use parse::{parse_script, ParseError, ParseErrorKind};
pub use simple::{check_simple_diagram, simple_case, DiagramError, DiagramMismatch, DiagramReport, SimpleCase};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Header {
    /// A linear plumbing; `V(a)` is the one-vertex chain.
    Linear(Vec<i64>),
    Ball(i64),
    Elliptic(i64),
    Empty,
    Given,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BlowUpSite {
    Isolated,
    Vertex { label: String, mult: i64 },
    Edge { a: String, b: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Move {
    BlowUp { site: BlowUpSite, label: Option<String> },
    BlowDown { label: String },
    Slide { handle: String, over: String, sign: i64 },
    UncancelPair { one: Option<String>, two: Option<String>, links: Vec<(String, i64)> },
    CancelPair { one: String, two: String },
    Rbd { chain: Vec<String>, n: i64, name: Option<String> },
    Rbu { piece: String, n: i64, chain: Option<Vec<String>>, couplings: Vec<(String, usize, i64)> },
    Unseal { piece: String, one: Option<String>, two: Option<String>, couplings: Vec<(String, i64, i64)> },
    Seal { one: String, two: String, name: Option<String> },
}

impl Move {
    pub fn name(&self) -> &'static str {
        match self {
            Move::BlowUp { .. } => "blowup",
            Move::BlowDown { .. } => "blowdown",
            Move::Slide { .. } => "slide",
            Move::UncancelPair { .. } => "uncancelpair",
            Move::CancelPair { .. } => "cancelpair",
            Move::Rbd { .. } => "rbd",
            Move::Rbu { .. } => "rbu",
            Move::Unseal { .. } => "unseal",
            Move::Seal { .. } => "seal",
        }
    }

    /// The statement text without the move name, split into words.
    pub fn params(&self) -> Vec<String> {
        let text = self.to_string();
        let mut words = split_words(&text);
        words.remove(0);
        words
    }
}

/// Whitespace split that keeps bracketed groups together.
pub(crate) fn split_words(text: &str) -> Vec<String> {
    parse::tokenize(text).into_iter().map(|t| t.text).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expectation {
    B1(i64),
    B2(i64),
    Euler(i64),
    Sigma(i64),
    Det(Rational),
    Torsion(Torsion),
    Boundary(Option<LensSpace>),
    Form(Vec<Vec<Rational>>),
    Pieces(Vec<String>),
    Handles(i64),
    OneHandles(i64),
    Cn { n: i64, count: i64 },
}

impl Expectation {
    pub fn key(&self) -> String {
        match self {
            Expectation::B1(_) => "b1".into(),
            Expectation::B2(_) => "b2".into(),
            Expectation::Euler(_) => "euler".into(),
            Expectation::Sigma(_) => "sigma".into(),
            Expectation::Det(_) => "det".into(),
            Expectation::Torsion(_) => "torsion".into(),
            Expectation::Boundary(_) => "boundary".into(),
            Expectation::Form(_) => "form".into(),
            Expectation::Pieces(_) => "pieces".into(),
            Expectation::Handles(_) => "handles".into(),
            Expectation::OneHandles(_) => "onehandles".into(),
            Expectation::Cn { n, .. } => format!("cn({n})"),
        }
    }

    pub fn value_text(&self) -> String {
        match self {
            Expectation::B1(v)
            | Expectation::B2(v)
            | Expectation::Euler(v)
            | Expectation::Sigma(v)
            | Expectation::Handles(v)
            | Expectation::OneHandles(v)
            | Expectation::Cn { count: v, .. } => v.to_string(),
            Expectation::Det(d) => format_rational(d),
            Expectation::Torsion(t) => t.to_string(),
            Expectation::Boundary(b) => b.map_or("none".to_string(), |b| b.to_string()),
            Expectation::Form(rows) => format_matrix(rows),
            Expectation::Pieces(p) => format!("[{}]", p.join(",")),
        }
    }
}

pub(crate) fn format_matrix(rows: &[Vec<Rational>]) -> String {
    let rows: Vec<String> =
        rows.iter().map(|r| format!("[{}]", r.iter().map(format_rational).collect::<Vec<_>>().join(","))).collect();
    format!("[{}]", rows.join(","))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StatementKind {
    Move(Move),
    Expect(Vec<Expectation>),
    Note(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Statement {
    pub line: usize,
    pub kind: StatementKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoveScript {
    pub header: Header,
    pub header_line: usize,
    pub statements: Vec<Statement>,
}

impl MoveScript {
    pub fn moves(&self) -> impl Iterator<Item = &Move> {
        self.statements.iter().filter_map(|s| match &s.kind {
            StatementKind::Move(m) => Some(m),
            _ => None,
        })
    }

    /// Statement kinds without source positions.
    pub fn kinds(&self) -> Vec<&StatementKind> {
        self.statements.iter().map(|s| &s.kind).collect()
    }
}

impl fmt::Display for Header {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Header::Linear(v) if v.len() == 1 => write!(f, "V({})", v[0]),
            Header::Linear(v) => {
                write!(f, "chain({})", v.iter().map(i64::to_string).collect::<Vec<_>>().join(","))
            }
            Header::Ball(n) => write!(f, "B({n})"),
            Header::Elliptic(m) => write!(f, "E({m})"),
            Header::Empty => write!(f, "empty"),
            Header::Given => write!(f, "given"),
        }
    }
}

fn write_as(f: &mut fmt::Formatter<'_>, labels: &[&Option<String>]) -> fmt::Result {
    if labels.iter().any(|l| l.is_some()) {
        write!(f, " as")?;
        for l in labels {
            write!(f, " {}", l.as_deref().unwrap_or("_"))?;
        }
    }
    Ok(())
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::BlowUp { site, label } => {
                write!(f, "blowup")?;
                match site {
                    BlowUpSite::Isolated => {}
                    BlowUpSite::Vertex { label, mult } => {
                        write!(f, " vertex {label}")?;
                        if *mult != 1 {
                            write!(f, " mult {mult}")?;
                        }
                    }
                    BlowUpSite::Edge { a, b } => write!(f, " edge {a} {b}")?,
                }
                write_as(f, &[label])
            }
            Move::BlowDown { label } => write!(f, "blowdown {label}"),
            Move::Slide { handle, over, sign } => {
                write!(f, "slide {handle} over {over} {}", if *sign < 0 { "-" } else { "+" })
            }
            Move::UncancelPair { one, two, links } => {
                write!(f, "uncancelpair")?;
                write_as(f, &[one, two])?;
                if !links.is_empty() {
                    write!(f, " link")?;
                    for (l, v) in links {
                        write!(f, " {l}:{v}")?;
                    }
                }
                Ok(())
            }
            Move::CancelPair { one, two } => write!(f, "cancelpair {one} {two}"),
            Move::Rbd { chain, n, name } => {
                write!(f, "rbd chain [{}] n={n}", chain.join(","))?;
                write_as(f, &[name])
            }
            Move::Rbu { piece, n, chain, couplings } => {
                write!(f, "rbu {piece} n={n}")?;
                if let Some(chain) = chain {
                    write!(f, " chain [{}]", chain.join(","))?;
                }
                if !couplings.is_empty() {
                    write!(f, " couple")?;
                    for (l, pos, v) in couplings {
                        write!(f, " {l}:{pos}:{v}")?;
                    }
                }
                Ok(())
            }
            Move::Unseal { piece, one, two, couplings } => {
                write!(f, "unseal {piece}")?;
                write_as(f, &[one, two])?;
                if !couplings.is_empty() {
                    write!(f, " couple")?;
                    for (l, w, v) in couplings {
                        write!(f, " {l}:{w}:{v}")?;
                    }
                }
                Ok(())
            }
            Move::Seal { one, two, name } => {
                write!(f, "seal {one} {two}")?;
                write_as(f, &[name])
            }
        }
    }
}

impl fmt::Display for StatementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatementKind::Move(m) => write!(f, "{m}"),
            StatementKind::Expect(items) => {
                write!(f, "expect")?;
                for e in items {
                    write!(f, " {}={}", e.key(), e.value_text())?;
                }
                Ok(())
            }
            StatementKind::Note(text) => write!(f, "note {text}"),
        }
    }
}

/// Canonical text; parsing it gives back the same statements.
impl fmt::Display for MoveScript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "manifold {}", self.header)?;
        for s in &self.statements {
            writeln!(f, "{}", s.kind)?;
        }
        Ok(())
    }
}
