//! The two-path diagram for an embedded rational ball: rationally blow up
//! and then blow down `n - 1` times, or blow up `n - 1` times and then
//! rationally blow down. The embedding counts as simple when both paths
//! land on the ledger of the start.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use super::builtin::ScriptError;
use super::{em_script, execute, execute_from, parse_script, ExecError, Header, Move, MoveScript};
use crate::handlecalc::{from_plumbing, HandleExpression, Invariants, Ledger};
use crate::plumbing::build_linear;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SimpleCase {
    /// `B_n` in the `-(n+1)` sphere neighbourhood.
    Sphere,
    /// `B_n` in the `-4` sphere neighbourhood, odd `n`.
    MinusFour,
    /// `B_n` in `E(m)_n`.
    Elliptic { m: i64 },
}

impl SimpleCase {
    /// The verdict the construction is expected to give.
    pub fn expected_simple(&self) -> bool {
        !matches!(self, SimpleCase::Elliptic { .. })
    }

    pub fn name(&self) -> String {
        match self {
            SimpleCase::Sphere => "v".into(),
            SimpleCase::MinusFour => "v4".into(),
            SimpleCase::Elliptic { m } => format!("em(m={m})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiagramMismatch {
    pub path: String,
    pub key: String,
    pub start: String,
    pub end: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagramReport {
    pub n: i64,
    pub path_up: Ledger,
    pub path_down: Ledger,
    pub simple: bool,
    pub mismatches: Vec<DiagramMismatch>,
}

#[derive(Debug, Clone, Error)]
pub enum DiagramError {
    #[error("malformed path: {0}")]
    MalformedPath(String),
    #[error("{path} path failed: {source}")]
    PathFailed { path: String, source: ExecError },
    #[error(transparent)]
    Script(#[from] ScriptError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shape {
    Up,
    Down,
}

/// Classifies a path by its blow-up/down skeleton; other moves are free.
fn shape(script: &MoveScript, n: i64) -> Result<Shape, String> {
    if script.header != Header::Given {
        return Err(format!("paths must start with `manifold given`, found `manifold {}`", script.header));
    }
    let core: Vec<&Move> = script
        .moves()
        .filter(|m| matches!(m, Move::BlowUp { .. } | Move::BlowDown { .. } | Move::Rbd { .. } | Move::Rbu { .. }))
        .collect();
    let count = (n - 1) as usize;
    let describe = || core.iter().map(|m| m.name()).collect::<Vec<_>>().join(", ");
    if core.len() != count + 1 {
        return Err(format!("expected one rational move and {count} ordinary ones, found [{}]", describe()));
    }
    match core[0] {
        Move::Rbu { n: k, .. } if *k == n && core[1..].iter().all(|m| matches!(m, Move::BlowDown { .. })) => {
            Ok(Shape::Up)
        }
        Move::BlowUp { .. }
            if core[..count].iter().all(|m| matches!(m, Move::BlowUp { .. }))
                && matches!(core[count], Move::Rbd { n: k, .. } if *k == n) =>
        {
            Ok(Shape::Down)
        }
        _ => {
            Err(format!("expected `rbu` then {count} blowdowns, or {count} blowups then `rbd`; found [{}]", describe()))
        }
    }
}

fn compare(path: &str, start: &HandleExpression, end: &HandleExpression, out: &mut Vec<DiagramMismatch>) {
    let (a, b): (Invariants, Invariants) = (start.invariants(), end.invariants());
    let boundary = |i: &Invariants| i.boundary.map_or("none".to_string(), |b| b.to_string());
    let pieces = |h: &HandleExpression| format!("[{}]", h.piece_multiset().join(","));
    let rows = [
        ("b1", a.b1.to_string(), b.b1.to_string()),
        ("b2", a.b2.to_string(), b.b2.to_string()),
        ("euler", a.euler.to_string(), b.euler.to_string()),
        ("sigma", a.sigma.to_string(), b.sigma.to_string()),
        ("boundary", boundary(&a), boundary(&b)),
        ("pieces", pieces(start), pieces(end)),
    ];
    for (key, s, e) in rows {
        if s != e {
            out.push(DiagramMismatch { path: path.into(), key: key.into(), start: s, end: e });
        }
    }
}

/// Runs both paths from `start`. The two scripts may be passed in either
/// order; they are told apart by their move skeletons.
pub fn check_simple_diagram(
    start: &HandleExpression,
    first: &MoveScript,
    second: &MoveScript,
    n: i64,
) -> Result<DiagramReport, DiagramError> {
    if n < 2 {
        return Err(ScriptError::InvalidParameter(format!("needs n >= 2, got {n}")).into());
    }
    let a = shape(first, n).map_err(DiagramError::MalformedPath)?;
    let b = shape(second, n).map_err(DiagramError::MalformedPath)?;
    let (up, down) = match (a, b) {
        (Shape::Up, Shape::Down) => (first, second),
        (Shape::Down, Shape::Up) => (second, first),
        _ => return Err(DiagramError::MalformedPath("need one up path and one down path".into())),
    };
    let run = |path: &str, script: &MoveScript| {
        execute_from(script, Some(start)).map_err(|source| DiagramError::PathFailed { path: path.into(), source })
    };
    let up_run = run("up", up)?;
    let down_run = run("down", down)?;
    let mut mismatches = Vec::new();
    compare("up", start, &up_run.expression, &mut mismatches);
    compare("down", start, &down_run.expression, &mut mismatches);
    Ok(DiagramReport {
        n,
        path_up: up_run.ledger,
        path_down: down_run.ledger,
        simple: mismatches.is_empty(),
        mismatches,
    })
}

fn chain_labels(n: i64) -> Vec<String> {
    (1..n).map(|i| format!("c{i}")).collect()
}

fn script(text: String) -> MoveScript {
    parse_script(&text).unwrap_or_else(|e| panic!("generated path does not parse: {e}\n{text}"))
}

/// Start expression and the two paths for one of the built-in cases.
pub fn simple_case(case: SimpleCase, n: i64) -> Result<(HandleExpression, MoveScript, MoveScript), ScriptError> {
    if n < 2 {
        return Err(ScriptError::InvalidParameter(format!("needs n >= 2, got {n}")));
    }
    let chain = chain_labels(n);
    match case {
        SimpleCase::Sphere => {
            let start = from_plumbing(&build_linear(&[-n - 1]).expect("nonempty"));
            let mut up = String::from("manifold given\nuncancelpair as h z link s1:1\n");
            for _ in 0..n {
                up.push_str("slide s1 over z +\n");
            }
            writeln!(up, "seal h s1 as B{n}").unwrap();
            writeln!(up, "rbu B{n} n={n} chain [{}] couple z:{}:1", chain.join(","), n - 1).unwrap();
            up.push_str("blowdown z\n");
            for i in (2..n).rev() {
                writeln!(up, "blowdown c{i}").unwrap();
            }
            let mut down = String::from("manifold given\n");
            let mut last = "s1".to_string();
            for i in 1..n {
                writeln!(down, "blowup vertex {last} as e{i}").unwrap();
                last = format!("e{i}");
            }
            let mut rbd = vec!["s1".to_string()];
            rbd.extend((1..n - 1).map(|i| format!("e{i}")));
            writeln!(down, "rbd chain [{}] n={n} as B{n}", rbd.join(",")).unwrap();
            writeln!(down, "unseal B{n} as d k couple {last}:1:1").unwrap();
            for _ in 0..n {
                writeln!(down, "slide k over {last} -").unwrap();
            }
            writeln!(down, "cancelpair d {last}").unwrap();
            Ok((start, script(up), script(down)))
        }
        SimpleCase::MinusFour => {
            if n < 3 || n % 2 == 0 {
                return Err(ScriptError::InvalidParameter(format!("the -4 case needs odd n >= 3, got {n}")));
            }
            let start = from_plumbing(&build_linear(&[-4]).expect("nonempty"));
            let mut up = String::from("manifold given\nuncancelpair as h z link s1:1\n");
            up.push_str("slide s1 over z +\nslide s1 over z +\n");
            for _ in 0..(n - 3) / 2 {
                up.push_str("slide z over s1 +\n");
            }
            up.push_str("slide s1 over z +\n");
            writeln!(up, "seal h s1 as B{n}").unwrap();
            writeln!(up, "rbu B{n} n={n} chain [{}] couple z:2:1", chain.join(",")).unwrap();
            up.push_str("blowdown z\n");
            for i in 2..n {
                writeln!(up, "blowdown c{i}").unwrap();
            }
            let mut down = String::from("manifold given\nblowup vertex s1 as e1\n");
            for j in 2..=n - 2 {
                writeln!(down, "blowup edge s1 e{} as e{j}", j - 1).unwrap();
            }
            writeln!(down, "blowup vertex e{} as e{}", n - 2, n - 1).unwrap();
            let sp = format!("e{}", n - 1);
            let mut rbd = vec!["s1".to_string()];
            rbd.extend((1..=n - 2).rev().map(|i| format!("e{i}")));
            writeln!(down, "rbd chain [{}] n={n} as B{n}", rbd.join(",")).unwrap();
            writeln!(down, "unseal B{n} as d k couple {sp}:{}:{}", n - 2, n - 2).unwrap();
            writeln!(down, "slide k over {sp} -").unwrap();
            for _ in 0..(n - 3) / 2 {
                writeln!(down, "slide {sp} over k -").unwrap();
            }
            writeln!(down, "slide k over {sp} -\nslide k over {sp} -\ncancelpair d {sp}").unwrap();
            Ok((start, script(up), script(down)))
        }
        SimpleCase::Elliptic { m } => {
            let run = execute(&em_script(n, m)?).expect("built-in E(m)_n script runs");
            let start = run.expression;
            let sp = format!("e{}", n - 1);
            let mut up = String::from("manifold given\n");
            writeln!(up, "rbu B{n} n={n} chain [{}] couple {sp}:1:1 {sp}:{}:1", chain.join(","), n - 1).unwrap();
            writeln!(up, "blowdown {sp}").unwrap();
            for i in (2..n).rev() {
                writeln!(up, "blowdown c{i}").unwrap();
            }
            let mut down = String::from("manifold given\n");
            writeln!(down, "blowup vertex {sp} mult 2 as g1").unwrap();
            for k in 2..n {
                writeln!(down, "blowup edge {sp} g{} as g{k}", k - 1).unwrap();
            }
            let mut rbd = vec![sp.clone()];
            rbd.extend((1..n - 1).map(|i| format!("g{i}")));
            writeln!(down, "rbd chain [{}] n={n} as B{n}b", rbd.join(",")).unwrap();
            Ok((start, script(up), script(down)))
        }
    }
}
