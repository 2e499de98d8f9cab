use std::fmt;

use thiserror::Error;

use super::{format_matrix, BlowUpSite, Expectation, Header, Move, MoveScript, StatementKind};
use crate::handlecalc::{
    bn_expression, elliptic_with_fibre, from_plumbing, HandleError, HandleExpression, Invariants, Ledger,
};
use crate::numbers::format_rational;
use crate::plumbing::{self, build_linear, linking_matrix, PlumbingGraph};

/// One failed assertion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub key: String,
    pub expected: String,
    pub actual: String,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: expected {}, actual {}", self.key, self.expected, self.actual)
    }
}

fn join(mismatches: &[Mismatch]) -> String {
    mismatches.iter().map(Mismatch::to_string).collect::<Vec<_>>().join("; ")
}

/// Execution failures carry the ledger up to the failing statement.
#[derive(Debug, Clone, Error)]
pub enum ExecError {
    #[error("line {line}: cannot build start manifold: {message}")]
    Header { line: usize, message: String },
    #[error("line {line}: move `{statement}` rejected: {source}")]
    MoveRejected { step: usize, line: usize, statement: String, source: HandleError, ledger: Box<Ledger> },
    #[error("line {line}: expectation failed: {}", join(.mismatches))]
    ExpectationFailed { step: usize, line: usize, mismatches: Vec<Mismatch>, ledger: Box<Ledger> },
}

impl ExecError {
    pub fn ledger(&self) -> Option<&Ledger> {
        match self {
            ExecError::Header { .. } => None,
            ExecError::MoveRejected { ledger, .. } | ExecError::ExpectationFailed { ledger, .. } => Some(ledger),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Execution {
    pub ledger: Ledger,
    pub expression: HandleExpression,
    /// `graphs[k]` is the plumbing after `k` moves, while the script is
    /// still a plumbing-graph computation.
    pub graphs: Vec<Option<PlumbingGraph>>,
    /// `(step, line, statement)` of the first move that left the graph level.
    pub graph_break: Option<(usize, usize, String)>,
}

impl Execution {
    pub fn graph_at(&self, step: usize) -> Result<&PlumbingGraph, String> {
        match self.graphs.get(step) {
            Some(Some(g)) => Ok(g),
            _ => {
                let reason = match &self.graph_break {
                    Some((s, line, text)) => format!("first non-graph move is step {s} `{text}` (line {line})"),
                    None if self.graphs.first().is_some_and(Option::is_none) => {
                        "the start manifold is not a plumbing".to_string()
                    }
                    None => format!("the script has {} moves", self.graphs.len() - 1),
                };
                Err(format!("step {step} is beyond the graph-level prefix: {reason}"))
            }
        }
    }
}

pub fn execute(script: &MoveScript) -> Result<Execution, ExecError> {
    execute_from(script, None)
}

/// Runs `script`; a `manifold given` header starts from `start`.
pub fn execute_from(script: &MoveScript, start: Option<&HandleExpression>) -> Result<Execution, ExecError> {
    let header_err = |message: String| ExecError::Header { line: script.header_line, message };
    let (expr, graph) = match &script.header {
        Header::Linear(framings) => {
            let g = build_linear(framings).map_err(|e| header_err(e.to_string()))?;
            (from_plumbing(&g), Some(g))
        }
        Header::Empty => (HandleExpression::empty(), Some(PlumbingGraph::empty())),
        Header::Ball(n) => (bn_expression(*n).map_err(|e| header_err(e.to_string()))?, None),
        Header::Elliptic(m) => (elliptic_with_fibre(*m).map_err(|e| header_err(e.to_string()))?, None),
        Header::Given => match start {
            Some(h) => (h.clone(), h.as_plumbing()),
            None => return Err(header_err("`manifold given` needs a start expression".into())),
        },
    };
    let mut ledger = Ledger::default();
    ledger.record("start", vec![script.header.to_string()], &expr);
    let mut run = Execution { ledger, expression: expr, graphs: vec![graph], graph_break: None };
    let mut step = 0;
    for statement in &script.statements {
        match &statement.kind {
            StatementKind::Note(text) => run.ledger.notes.push(text.clone()),
            StatementKind::Expect(items) => {
                let inv = run.expression.invariants();
                let mismatches: Vec<Mismatch> = items.iter().filter_map(|e| check(&run.expression, &inv, e)).collect();
                if !mismatches.is_empty() {
                    return Err(ExecError::ExpectationFailed {
                        step,
                        line: statement.line,
                        mismatches,
                        ledger: Box::new(run.ledger),
                    });
                }
            }
            StatementKind::Move(m) => {
                step += 1;
                let next = match apply(&run.expression, m) {
                    Ok(next) => next,
                    Err(source) => {
                        return Err(ExecError::MoveRejected {
                            step,
                            line: statement.line,
                            statement: m.to_string(),
                            source,
                            ledger: Box::new(run.ledger),
                        })
                    }
                };
                let graph = run.graphs.last().cloned().flatten().and_then(|g| graph_move(&g, m, &next));
                if graph.is_none() && run.graphs.last().is_some_and(Option::is_some) {
                    run.graph_break = Some((step, statement.line, m.to_string()));
                }
                run.graphs.push(graph);
                run.ledger.record(m.name(), m.params(), &next);
                run.expression = next;
            }
        }
    }
    Ok(run)
}

fn apply(expr: &HandleExpression, m: &Move) -> Result<HandleExpression, HandleError> {
    match m {
        Move::BlowUp { site, label } => match site {
            BlowUpSite::Isolated => expr.blow_up(label.as_deref()),
            BlowUpSite::Vertex { label: v, mult } => expr.blow_up_vertex(v, *mult, label.as_deref()),
            BlowUpSite::Edge { a, b } => expr.blow_up_edge(a, b, label.as_deref()),
        },
        Move::BlowDown { label } => expr.blow_down(label),
        Move::Slide { handle, over, sign } => expr.slide(handle, over, *sign),
        Move::UncancelPair { one, two, links } => expr.add_cancelling_pair(one.as_deref(), two.as_deref(), links),
        Move::CancelPair { one, two } => expr.remove_cancelling_pair(one, two),
        Move::Rbd { chain, n, name } => expr.rational_blow_down(chain, *n, name.as_deref()),
        Move::Rbu { piece, n, chain, couplings } => expr.rational_blow_up(piece, *n, chain.as_deref(), couplings),
        Move::Unseal { piece, one, two, couplings } => expr.unseal(piece, one.as_deref(), two.as_deref(), couplings),
        Move::Seal { one, two, name } => expr.seal(one, two, name.as_deref()),
    }
}

/// The same move on the plumbing graph, if it is a graph move there and the
/// result still matches the lattice.
fn graph_move(g: &PlumbingGraph, m: &Move, next: &HandleExpression) -> Option<PlumbingGraph> {
    let new_label = || next.two_handles().last().map(|h| h.label.as_str());
    let out = match m {
        Move::BlowUp { site, .. } => match site {
            BlowUpSite::Isolated => plumbing::blow_up_isolated(g, new_label()),
            BlowUpSite::Vertex { label, mult: 1 } => plumbing::blow_up_vertex(g, label, new_label()),
            BlowUpSite::Edge { a, b } => plumbing::blow_up_edge(g, a, b, new_label()),
            _ => return None,
        },
        Move::BlowDown { label } => plumbing::blow_down_vertex(g, label),
        _ => return None,
    }
    .ok()?;
    (linking_matrix(&out) == *next.form()).then_some(out)
}

fn check(expr: &HandleExpression, inv: &Invariants, e: &Expectation) -> Option<Mismatch> {
    let (ok, actual) = match e {
        Expectation::B1(v) => (inv.b1 == *v, inv.b1.to_string()),
        Expectation::B2(v) => (inv.b2 == *v, inv.b2.to_string()),
        Expectation::Euler(v) => (inv.euler == *v, inv.euler.to_string()),
        Expectation::Sigma(v) => (inv.sigma == *v, inv.sigma.to_string()),
        Expectation::Det(v) => (inv.det == *v, format_rational(&inv.det)),
        Expectation::Torsion(t) => (inv.torsion == *t, inv.torsion.to_string()),
        Expectation::Boundary(b) => (inv.boundary == *b, inv.boundary.map_or("none".into(), |b| b.to_string())),
        Expectation::Form(rows) => (expr.form().entries() == rows.as_slice(), format_matrix(expr.form().entries())),
        Expectation::Pieces(p) => {
            let actual = expr.piece_multiset();
            (actual == *p, format!("[{}]", actual.join(",")))
        }
        Expectation::Handles(v) => {
            let k = expr.two_handles().len() as i64;
            (k == *v, k.to_string())
        }
        Expectation::OneHandles(v) => {
            let k = expr.one_handles().len() as i64;
            (k == *v, k.to_string())
        }
        Expectation::Cn { n, count } => {
            let k = expr.find_cn_chains(*n).len() as i64;
            (k == *count, k.to_string())
        }
    };
    (!ok).then(|| Mismatch { key: e.key(), expected: e.value_text(), actual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::handlecalc::Torsion;
    use crate::scriptdsl::parse_script;

    fn run(text: &str) -> Result<Execution, ExecError> {
        execute(&parse_script(text).unwrap())
    }

    #[test]
    fn expectation_failure_reports_values() {
        let err = run("manifold V(-4)\nexpect b2=0").unwrap_err();
        match &err {
            ExecError::ExpectationFailed { mismatches, ledger, line, .. } => {
                assert_eq!(*line, 2);
                assert_eq!(mismatches[0].to_string(), "b2: expected 0, actual 1");
                assert_eq!(ledger.steps.len(), 1);
            }
            other => panic!("{other:?}"),
        }
        assert!(err.to_string().contains("b2: expected 0, actual 1"));
    }

    #[test]
    fn rejected_move_keeps_ledger() {
        let err = run("manifold V(-4)\nblowup as e\nblowdown s1").unwrap_err();
        match err {
            ExecError::MoveRejected { step, line, ledger, source, .. } => {
                assert_eq!((step, line), (2, 3));
                assert_eq!(ledger.steps.len(), 2);
                assert!(matches!(source, HandleError::NotBlowdownable(..)));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn graph_prefix_tracking() {
        let text = "manifold V(-3)\nblowup vertex s1 as e1\nblowup edge s1 e1 as e2\nuncancelpair as h z\nblowup";
        let run = run(text).unwrap();
        assert_eq!(run.graphs.len(), 5);
        assert!(run.graph_at(2).is_ok());
        assert_eq!(run.graph_at(2).unwrap().framing("s1"), Some(-5));
        let err = run.graph_at(3).unwrap_err();
        assert!(err.contains("uncancelpair"), "{err}");
        assert!(run.graph_at(9).is_err());
    }

    #[test]
    fn deterministic_ledger() {
        let text = "manifold chain(-5,-2)\nblowup vertex s2 as t\nrbd chain [s1,s2] n=3";
        let a = parse_script(text).unwrap();
        assert!(execute(&a).is_err());
        let text = "manifold chain(-5,-2,-1)\nrbd chain [s1,s2] n=3 as P\nexpect torsion=? b2=1 sigma=-1 pieces=[B_3]";
        let a = run(text).unwrap().ledger.to_json();
        let b = run(text).unwrap().ledger.to_json();
        assert_eq!(a, b);
    }

    #[test]
    fn given_header() {
        let script = parse_script("manifold given\nblowup as e").unwrap();
        assert!(matches!(execute(&script), Err(ExecError::Header { .. })));
        let start = crate::handlecalc::bn_expression(3).unwrap();
        let run = execute_from(&script, Some(&start)).unwrap();
        assert_eq!(run.ledger.last().unwrap().torsion, Torsion::Known(vec![3]));
        assert!(run.graphs[0].is_none());
    }
}
