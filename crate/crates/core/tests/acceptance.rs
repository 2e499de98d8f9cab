//! Acceptance run: one PASS/FAIL line per criterion, exits nonzero if any
//! criterion fails or exceeds its time budget.

mod common;

use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use common::*;
use rbdcalc::handlecalc::{bn_expression, from_plumbing, HandleExpression, Torsion};
use rbdcalc::lattice::SymmetricForm;
use rbdcalc::numbers::{cf_eval, cn_fraction, lens_equal, lens_normalize, ratio};
use rbdcalc::plumbing::{boundary_lens, build_linear, linking_matrix};
use rbdcalc::scriptdsl::{
    check_simple_diagram, execute, simple_case, thm_a_script, thm_b_script, Move, SimpleCase, StatementKind,
};

type Check = Result<String, String>;

/// `(number, time budget in seconds, check)`.
type Criterion = (u32, Option<f64>, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion_1() -> Check {
    for n in 2..=50i64 {
        let cf = cn_fraction(n).map_err(|e| e.to_string())?;
        let value = cf_eval(&cf).map_err(|e| e.to_string())?;
        ensure(value == ratio(-n * n, n - 1), || format!("n={n}: cf_eval gives {value}"))?;
        let (p, q) = cf_oracle(&cf.0);
        ensure(value == BigRational::new(BigInt::from(p), BigInt::from(q)), || {
            format!("n={n}: recurrence oracle gives {p}/{q}, engine {value}")
        })?;
    }
    Ok("cf_eval(C_n) = -n^2/(n-1) for n=2..50, matches recurrence oracle".into())
}

fn criterion_2() -> Check {
    for n in 2..=50i64 {
        let cf = cn_fraction(n).map_err(|e| e.to_string())?;
        let g = build_linear(&cf.0).map_err(|e| e.to_string())?;
        let lens = boundary_lens(&g).map_err(|e| e.to_string())?;
        let want = lens_normalize(n * n, n - 1).map_err(|e| e.to_string())?;
        ensure(lens_equal(&lens, &want), || format!("n={n}: boundary {lens}, want {want}"))?;
        let form = linking_matrix(&g);
        let det = form.determinant();
        ensure(det.abs() == ratio(n * n, 1), || format!("n={n}: |det| = {}", det.abs()))?;
        ensure(form.is_negative_definite(), || format!("n={n}: not negative definite"))?;
        // Oracle: leading minors of a tridiagonal matrix, D_k = a_k D_{k-1} - D_{k-2}.
        let (mut prev, mut cur) = (BigInt::zero(), BigInt::one());
        for (k, &a) in cf.0.iter().enumerate() {
            let next = BigInt::from(a) * &cur - if k == 0 { BigInt::zero() } else { prev.clone() };
            prev = cur;
            cur = next;
            let want_negative = k % 2 == 0;
            ensure(!cur.is_zero() && cur.is_negative() == want_negative, || {
                format!("n={n}: leading minor {} has sign {}", k + 1, cur)
            })?;
        }
        ensure(cur.abs() == BigInt::from(n * n), || format!("n={n}: minor oracle det {cur}"))?;
        ensure(BigRational::from_integer(cur.clone()) == det, || format!("n={n}: det {det} vs oracle {cur}"))?;
    }
    Ok("boundary(C_n) = L(n^2, n-1), |det| = n^2, negative definite for n=2..50".into())
}

fn criterion_3() -> Check {
    for n in 2..=50i64 {
        let b = bn_expression(n).map_err(|e| e.to_string())?;
        let (b1, b2, torsion) = b.homology();
        ensure(b1 == 0 && b2 == 0 && torsion == Torsion::Known(vec![n as u64]), || {
            format!("n={n}: homology ({b1}, {b2}, {torsion})")
        })?;
        // Oracle: one 1-handle and one 2-handle winding w times give H_1 = Z/|w|.
        let w = b.two_handles()[0].winding[0];
        ensure(w.abs() == n, || format!("n={n}: winding {w}"))?;
        let (euler, sigma) = b.euler_sigma();
        ensure(euler == 1 && sigma == 0, || format!("n={n}: (euler, sigma) = ({euler}, {sigma})"))?;
    }
    Ok("B_n has (b1, b2, H1) = (0, 0, Z/n), euler 1, sigma 0 for n=2..50".into())
}

fn criterion_4() -> Check {
    for n in 2..=30i64 {
        let run = execute(&thm_a_script(n).unwrap()).map_err(|e| format!("n={n}: {e}"))?;
        let form = run.expression.form();
        ensure(form.dim() == 1 && *form.entry(0, 0) == ratio(-n - 1, 1), || format!("n={n}: final form {form:?}"))?;
        ensure(run.expression.pieces().is_empty() && run.expression.one_handles().is_empty(), || {
            format!("n={n}: leftover pieces or 1-handles")
        })?;
        ensure(run.ledger.first() == run.ledger.last(), || format!("n={n}: first and last ledger rows differ"))?;
        let lens = lens_normalize(n + 1, 1).unwrap();
        for (k, step) in run.ledger.steps.iter().enumerate() {
            ensure(step.invariants.boundary == Some(lens), || {
                format!("n={n}: step {k} ({}) boundary {:?}", step.move_name, step.invariants.boundary)
            })?;
        }
    }
    Ok("V(-n-1) replays to [[-n-1]] with equal ledger ends and boundary L(n+1,1) throughout, n=2..30".into())
}

/// The state right after the rational blow-down of the `-n-1` replay.
fn after_rbd(n: i64) -> Result<HandleExpression, String> {
    let mut script = thm_a_script(n).unwrap();
    let cut = script
        .statements
        .iter()
        .position(|s| matches!(s.kind, StatementKind::Move(Move::Rbd { .. })))
        .ok_or("no rbd in script")?;
    script.statements.truncate(cut + 1);
    Ok(execute(&script).map_err(|e| format!("n={n}: {e}"))?.expression)
}

fn criterion_5() -> Check {
    for n in 2..=30i64 {
        let state = after_rbd(n)?;
        let chain: Vec<String> = (1..n).map(|i| format!("c{i}")).collect();
        // Oracle: V(-n-1) blown up n-1 times at isolated points.
        let mut oracle = from_plumbing(&build_linear(&[-n - 1]).unwrap());
        for _ in 1..n {
            oracle = oracle.blow_up(None).unwrap();
        }
        let oi = oracle.invariants();
        let sp = format!("e{}", n - 1);
        for couplings in [vec![(sp.clone(), (n - 1) as usize, 1)], vec![]] {
            let up = state
                .rational_blow_up(&format!("B{n}"), n, Some(&chain), &couplings)
                .map_err(|e| format!("n={n}: rbu rejected: {e}"))?;
            let inv = up.invariants();
            ensure((inv.euler, inv.sigma, inv.b2) == (n + 1, -n, n), || {
                format!("n={n}: (euler, sigma, b2) = ({}, {}, {})", inv.euler, inv.sigma, inv.b2)
            })?;
            ensure((inv.euler, inv.sigma, inv.b2) == (oi.euler, oi.sigma, oi.b2), || {
                format!("n={n}: oracle mismatch")
            })?;
            ensure(up.pieces().is_empty(), || format!("n={n}: piece left after rbu"))?;
        }
        // With the coupling the blow-ups can be undone down to V(-n-1).
        let mut up =
            state.rational_blow_up(&format!("B{n}"), n, Some(&chain), &[(sp.clone(), (n - 1) as usize, 1)]).unwrap();
        up = up.remove_cancelling_pair("h", "z").map_err(|e| format!("n={n}: {e}"))?;
        up = up.blow_down(&sp).map_err(|e| format!("n={n}: {e}"))?;
        for i in (2..n).rev() {
            up = up.blow_down(&format!("c{i}")).map_err(|e| format!("n={n}: {e}"))?;
        }
        let form = up.form();
        ensure(form.dim() == 1 && *form.entry(0, 0) == ratio(-n - 1, 1), || format!("n={n}: blown down to {form:?}"))?;
    }
    Ok("rbu after rbd gives (euler, sigma, b2) = (n+1, -n, n), blows down to V(-n-1), n=2..30".into())
}

fn criterion_6() -> Check {
    for n in 4..=30i64 {
        let run = execute(&thm_b_script(n).unwrap()).map_err(|e| format!("n={n}: {e}"))?;
        let e = &run.expression;
        let last = run.ledger.last().unwrap();
        if n % 2 == 1 {
            ensure(e.form().dim() == 1 && *e.form().entry(0, 0) == ratio(-4, 1) && e.pieces().is_empty(), || {
                format!("n={n}: odd case did not return to [[-4]]")
            })?;
        } else {
            ensure(e.piece_multiset() == vec!["B_2".to_string()], || {
                format!("n={n}: pieces {:?}", e.piece_multiset())
            })?;
            ensure(e.form().dim() == 1 && *e.form().entry(0, 0) == ratio(-1, 1), || {
                format!("n={n}: not one -1 handle")
            })?;
            ensure((last.euler, last.sigma, last.b2) == (2, -1, 1) && last.torsion == Torsion::Known(vec![2]), || {
                format!("n={n}: ledger end {:?}", last)
            })?;
        }
    }
    Ok("odd n=5..29 returns to [[-4]]; even n=4..30 ends at B_2 + (-1) with (2, -1, 1, Z/2)".into())
}

fn criterion_7() -> Check {
    let verdict = |case: SimpleCase, n: i64| -> Result<rbdcalc::scriptdsl::DiagramReport, String> {
        let (start, up, down) = simple_case(case, n).map_err(|e| e.to_string())?;
        check_simple_diagram(&start, &up, &down, n).map_err(|e| format!("{} n={n}: {e}", case.name()))
    };
    for n in 2..=30 {
        let r = verdict(SimpleCase::Sphere, n)?;
        ensure(r.simple, || format!("v n={n}: {:?}", r.mismatches))?;
    }
    for n in (3..=29).step_by(2) {
        let r = verdict(SimpleCase::MinusFour, n)?;
        ensure(r.simple, || format!("v4 n={n}: {:?}", r.mismatches))?;
    }
    for n in 2..=10 {
        for m in 1..=3 {
            let r = verdict(SimpleCase::Elliptic { m }, n)?;
            ensure(!r.simple, || format!("em n={n} m={m} reported simple"))?;
            let explicit = r.mismatches.iter().any(|x| {
                x.key == "pieces" && x.start.contains(&format!("B_{n}")) && x.start.contains(&format!("E({m})"))
            });
            ensure(explicit, || format!("em n={n} m={m}: no opaque-piece mismatch in {:?}", r.mismatches))?;
        }
    }
    Ok("v simple n=2..30, v4 simple odd n=3..29, E(m)_n not simple (piece mismatch) n=2..10, m=1..3".into())
}

fn criterion_8() -> Check {
    let mut rng = seeded(8);
    let mut applied = 0;
    let mut by_kind = [0usize; 3];
    while applied < 1000 {
        let mut e = random_expression(&mut rng, 8);
        for _ in 0..10 {
            let before = e.invariants();
            let total = e.one_handles().len() + e.two_handles().len();
            let labels = e.two_handle_labels();
            let removable: Vec<(String, String)> = e
                .one_handles()
                .iter()
                .enumerate()
                .flat_map(|(oi, one)| {
                    e.two_handles().iter().filter_map(move |h| {
                        let only =
                            h.winding.iter().enumerate().all(|(j, &w)| if j == oi { w.abs() == 1 } else { w == 0 });
                        only.then(|| (one.clone(), h.label.clone()))
                    })
                })
                .collect();
            let choice = rng.gen_range(0..3);
            let (kind, next) = match choice {
                0 if labels.len() >= 2 => {
                    let i = rng.gen_range(0..labels.len());
                    let mut j = rng.gen_range(0..labels.len() - 1);
                    if j >= i {
                        j += 1;
                    }
                    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
                    (0, e.slide(&labels[i], &labels[j], sign))
                }
                1 if total + 2 <= 8 => {
                    let mut links: Vec<(String, i64)> = Vec::new();
                    for l in &labels {
                        if rng.gen_bool(0.5) {
                            links.push((l.clone(), rng.gen_range(-3..=3)));
                        }
                    }
                    (1, e.add_cancelling_pair(None, None, &links))
                }
                _ => match removable.get(rng.gen_range(0..removable.len().max(1))) {
                    Some((one, two)) => match e.remove_cancelling_pair(one, two) {
                        Ok(x) => (2, Ok(x)),
                        // Another handle still runs over the 1-handle: a legal rejection.
                        Err(_) => continue,
                    },
                    None => continue,
                },
            };
            let next = next.map_err(|err| format!("move {kind} rejected on a legal input: {err}"))?;
            let after = next.invariants();
            ensure(before.move_tuple() == after.move_tuple(), || {
                format!("move {kind} changed invariants: {:?} -> {:?}", before.move_tuple(), after.move_tuple())
            })?;
            by_kind[kind] += 1;
            applied += 1;
            e = next;
        }
    }

    let mut pairs = 0;
    while pairs < 1000 {
        let e = random_expression(&mut rng, 7);
        let labels = e.two_handle_labels();
        let v = &labels[rng.gen_range(0..labels.len())];
        let up = match rng.gen_range(0..3) {
            0 => e.blow_up(Some("bu")),
            1 => e.blow_up_vertex(v, rng.gen_range(1..=2), Some("bu")),
            _ => {
                let w = &labels[rng.gen_range(0..labels.len())];
                match e.blow_up_edge(v, w, Some("bu")) {
                    Ok(x) => Ok(x),
                    Err(_) => continue,
                }
            }
        }
        .map_err(|err| format!("blow-up rejected: {err}"))?;
        let down = up.blow_down("bu").map_err(|err| format!("blow-down rejected: {err}"))?;
        ensure(down.form() == e.form() && down.two_handles() == e.two_handles(), || {
            "blow-up/down not identity".into()
        })?;
        ensure(down.invariants() == e.invariants(), || "blow-up/down changed invariants".into())?;
        pairs += 1;
    }

    for k in 0..200 {
        let dim = 1 + k % 5;
        let rows = random_symmetric(&mut rng, dim, 9);
        let form = SymmetricForm::unlabeled(&rows).unwrap();
        let inertia = form.inertia();
        let oracle = sturm_inertia(&to_rational(&rows));
        ensure((inertia.positive, inertia.negative, inertia.zero) == oracle, || {
            format!("inertia {inertia:?} vs Sturm {oracle:?} on {rows:?}")
        })?;
    }
    Ok(format!(
        "{applied} slide/pair moves ({} slides, {} adds, {} removes) keep the tuple; {pairs} blow-up/down pairs are identity; 200 inertias match Sturm",
        by_kind[0], by_kind[1], by_kind[2]
    ))
}

fn criterion_9() -> Check {
    let mut rng = seeded(9);
    let mut checked = 0;
    while checked < 500 {
        let dim = rng.gen_range(2..=6);
        let rows = random_symmetric(&mut rng, dim, 9);
        let block: Vec<usize> = (0..dim).filter(|_| rng.gen_bool(0.5)).collect();
        if block.is_empty() || block.len() == dim {
            continue;
        }
        let sub: Vec<Vec<i64>> = block.iter().map(|&i| block.iter().map(|&j| rows[i][j]).collect()).collect();
        let det_block = bareiss_det(&sub);
        if det_block.is_zero() {
            continue;
        }
        let form = SymmetricForm::unlabeled(&rows).unwrap();
        let schur = form.schur_complement(&block).map_err(|e| e.to_string())?;
        let det_full = BigRational::from_integer(bareiss_det(&rows));
        let product = BigRational::from_integer(det_block) * schur.determinant();
        ensure(det_full == product, || format!("det {det_full} != det(B) det(S) = {product} on {rows:?} / {block:?}"))?;
        let sig_block = form.restrict(&block).signature();
        ensure(form.signature() == sig_block + schur.signature(), || {
            format!("signature not additive on {rows:?} / {block:?}")
        })?;
        checked += 1;
    }
    Ok(format!("{checked} random forms: det(F) = det(B) det(S), sigma(F) = sigma(B) + sigma(S)"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        (1, Some(1.0), criterion_1),
        (2, Some(5.0), criterion_2),
        (3, Some(1.0), criterion_3),
        (4, Some(30.0), criterion_4),
        (5, None, criterion_5),
        (6, Some(60.0), criterion_6),
        (7, None, criterion_7),
        (8, Some(60.0), criterion_8),
        (9, Some(10.0), criterion_9),
    ];
    let mut failed = 0;
    for (k, budget, check) in criteria {
        let start = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        let (ok, detail) = match result {
            Ok(d) => match budget {
                Some(b) if secs > b => (false, format!("{d}; over the {b}s budget")),
                _ => (true, d),
            },
            Err(d) => (false, d),
        };
        if !ok {
            failed += 1;
        }
        let budget = budget.map_or("no budget".to_string(), |b| format!("budget {b}s"));
        println!("criterion {k}: {} — {detail} ({secs:.2}s, {budget})", if ok { "PASS" } else { "FAIL" });
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
