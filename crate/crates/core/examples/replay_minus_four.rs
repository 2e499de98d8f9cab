//! Replays the `-4` sphere neighbourhood for a range of `n`. Odd `n` comes
//! back to the `-4` sphere; even `n` stops at `B_2` plus a `-1` handle.
//!
//! `cargo run --example replay_minus_four`

use rbdcalc::scriptdsl::{execute, thm_b_script};

fn main() {
    for n in 4..=11 {
        let run = execute(&thm_b_script(n).unwrap()).unwrap_or_else(|e| panic!("n={n}: {e}"));
        let end = run.ledger.last().unwrap();
        let form: Vec<String> =
            (0..run.expression.form().dim()).map(|i| run.expression.form().entry(i, i).to_string()).collect();
        println!(
            "n={n:>2}  moves={:>2}  end form [{}] pieces {:?}  (euler, sigma, b2, H1) = ({}, {}, {}, {})",
            run.ledger.steps.len() - 1,
            form.join(","),
            run.expression.piece_multiset(),
            end.euler,
            end.sigma,
            end.b2,
            end.torsion
        );
    }
}
