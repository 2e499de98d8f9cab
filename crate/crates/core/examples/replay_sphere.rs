//! Replays the `-(n+1)` sphere neighbourhood: blow up into `C_n`, rationally
//! blow down, open the ball and slide back to a single handle.
//!
//! `cargo run --example replay_sphere -- 5`

use rbdcalc::scriptdsl::{execute, thm_a_script};

fn main() {
    let n: i64 = std::env::args().nth(1).map_or(4, |a| a.parse().expect("n must be an integer"));
    let script = thm_a_script(n).unwrap();
    println!("{script}");
    let run = execute(&script).unwrap_or_else(|e| panic!("{e}"));
    print!("{}", run.ledger.to_text());
    println!("start == end: {}", run.ledger.first() == run.ledger.last());
}
