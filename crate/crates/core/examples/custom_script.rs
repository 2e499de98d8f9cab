//! Parses and runs a hand-written move script, printing the JSON ledger.
//!
//! `cargo run --example custom_script [path.rbd]`

use rbdcalc::scriptdsl::{execute, parse_script};

const BUILTIN: &str = include_str!("scripts/minus_four.rbd");

fn main() {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path).expect("readable script"),
        None => BUILTIN.to_string(),
    };
    let script = parse_script(&text).unwrap_or_else(|e| panic!("{e}"));
    match execute(&script) {
        Ok(run) => println!("{}", run.ledger.to_json()),
        Err(e) => {
            eprintln!("{e}");
            if let Some(ledger) = e.ledger() {
                println!("{}", ledger.to_json());
            }
            std::process::exit(1);
        }
    }
}
