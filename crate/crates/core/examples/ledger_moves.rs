//! Driving the move engine directly: rational blow-down of a chain with a
//! neighbour, rational blow-up back, and a hand-kept ledger.
//!
//! `cargo run --example ledger_moves`

use rbdcalc::handlecalc::{from_plumbing, Ledger};
use rbdcalc::plumbing::build_linear;

fn main() {
    // -3 sphere attached to the end of C_4 = (-6, -2, -2).
    let start = from_plumbing(&build_linear(&[-6, -2, -2, -3]).unwrap());
    let mut ledger = Ledger::default();
    ledger.record("start", vec!["(-6,-2,-2,-3)".into()], &start);

    let chain: Vec<String> = ["s1", "s2", "s3"].map(String::from).to_vec();
    let down = start.rational_blow_down(&chain, 4, Some("P")).unwrap();
    ledger.record("rbd", vec![chain.join(","), "n=4".into()], &down);
    println!("after rbd: s4 framing {} (rational), pieces {:?}", down.framing("s4").unwrap(), down.piece_multiset());

    let fresh: Vec<String> = ["c1", "c2", "c3"].map(String::from).to_vec();
    let up = down.rational_blow_up("P", 4, Some(&fresh), &[("s4".into(), 3, 1)]).unwrap();
    ledger.record("rbu", vec!["P".into(), "n=4".into(), "couple s4:3:1".into()], &up);

    print!("{}", ledger.to_text());
    println!(
        "round trip preserves the tuple: {}",
        ledger.first().unwrap().move_tuple() == ledger.last().unwrap().move_tuple()
    );
}
