//! `E(m)_n`: blow up the fishtail fibre of `E(m)` until `C_n` appears, then
//! rationally blow it down. `E(m)` itself enters as opaque data.
//!
//! `cargo run --example elliptic -- 5 2`

use rbdcalc::scriptdsl::{em_blowup_count, em_script, execute};

fn main() {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<i64>().expect("integer argument"));
    let n = args.next().unwrap_or(4);
    let m = args.next().unwrap_or(1);
    println!("blow-ups needed for C_{n}: {}", em_blowup_count(n).unwrap());
    let run = execute(&em_script(n, m).unwrap()).unwrap_or_else(|e| panic!("{e}"));
    print!("{}", run.ledger.to_text());
    println!("pieces: {:?}", run.expression.piece_multiset());
}
