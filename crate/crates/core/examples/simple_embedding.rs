//! The two-path check for embedded rational balls: rational blow-up then
//! blow-downs, against blow-ups then a rational blow-down.
//!
//! `cargo run --example simple_embedding`

use rbdcalc::scriptdsl::{check_simple_diagram, simple_case, SimpleCase};

fn main() {
    let cases = [(SimpleCase::Sphere, 4), (SimpleCase::MinusFour, 5), (SimpleCase::Elliptic { m: 1 }, 3)];
    for (case, n) in cases {
        let (start, up, down) = simple_case(case, n).unwrap();
        let report = check_simple_diagram(&start, &up, &down, n).unwrap();
        println!("{} n={n}: {}", case.name(), if report.simple { "simple" } else { "not simple" });
        for m in &report.mismatches {
            println!("  {} path, {}: start {} end {}", m.path, m.key, m.start, m.end);
        }
    }

    let (_, up, _) = simple_case(SimpleCase::Sphere, 3).unwrap();
    println!("\nup path for the sphere case, n = 3:\n{up}");
}
