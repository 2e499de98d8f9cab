//! Negative continued fractions and the lens spaces bounding linear plumbings.
//!
//! `cargo run --example lens_spaces`

use rbdcalc::numbers::{cf_eval, cf_expand, cn_fraction, format_rational, lens_equal, lens_normalize};
use rbdcalc::plumbing::{boundary_lens, build_linear};

fn main() {
    for (p, q) in [(9, 2), (16, 3), (25, 4), (7, 3)] {
        let cf = cf_expand(p, q).unwrap();
        let g = build_linear(&cf.0).unwrap();
        println!("-{p}/{q} = {cf}  bounds {}", boundary_lens(&g).unwrap());
    }

    println!();
    for n in 2..=6 {
        let cf = cn_fraction(n).unwrap();
        let value = cf_eval(&cf).unwrap();
        let lens = boundary_lens(&build_linear(&cf.0).unwrap()).unwrap();
        println!("C_{n} = {cf}  value {}  boundary {lens}", format_rational(&value));
    }

    // L(p, q) and L(p, q') agree when q q' = 1 mod p.
    let a = lens_normalize(7, 3).unwrap();
    let b = lens_normalize(7, 5).unwrap();
    println!("\n{a} == {b}: {}", lens_equal(&a, &b));
}
