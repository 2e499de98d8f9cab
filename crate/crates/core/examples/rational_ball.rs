//! The rational balls `B_n`: one 1-handle, one 2-handle winding `n` times.
//!
//! `cargo run --example rational_ball`

use rbdcalc::handlecalc::{bn_expression, OpaquePiece};

fn main() {
    println!("{:>3}  {:>3} {:>3} {:>8} {:>6} {:>6}  {:>9}  spin", "n", "b1", "b2", "H1", "euler", "sigma", "boundary");
    for n in 2..=8 {
        let b = bn_expression(n).unwrap();
        let (b1, b2, torsion) = b.homology();
        let (euler, sigma) = b.euler_sigma();
        let piece = OpaquePiece::rational_ball("B", n, false).unwrap();
        println!(
            "{n:>3}  {b1:>3} {b2:>3} {:>8} {euler:>6} {sigma:>6}  {:>9}  {}",
            torsion.to_string(),
            b.boundary_claim().unwrap().to_string(),
            piece.spin.unwrap()
        );
    }
}
