//! Exact symmetric forms: inertia, Schur complements and Smith normal form.
//!
//! `cargo run --example lattice_forms`

use rbdcalc::lattice::{IntegerMatrix, SymmetricForm};
use rbdcalc::numbers::format_rational;

fn main() {
    let f = SymmetricForm::unlabeled(&[vec![-5, 1, 0], vec![1, -2, 1], vec![0, 1, 3]]).unwrap();
    println!("inertia {:?}  det {}", f.inertia(), format_rational(&f.determinant()));

    let s = f.schur_complement(&[0, 1]).unwrap();
    println!("Schur complement over the first two: {}", format_rational(s.entry(0, 0)));
    let b = f.restrict(&[0, 1]);
    println!(
        "det(F) = det(B) det(S): {} = {} * {}",
        format_rational(&f.determinant()),
        format_rational(&b.determinant()),
        format_rational(&s.determinant())
    );

    let m = IntegerMatrix::from_i64(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]).unwrap();
    let snf: Vec<String> = m.smith_normal_form().iter().map(ToString::to_string).collect();
    println!("Smith normal form diagonal: [{}]", snf.join(", "));
}
