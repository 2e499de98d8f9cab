//! Plumbing graphs: blow-ups on vertices and edges, the linking matrix and
//! Graphviz output.
//!
//! `cargo run --example plumbing_dot > chain.dot`

use rbdcalc::numbers::format_rational;
use rbdcalc::plumbing::{blow_up_edge, blow_up_vertex, boundary_lens, build_linear, linking_matrix, to_dot};

fn main() {
    // -4 sphere blown up at a point, then at the new intersection: -6, -2, -1.
    let g = build_linear(&[-4]).unwrap();
    let g = blow_up_vertex(&g, "s1", Some("e1")).unwrap();
    let g = blow_up_edge(&g, "s1", "e1", Some("e2")).unwrap();

    let form = linking_matrix(&g);
    eprintln!("vertices: {:?}", g.vertices().iter().map(|v| (&v.id, v.framing)).collect::<Vec<_>>());
    eprintln!("det {}  signature {}", format_rational(&form.determinant()), form.signature());
    eprintln!("boundary {}", boundary_lens(&g).unwrap());
    print!("{}", to_dot(&g));
}
