//! Unbounded-error recognition: the ℤ * ℤ² family and the one-way machine for F₂.
//!
//! cargo run --release --example unbounded

use qcfa::dfr::{build_named_dfr, DfrSpec};
use qcfa::machine::{analyze_acceptance, assemble_unbounded_machine, build_mo1qfa};

fn main() {
    let mut f = build_named_dfr(&DfrSpec::ShalenZFreeZr { r: 2, alpha_radicand: 2 }).unwrap();
    f.certify(4).unwrap();
    let m = assemble_unbounded_machine(&f).unwrap();
    for s in ["y,x1,-y,-x1", "x1,x2,-x1,-x2", "y,-y", "y,y,x2"] {
        let w = m.group.parse_word(s).unwrap();
        let a = analyze_acceptance(&m, &w).unwrap();
        println!("Z*Z^2 {s:>14}: Pr[reject] = {:.6e}", a.overall_reject_f64());
    }

    let m = build_mo1qfa(&build_named_dfr(&DfrSpec::F2).unwrap()).unwrap();
    for s in ["a,b,-a,-b", "a,-a,b,-b", "b,b,a"] {
        let w = m.group.parse_word(s).unwrap();
        let a = analyze_acceptance(&m, &w).unwrap();
        println!("MO-1QFA {s:>12}: Pr[accept] = {} ({:.6})", a.overall_accept, a.overall_accept_f64());
    }
}
