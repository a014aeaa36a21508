//! Lift the ℤ machine to the infinite dihedral group through the coset table of ⟨t⟩.
//!
//! cargo run --release --example overgroup

use qcfa::dfr::{build_named_dfr, DfrSpec};
use qcfa::group::{GroupFamily, Presentation};
use qcfa::machine::{analyze_acceptance, assemble_poly_machine, transform_overgroup};

fn main() {
    let t = Presentation::with_labels(GroupFamily::FreeAbelian(1), vec!["t".into()]).unwrap();
    let mut f = build_named_dfr(&DfrSpec::ZAlgebraic).unwrap().relabel(t).unwrap();
    f.certify(50).unwrap();
    let base = assemble_poly_machine(&f, 0.125).unwrap();
    let m = transform_overgroup(&base, &Presentation::dinf_over_z()).unwrap();
    println!("base: {} states; lifted: {} states", base.states.len(), m.states.len());
    for s in ["s,s", "s,t,s,t", "s,t,s", "t,s", "s", "t,t,s,-t,-t,s"] {
        let w = m.group.parse_word(s).unwrap();
        let a = analyze_acceptance(&m, &w).unwrap();
        println!("{s:>14}: identity {:5}  Pr[accept] = {:.6}  E[steps] = {:.1}", m.group.is_identity(&w).unwrap(), a.overall_accept_f64(), a.expected_steps);
    }
}
