//! Build the F₂ family, scan trace gaps over a ball and calibrate τ.
//!
//! cargo run --release --example gap_scan [radius]

use qcfa::analysis::trace_gap_scan;
use qcfa::dfr::{build_named_dfr, DfrSpec};

fn main() {
    let radius = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(6);
    let mut f = build_named_dfr(&DfrSpec::F2).expect("F2 family");
    for (i, m) in f.reps[0].images().iter().enumerate() {
        println!("ρ({}) =\n{m}", f.group().labels[i]);
    }
    let report = trace_gap_scan(&f, radius).expect("scan");
    println!("{} elements in B({radius})", report.elements);
    println!("   n   m(n)          witness");
    for n in 1..=radius {
        if let (Some(m), Some(w)) = (report.minima[n], &report.witnesses[n]) {
            println!("{n:>4}   {m:.6e}   {}", f.group().format_word(w));
        }
    }
    f.certify(radius).expect("certify");
    println!("calibrated τ: {}", f.tau);
}
