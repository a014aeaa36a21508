//! Monte Carlo against the exact per-iteration analysis on the reconciliation corpus.
//!
//! cargo run --release --example reconcile [trials]

use qcfa::machine::{analyze_acceptance, run_montecarlo, McConfig};
use qcfa::verify::{reconciliation_corpus, Fixtures, Sizes};

fn main() {
    let trials = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2000);
    let fx = Fixtures::new(Sizes::full());
    let corpus = reconciliation_corpus(&fx).expect("corpus");
    let cfg = McConfig { trials, seed: 7, ..McConfig::default() };
    println!(
        "{:<14} {:<16} {:>10} {:>10} {:>7} {:>12} {:>12}",
        "machine", "word", "analytic", "sampled", "z", "E[steps]", "mean steps"
    );
    for (name, m, w) in &corpus {
        let a = analyze_acceptance(m, w).expect("analysis");
        let s = run_montecarlo(m, w, &cfg).expect("run");
        let p = a.overall_accept_f64();
        let sd = (p * (1.0 - p) / trials as f64).sqrt();
        let z = if sd > 0.0 { (s.halted_accept_freq() - p) / sd } else { 0.0 };
        println!(
            "{:<14} {:<16} {:>10.6} {:>10.6} {:>7.2} {:>12.1} {:>12.1}",
            name,
            format!("\"{}\"", m.group.format_word(w)),
            p,
            s.halted_accept_freq(),
            z,
            a.expected_steps,
            s.mean_steps
        );
    }
}
