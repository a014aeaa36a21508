//! Records of ‖qα‖ and the fitted lower envelope.
//!
//! cargo run --release --example diophantine [q_max]

use qcfa::analysis::{diophantine_scan, sqrt_records_times_q, AlphaSpec};

fn main() {
    let q_max = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100_000);
    for alpha in [AlphaSpec::Sqrt { n: 2 }, AlphaSpec::AcosOverTwoPi { num: 3, den: 5 }] {
        let r = diophantine_scan(&alpha, q_max, 256).unwrap();
        println!("{} for q ≤ {q_max}: fit {:?}", alpha.describe(), r.fit);
        for (q, d) in r.records.iter().take(12) {
            println!("{q:>9}  {d:.6e}");
        }
        if let AlphaSpec::Sqrt { .. } = alpha {
            println!("q·‖q√2‖ on records: {:?}", sqrt_records_times_q(&r).iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>());
        }
    }
}
