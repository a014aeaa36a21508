//! The bounded-error machine for ℤ: exact analysis and sampled runs.
//!
//! cargo run --release --example z_machine

use qcfa::dfr::{build_named_dfr, DfrSpec};
use qcfa::machine::{analyze_acceptance, assemble_poly_machine, run_montecarlo, McConfig};

fn main() {
    let mut f = build_named_dfr(&DfrSpec::ZAlgebraic).expect("ℤ family");
    f.certify(200).expect("certify");
    println!("τ = {}", f.tau);
    let m = assemble_poly_machine(&f, 0.125).expect("assemble");
    println!("{} classical states, {} unitaries", m.states.len(), m.unitaries.len());
    for s in ["a", "a,-a", "a,a,-a", "-a,a,a,-a"] {
        let w = m.group.parse_word(s).unwrap();
        let a = analyze_acceptance(&m, &w).unwrap();
        let st = run_montecarlo(&m, &w, &McConfig { trials: 2000, seed: 1, ..McConfig::default() }).unwrap();
        println!(
            "{s:>10}: Pr[accept] = {} ({:.6}), E[steps] = {:.1}; sampled {:.4}, mean steps {:.1}",
            a.overall_accept,
            a.overall_accept_f64(),
            a.expected_steps,
            st.accept_freq,
            st.mean_steps
        );
    }
}
