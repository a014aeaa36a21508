//! Measure-once one-way automaton running the Hadamard test on the combined representation.
//!
//! Register `ℂ² ⊗ ℂ^D ⊗ ℂ^D` with basis index `c·D² + s·D + r`. The control starts in
//! `|+⟩`, the data in the maximally entangled `|Φ⟩ = D^{−1/2} Σ|ii⟩`. Each letter applies
//! `π(σ)ᵀ ⊗ I` controlled on `c = 1`; a final Hadamard on the control and the accept
//! block `c = 0` give `Pr[accept] = (1 + Re χ_π(w)/D)/2`.

use crate::dfr::{dfr_combine, Dfr};
use crate::error::Result;
use crate::group::Gen;
use crate::linalg::{coin_matrix, transfer_unitary, Matrix, Partition, StateVector};
use crate::machine::{Action, MachineBuilder, OneWayStructure, QcfaMachine, Structure, LEFT_END, RIGHT_END};
use crate::scalar::{Scalar, Q, DEFAULT_PRECISION};

pub fn build_mo1qfa(f: &Dfr) -> Result<QcfaMachine> {
    let pi = dfr_combine(f)?;
    let rep = &pi.reps[0];
    let dd = rep.dim;
    let block = dd * dd;
    let dim = 2 * block;
    let mut amps = vec![Scalar::zero(); dim];
    // |+⟩|Φ⟩ has amplitude 1/√(2D) on c·D² + i·D + i
    let a = Scalar::sqrt_rational(&Q::frac(1, 2 * dd as i64), DEFAULT_PRECISION);
    for c in 0..2 {
        for i in 0..dd {
            amps[c * block + i * dd + i] = a.clone();
        }
    }
    let prep = transfer_unitary(&StateVector::basis(dim, 0), &StateVector::from_amplitudes(amps))?;
    let id_block = Matrix::identity(block);
    let mut b = MachineBuilder::new(dim, f.group().clone());
    let scan = b.state("SCAN");
    let meas = b.state("MEAS");
    let start = b.state("START");
    let prep_i = b.unitary(prep);
    let mut syms = Vec::new();
    for code in 0..f.group().alphabet_size() {
        let u = rep.image(Gen::from_code(code)).transpose().kron(&Matrix::identity(dd));
        let i = b.unitary(id_block.direct_sum(&u));
        syms.push(i);
        b.set_unitary(scan, 2 + code, i, scan, 1);
    }
    let h = b.unitary(coin_matrix(2).kron(&id_block));
    let part = b.partition(Partition::new(dim, vec![(0..block).collect(), (block..dim).collect()])?);
    b.set_unitary(start, LEFT_END, prep_i, scan, 1);
    b.set_unitary(scan, RIGHT_END, h, meas, 0);
    b.set(meas, RIGHT_END, Action::Measure { partition: part, branches: vec![(0, 0), (1, 0)] });
    b.finish(start, Structure::OneWay(OneWayStructure { rep_dim: dd, prep: prep_i, symbol_unitaries: syms, final_h: h }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfr::{build_named_dfr, DfrSpec};
    use crate::machine::analyze_acceptance;

    #[test]
    fn hadamard_test_formula() {
        let f = build_named_dfr(&DfrSpec::ZAlgebraic).unwrap();
        let m = build_mo1qfa(&f).unwrap();
        let g = f.group().clone();
        for s in ["", "a", "a,a", "a,-a", "-a,-a,-a"] {
            let w = g.parse_word(s).unwrap();
            let chi = f.reps[0].character(&w).unwrap();
            let want = (1.0 + chi.re().to_f64() / 2.0) / 2.0;
            let got = analyze_acceptance(&m, &w).unwrap();
            assert!((got.p_acc_f64() - want).abs() < 1e-12, "{s}: {} vs {want}", got.p_acc_f64());
            assert!((got.p_halt.to_f64() - 1.0).abs() < 1e-12);
        }
    }
}
