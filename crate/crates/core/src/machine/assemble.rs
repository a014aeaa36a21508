//! Assembly of round-structured machines from DFRs.
//!
//! Tape layout of one loop iteration, starting in `RESET_0` on `#_L` with register `|q₁⟩`:
//! every round walks right to `#_R` (`n+1` steps), prepares `|ψ⟩` there, sweeps left
//! applying one unitary per symbol, applies the final `t` on `#_L` and measures
//! `{B₀, B₁ = {q₁}}`. Result 0 rejects. After the last round the coin runs from cell 1;
//! coin failure returns to `RESET_0` on `#_L` with the register back at `|q₁⟩`.

use crate::dfr::Dfr;
use crate::error::{Error, Result};
use crate::group::{Gen, GroupFamily, Presentation};
use crate::linalg::{coin_matrix, dft_matrix, permutation_matrix, transfer_unitary, Matrix, Partition, StateVector};
use crate::machine::{
    Action, Coin, CoinSource, MachineBuilder, MachineKind, QcfaMachine, RoundSpec, RoundStructure, Structure, Sweep,
    LEFT_END, RIGHT_END,
};
use crate::scalar::{Scalar, DEFAULT_PRECISION, Q};

/// Walk count and fair-flip count for a `C₁ n^{−C₂}` lower bound.
pub fn poly_coin_params(c1: f64, c2: f64, eps: f64, d: usize) -> (usize, usize) {
    let m = (c2.ceil() as usize).max(1);
    let y = (d as f64 / (eps * c1)).log2().ceil().max(0.0) as usize;
    (m, y)
}

/// Bias `p = 1/⌈C²⌉` and fair-flip count for a `C^{−n}` lower bound.
pub fn exp_coin_params(base: f64, eps: f64, d: usize) -> (Q, usize) {
    let den = (base * base).ceil().max(1.0) as i64;
    let y = (4.0 * (d as f64).powi(4) / eps).log2().ceil().max(0.0) as usize;
    (Q::frac(1, den), y)
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Invalid(format!("ε must lie in (0,1), got {eps}")));
    }
    Ok(())
}

fn check_certified(f: &Dfr) -> Result<()> {
    if f.certified.is_none() {
        return Err(Error::Certification(format!("DFR {} has not been certified", f.name)));
    }
    if f.d() < 2 {
        return Err(Error::Invalid("machines need d ≥ 2".into()));
    }
    Ok(())
}

/// Unitaries shared by all rounds, before they are placed into a machine.
struct Pool(Vec<Matrix>);

impl Pool {
    fn add(&mut self, m: Matrix) -> usize {
        if let Some(i) = self.0.iter().position(|u| *u == m) {
            return i;
        }
        self.0.push(m);
        self.0.len() - 1
    }
}

fn rep_unitaries(pool: &mut Pool, f: &Dfr, j: usize) -> Vec<usize> {
    let r = &f.reps[j];
    (0..f.group().alphabet_size()).map(|c| pool.add(r.image(Gen::from_code(c)).clone())).collect()
}

fn dft_round(pool: &mut Pool, f: &Dfr, j: usize, syms: Vec<usize>) -> Result<RoundSpec> {
    let d = f.d();
    let prep = transfer_unitary(&StateVector::basis(d, 0), &StateVector::uniform(d))?;
    Ok(RoundSpec { rep: j, prep: pool.add(prep), symbol_unitaries: syms, final_t: pool.add(dft_matrix(d)?) })
}

/// `ℳ[(ρ_j,|1⟩,F),(ρ_j,|q₁⟩,P₁),…,(ρ_j,|q_d⟩,P_d)]`.
fn multipass_rounds(pool: &mut Pool, f: &Dfr, j: usize) -> Result<Vec<RoundSpec>> {
    let d = f.d();
    let syms = rep_unitaries(pool, f, j);
    let mut out = vec![dft_round(pool, f, j, syms.clone())?];
    for v in 1..=d {
        let prep = transfer_unitary(&StateVector::basis(d, 0), &StateVector::basis(d, v - 1))?;
        out.push(RoundSpec {
            rep: j,
            prep: pool.add(prep),
            symbol_unitaries: syms.clone(),
            final_t: pool.add(permutation_matrix(d, v)?),
        });
    }
    Ok(out)
}

pub fn assemble_poly_machine(f: &Dfr, eps: f64) -> Result<QcfaMachine> {
    check_eps(eps)?;
    check_certified(f)?;
    if !f.diagonal {
        return Err(Error::Invalid("the polynomial-time assembly needs a diagonal DFR".into()));
    }
    let (c1, c2) = f
        .tau
        .as_poly()
        .ok_or_else(|| Error::Invalid(format!("τ model {} has no polynomial lower bound", f.tau)))?;
    let (m, y) = poly_coin_params(c1, c2, eps, f.d());
    let mut pool = Pool(Vec::new());
    let mut rounds = Vec::new();
    for j in 0..f.k() {
        let syms = rep_unitaries(&mut pool, f, j);
        rounds.push(dft_round(&mut pool, f, j, syms)?);
    }
    emit(Emit {
        d: f.d(),
        group: f.group().clone(),
        pool: pool.0,
        structure: RoundStructure {
            kind: MachineKind::Poly,
            rounds,
            sweep: Sweep::Direct,
            coin: Coin::Walk { m, y },
            coin_source: Some(CoinSource::Poly { c1, c2, eps, d: f.d() }),
            restart_on_coin_failure: true,
            eps: Some(eps),
        },
    })
}

pub fn assemble_exp_machine(f: &Dfr, eps: f64) -> Result<QcfaMachine> {
    check_eps(eps)?;
    check_certified(f)?;
    let base = f
        .tau
        .as_exp()
        .ok_or_else(|| Error::Invalid(format!("τ model {} has no exponential lower bound", f.tau)))?;
    let (p, y) = exp_coin_params(base, eps, f.d());
    let mut pool = Pool(Vec::new());
    let mut rounds = Vec::new();
    for j in 0..f.k() {
        rounds.extend(multipass_rounds(&mut pool, f, j)?);
    }
    emit(Emit {
        d: f.d(),
        group: f.group().clone(),
        pool: pool.0,
        structure: RoundStructure {
            kind: MachineKind::Exp,
            rounds,
            sweep: Sweep::Direct,
            coin: Coin::Bias { p, y },
            coin_source: Some(CoinSource::Exp { base, eps, d: f.d() }),
            restart_on_coin_failure: true,
            eps: Some(eps),
        },
    })
}

pub fn assemble_unbounded_machine(f: &Dfr) -> Result<QcfaMachine> {
    check_certified(f)?;
    let mut pool = Pool(Vec::new());
    let mut rounds = Vec::new();
    for j in 0..f.k() {
        rounds.extend(multipass_rounds(&mut pool, f, j)?);
    }
    emit(Emit {
        d: f.d(),
        group: f.group().clone(),
        pool: pool.0,
        structure: RoundStructure {
            kind: MachineKind::Unbounded,
            rounds,
            sweep: Sweep::Direct,
            coin: Coin::None,
            coin_source: None,
            restart_on_coin_failure: true,
            eps: None,
        },
    })
}

/// A stand-alone coin subroutine: starts on `#_L`, accepts iff the coin yields 1.
pub fn coin_machine(d: usize, group: Presentation, coin: Coin) -> Result<QcfaMachine> {
    if d < 2 {
        return Err(Error::Invalid("coin subroutines need d ≥ 2".into()));
    }
    if let Coin::Bias { p, .. } = &coin {
        if p.signum() < 0 || *p > Q::one() {
            return Err(Error::Invalid(format!("bias {p} outside [0,1]")));
        }
    }
    emit(Emit {
        d,
        group,
        pool: Vec::new(),
        structure: RoundStructure {
            kind: MachineKind::CoinFragment,
            rounds: Vec::new(),
            sweep: Sweep::Direct,
            coin,
            coin_source: None,
            restart_on_coin_failure: false,
            eps: None,
        },
    })
}

/// Simulate a round-structured machine for `H` on words over a finite-index overgroup `G`.
pub fn transform_overgroup(mh: &QcfaMachine, overgroup: &Presentation) -> Result<QcfaMachine> {
    let rs = mh
        .round_structure()
        .ok_or_else(|| Error::AnalysisUnavailable("the overgroup transform needs a round-structured machine".into()))?;
    if rs.sweep != Sweep::Direct || rs.kind == MachineKind::CoinFragment {
        return Err(Error::Unsupported("machine is already transformed or is a coin fragment".into()));
    }
    let (base, table) = match &overgroup.family {
        GroupFamily::VirtualOvergroup(b, t) => (b.as_ref(), t),
        _ => return Err(Error::CosetTable("target presentation is not a virtual overgroup".into())),
    };
    if base.family != mh.group.family {
        return Err(Error::CosetTable("coset table base differs from the machine's group".into()));
    }
    table.validate(base)?;
    let stretch = table.max_beta_len().max(1) as f64;
    let (coin, coin_source) = match (&rs.coin, &rs.coin_source) {
        (Coin::Walk { .. }, Some(CoinSource::Poly { c1, c2, eps, d })) => {
            let c1s = c1 * stretch.powf(-c2);
            let (m, y) = poly_coin_params(c1s, *c2, *eps, *d);
            (Coin::Walk { m, y }, Some(CoinSource::Poly { c1: c1s, c2: *c2, eps: *eps, d: *d }))
        }
        (Coin::Bias { .. }, Some(CoinSource::Exp { base, eps, d })) => {
            let bs = base.powf(stretch);
            let (p, y) = exp_coin_params(bs, *eps, *d);
            (Coin::Bias { p, y }, Some(CoinSource::Exp { base: bs, eps: *eps, d: *d }))
        }
        (c, s) => (c.clone(), s.clone()),
    };
    emit(Emit {
        d: mh.d,
        group: overgroup.clone(),
        pool: mh.unitaries.clone(),
        structure: RoundStructure {
            kind: rs.kind,
            rounds: rs.rounds.clone(),
            sweep: Sweep::Coset(table.clone()),
            coin,
            coin_source,
            restart_on_coin_failure: rs.restart_on_coin_failure,
            eps: rs.eps,
        },
    })
}

struct Emit {
    d: usize,
    group: Presentation,
    pool: Vec<Matrix>,
    structure: RoundStructure,
}

fn emit(e: Emit) -> Result<QcfaMachine> {
    let d = e.d;
    let mut b = MachineBuilder::new(d, e.group.clone());
    let (acc, rej) = (0usize, 1usize);
    let id = 0usize;
    let remap: Vec<usize> = e.pool.iter().map(|m| b.unitary(m.clone())).collect();
    let mut st = e.structure;
    for r in &mut st.rounds {
        r.prep = remap[r.prep];
        r.final_t = remap[r.final_t];
        for u in &mut r.symbol_unitaries {
            *u = remap[*u];
        }
    }
    let meas = b.partition(Partition::new(d, vec![(1..d).collect(), vec![0]])?);
    let k = b.unitary(coin_matrix(d));
    let p2 = b.unitary(permutation_matrix(d, 2)?);
    let kp2 = b.unitary(coin_matrix(d).mul(&permutation_matrix(d, 2)?)?);
    let nr = st.rounds.len();
    let g_codes = e.group.alphabet_size();

    let restart = if nr > 0 && st.restart_on_coin_failure { b.state("RESET_0") } else { rej };
    let start = if nr > 0 { b.state("RESET_0") } else { b.state("GO") };

    // coin entry, reached with a +1 move from the last measurement (or from GO)
    let coin_entry: (usize, i8) = match &st.coin {
        Coin::None => (acc, 0),
        Coin::Walk { .. } => (b.state("W1_1"), 1),
        Coin::Bias { .. } => (b.state("BP"), 1),
    };
    if nr == 0 {
        b.set_unitary(start, LEFT_END, id, coin_entry.0, coin_entry.1);
    }

    for (ri, r) in st.rounds.iter().enumerate() {
        let reset = b.state(&format!("RESET_{ri}"));
        let m_state = b.state(&format!("MEAS_{ri}"));
        b.set_inner(reset, id, reset, 1);
        b.set_unitary(reset, LEFT_END, id, reset, 1);
        let next = if ri + 1 < nr { (b.state(&format!("RESET_{}", ri + 1)), 0) } else { coin_entry };
        b.set(m_state, LEFT_END, Action::Measure { partition: meas, branches: vec![(rej, 0), next] });
        match &st.sweep {
            Sweep::Direct => {
                let sweep = b.state(&format!("SWEEP_{ri}"));
                b.set_unitary(reset, RIGHT_END, r.prep, sweep, -1);
                for c in 0..g_codes {
                    b.set_unitary(sweep, 2 + c, r.symbol_unitaries[c], sweep, -1);
                }
                b.set_unitary(sweep, LEFT_END, r.final_t, m_state, 0);
            }
            Sweep::Coset(t) => {
                let sw: Vec<usize> = (0..t.index).map(|c| b.state(&format!("SWEEP_{ri}_{c}"))).collect();
                b.set_unitary(reset, RIGHT_END, r.prep, sw[0], -1);
                let maxlen = t.max_beta_len();
                let feed = |b: &mut MachineBuilder, c: usize, pos: usize| b.state(&format!("FEED_{ri}_{c}_{pos}"));
                for c in 0..t.index {
                    for code in 0..g_codes {
                        let s = Gen::from_code(code);
                        let word = t.beta_hat(s, c);
                        let after = sw[t.alpha(s, c)];
                        let len = word.len();
                        // H-letters are fed right to left, one per step, without moving
                        for pos in 0..len.max(1) {
                            let state = if pos == 0 { sw[c] } else { feed(&mut b, c, pos) };
                            let u = if len == 0 { id } else { r.symbol_unitaries[word.0[len - 1 - pos].code()] };
                            if pos + 1 >= len {
                                b.set_unitary(state, 2 + code, u, after, -1);
                            } else {
                                let nxt = feed(&mut b, c, pos + 1);
                                b.set_unitary(state, 2 + code, u, nxt, 0);
                            }
                        }
                    }
                    if c == 0 {
                        b.set_unitary(sw[0], LEFT_END, r.final_t, m_state, 0);
                    } else {
                        b.set_unitary(sw[c], LEFT_END, id, rej, 0);
                    }
                }
                let _ = maxlen;
            }
        }
    }

    // failure path shared by walks, coins and the bias scan: FIX undoes |q₂⟩, BACK returns to #_L
    let needs_back = !matches!(st.coin, Coin::None);
    if needs_back {
        let fix = b.state("FIX");
        let back = b.state("BACK");
        b.set_inner(fix, p2, back, -1);
        b.set_unitary(fix, RIGHT_END, p2, back, -1);
        b.set_inner(back, id, back, -1);
        b.set_unitary(back, LEFT_END, id, restart, 0);
    }
    let y = st.coin.y();
    let coins_entry = |b: &mut MachineBuilder| if y >= 1 { Some(b.state("CF_1")) } else { None };
    match &st.coin {
        Coin::None => {}
        Coin::Walk { m, .. } => {
            let m = *m;
            for i in 1..=m {
                let w1 = b.state(&format!("W{i}_1"));
                let w0 = b.state(&format!("W{i}_0"));
                let f = b.state(&format!("F{i}"));
                b.set_inner(w1, k, f, 0);
                b.set_inner(w0, kp2, f, 0);
                for s in 2..b.symbols() {
                    b.set(f, s, Action::Measure { partition: meas, branches: vec![(w0, -1), (w1, 1)] });
                }
                b.set_unitary(w0, LEFT_END, p2, restart, 0);
                if i < m {
                    let ret = b.state(&format!("RET{}", i + 1));
                    let wn = b.state(&format!("W{}_1", i + 1));
                    b.set_unitary(w1, RIGHT_END, id, ret, -1);
                    b.set_inner(ret, id, ret, -1);
                    b.set_unitary(ret, LEFT_END, id, wn, 1);
                } else {
                    match coins_entry(&mut b) {
                        Some(cf) => b.set_unitary(w1, RIGHT_END, k, cf, 0),
                        None => b.set_unitary(w1, RIGHT_END, id, acc, 0),
                    }
                }
            }
        }
        Coin::Bias { p, .. } => {
            let bp = b.state("BP");
            let bm = b.state("BM");
            let fix = b.state("FIX");
            let sp = Scalar::sqrt_rational(p, DEFAULT_PRECISION);
            let sq = Scalar::sqrt_rational(&Q::one().sub(p), DEFAULT_PRECISION);
            let mut amps = vec![Scalar::zero(); d];
            amps[0] = sp;
            amps[1] = sq;
            let tp = b.unitary(transfer_unitary(&StateVector::basis(d, 0), &StateVector::from_amplitudes(amps))?);
            b.set_inner(bp, tp, bm, 0);
            for s in 2..b.symbols() {
                b.set(bm, s, Action::Measure { partition: meas, branches: vec![(fix, 0), (bp, 1)] });
            }
            match coins_entry(&mut b) {
                Some(cf) => b.set_unitary(bp, RIGHT_END, k, cf, 0),
                None => b.set_unitary(bp, RIGHT_END, id, acc, 0),
            }
        }
    }
    if y >= 1 {
        let fix = b.state("FIX");
        for l in 1..=y {
            let cf = b.state(&format!("CF_{l}"));
            let next = if l < y {
                let coin = b.state(&format!("COIN_{}", l + 1));
                let cf2 = b.state(&format!("CF_{}", l + 1));
                b.set_unitary(coin, RIGHT_END, k, cf2, 0);
                (coin, 0)
            } else {
                (acc, 0)
            };
            b.set(cf, RIGHT_END, Action::Measure { partition: meas, branches: vec![(fix, 0), next] });
        }
    }
    b.finish(start, Structure::Rounds(st))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfr::{build_named_dfr, DfrSpec};

    #[test]
    fn coin_params() {
        assert_eq!(poly_coin_params(0.1, 0.9, 0.125, 2), (1, 8));
        assert_eq!(poly_coin_params(10.0, 2.0, 0.5, 2), (2, 0));
        let (p, y) = exp_coin_params(2.5, 0.25, 2);
        assert_eq!(p, Q::frac(1, 7));
        assert_eq!(y, 8);
    }

    #[test]
    fn poly_machine_validates() {
        let mut f = build_named_dfr(&DfrSpec::ZAlgebraic).unwrap();
        f.certify(20).unwrap();
        let m = assemble_poly_machine(&f, 0.125).unwrap();
        assert!(m.is_exact());
        assert_eq!(m.d, 2);
        assert!(assemble_poly_machine(&f, 1.5).is_err());
    }

    #[test]
    fn uncertified_rejected() {
        let f = build_named_dfr(&DfrSpec::F2).unwrap();
        assert!(matches!(assemble_exp_machine(&f, 0.25), Err(Error::Certification(_))));
    }
}
