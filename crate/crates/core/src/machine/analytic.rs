//! Exact per-iteration analysis of round-structured and one-way machines.
//!
//! One loop iteration has a finite measurement tree: each round either passes or rejects,
//! and the coin subroutines have closed-form success probabilities and step counts.
//! Amplitudes are never renormalized, so on the exact backend every probability is an
//! element of the field and `p_rej = 0` is decided exactly.

use crate::error::{Error, Result};
use crate::group::{Gen, Word};
use crate::machine::{Coin, OneWayStructure, QcfaMachine, RoundStructure, Structure, Sweep};
use crate::scalar::{Scalar, Q};

#[derive(Clone, Debug)]
pub struct RoundAnalysis {
    pub p_acc: Scalar,
    pub p_rej: Scalar,
    pub p_halt: Scalar,
    /// `p_acc / p_halt`, exact when the machine is.
    pub overall_accept: Scalar,
    pub overall_reject: Scalar,
    /// Probability of passing each measurement round, in order.
    pub round_pass: Vec<Scalar>,
    pub steps_per_iteration: f64,
    pub expected_iterations: f64,
    pub expected_steps: f64,
}

impl RoundAnalysis {
    fn from_parts(p_acc: Scalar, p_rej: Scalar, round_pass: Vec<Scalar>, steps_per_iteration: f64) -> RoundAnalysis {
        let p_halt = p_acc.add(&p_rej);
        let (overall_accept, overall_reject) = if p_halt.is_exact_zero() {
            (Scalar::zero(), Scalar::zero())
        } else {
            let a = p_acc.div(&p_halt);
            let r = Scalar::one().sub(&a);
            (a, r)
        };
        let h = p_halt.to_f64();
        let expected_iterations = if h > 0.0 { 1.0 / h } else { f64::INFINITY };
        RoundAnalysis {
            p_acc,
            p_rej,
            p_halt,
            overall_accept,
            overall_reject,
            round_pass,
            steps_per_iteration,
            expected_iterations,
            expected_steps: steps_per_iteration * expected_iterations,
        }
    }

    pub fn p_acc_f64(&self) -> f64 {
        self.p_acc.to_f64()
    }

    pub fn p_rej_f64(&self) -> f64 {
        self.p_rej.to_f64()
    }

    pub fn overall_accept_f64(&self) -> f64 {
        self.overall_accept.to_f64()
    }

    pub fn overall_reject_f64(&self) -> f64 {
        self.overall_reject.to_f64()
    }
}

/// Register contents after sweeping a suffix of the input.
#[derive(Clone, Debug)]
pub struct SweepState {
    pub coset: usize,
    pub vecs: Vec<Vec<Scalar>>,
    pub n: usize,
    /// Steps spent in the sweep of one round (per cell `max(1, |β̂|)` under a coset table).
    pub sweep_cost: usize,
}

enum Kind<'a> {
    Rounds(&'a RoundStructure),
    OneWay(&'a OneWayStructure),
}

pub struct Analyzer<'a> {
    m: &'a QcfaMachine,
    kind: Kind<'a>,
}

/// Coin success probability and expected step count, starting from the +1 move out of
/// the last measurement on an input of length `n`.
pub fn coin_closed_form(coin: &Coin, n: usize) -> (Q, f64) {
    let nf = n as f64;
    let chain = |y: usize| -> f64 {
        if y == 0 {
            1.0
        } else {
            (1..=y).map(|l| 0.5f64.powi(l as i32 - 1) * (2.0 + (nf + 2.0) / 2.0)).sum()
        }
    };
    match coin {
        Coin::None => (Q::one(), 0.0),
        Coin::Walk { m, y } => {
            let s = Q::frac(1, n as i64 + 1);
            let sf = s.to_f64();
            let mut cost = 0.0;
            for i in 1..=*m {
                let c = if i < *m { nf + 2.0 } else { chain(*y) };
                cost += sf.powi(i as i32 - 1) * (2.0 * nf + (1.0 - sf) + sf * c);
            }
            let prob = s.pow(*m as u32).mul(&Q::frac(1, 1).div(&Q::int(2).pow(*y as u32)));
            (prob, cost)
        }
        Coin::Bias { p, y } => {
            let pf = p.to_f64();
            let mut cost = 0.0;
            for x in 1..=n {
                cost += pf.powi(x as i32 - 1) * (2.0 + (1.0 - pf) * (x as f64 + 1.0));
            }
            cost += pf.powi(n as i32) * chain(*y);
            let prob = p.pow(n as u32).div(&Q::int(2).pow(*y as u32));
            (prob, cost)
        }
    }
}

impl<'a> Analyzer<'a> {
    pub fn new(m: &'a QcfaMachine) -> Result<Analyzer<'a>> {
        let kind = match &m.structure {
            Structure::Rounds(r) => Kind::Rounds(r),
            Structure::OneWay(o) => Kind::OneWay(o),
            Structure::None => {
                return Err(Error::AnalysisUnavailable("machine carries no round structure".into()));
            }
        };
        Ok(Analyzer { m, kind })
    }

    fn column0(&self, u: usize) -> Vec<Scalar> {
        let m = &self.m.unitaries[u];
        (0..m.dim()).map(|r| m.get(r, 0).clone()).collect()
    }

    /// One-way machines extend words on the right, round machines on the left.
    pub fn reads_left_to_right(&self) -> bool {
        matches!(self.kind, Kind::OneWay(_))
    }

    pub fn start(&self) -> SweepState {
        let vecs = match &self.kind {
            Kind::Rounds(r) => r.rounds.iter().map(|rd| self.column0(rd.prep)).collect(),
            Kind::OneWay(o) => vec![self.column0(o.prep)],
        };
        SweepState { coset: 0, vecs, n: 0, sweep_cost: 0 }
    }

    /// Prepend `g` to the suffix already swept. For a one-way machine the word is read
    /// left to right, so this appends instead.
    pub fn push_left(&self, st: &mut SweepState, g: Gen) {
        st.n += 1;
        match &self.kind {
            Kind::Rounds(r) => match &r.sweep {
                Sweep::Direct => {
                    st.sweep_cost += 1;
                    for (v, rd) in st.vecs.iter_mut().zip(&r.rounds) {
                        *v = self.m.unitaries[rd.symbol_unitaries[g.code()]].apply_raw(v);
                    }
                }
                Sweep::Coset(t) => {
                    let b = t.beta_hat(g, st.coset);
                    st.sweep_cost += b.len().max(1);
                    for (v, rd) in st.vecs.iter_mut().zip(&r.rounds) {
                        for h in b.0.iter().rev() {
                            *v = self.m.unitaries[rd.symbol_unitaries[h.code()]].apply_raw(v);
                        }
                    }
                    st.coset = t.alpha(g, st.coset);
                }
            },
            Kind::OneWay(o) => {
                st.sweep_cost += 1;
                let v = &mut st.vecs[0];
                *v = self.m.unitaries[o.symbol_unitaries[g.code()]].apply_raw(v);
            }
        }
    }

    pub fn finish(&self, st: &SweepState) -> RoundAnalysis {
        match &self.kind {
            Kind::Rounds(r) => self.finish_rounds(r, st),
            Kind::OneWay(o) => {
                let v = self.m.unitaries[o.final_h].apply_raw(&st.vecs[0]);
                let block = o.rep_dim * o.rep_dim;
                let acc = v[..block].iter().fold(Scalar::zero(), |a, x| a.add(&x.abs2()));
                let rej = v[block..].iter().fold(Scalar::zero(), |a, x| a.add(&x.abs2()));
                RoundAnalysis::from_parts(acc, rej, Vec::new(), st.n as f64 + 3.0)
            }
        }
    }

    fn finish_rounds(&self, r: &RoundStructure, st: &SweepState) -> RoundAnalysis {
        let n = st.n as f64;
        let nr = r.rounds.len();
        if nr == 0 {
            // coin fragment: one step on #_L, then the coin
            let (prob, cost) = coin_closed_form(&r.coin, st.n);
            let acc = Scalar::rational(prob);
            let rej = Scalar::one().sub(&acc);
            return RoundAnalysis::from_parts(acc, rej, Vec::new(), 1.0 + cost);
        }
        if st.coset != 0 {
            // the first sweep ends outside H and rejects on #_L
            let steps = n + 3.0 + st.sweep_cost as f64;
            return RoundAnalysis::from_parts(Scalar::zero(), Scalar::one(), vec![Scalar::zero()], steps);
        }
        let round_cost = n + 4.0 + st.sweep_cost as f64;
        let mut reach = Scalar::one();
        let mut steps = 0.0;
        let mut pass = Vec::with_capacity(nr);
        for (v, rd) in st.vecs.iter().zip(&r.rounds) {
            steps += reach.to_f64() * round_cost;
            let t = &self.m.unitaries[rd.final_t];
            let mut amp = Scalar::zero();
            for (c, x) in v.iter().enumerate() {
                let a = t.get(0, c);
                if !a.is_exact_zero() && !x.is_exact_zero() {
                    amp = amp.add(&a.mul(x));
                }
            }
            let p = amp.abs2();
            reach = reach.mul(&p);
            pass.push(p);
        }
        let (prob, cost) = coin_closed_form(&r.coin, st.n);
        steps += reach.to_f64() * cost;
        let coin_p = Scalar::rational(prob);
        let p_acc = reach.mul(&coin_p);
        let mut p_rej = Scalar::one().sub(&reach);
        if !r.restart_on_coin_failure {
            p_rej = p_rej.add(&reach.sub(&p_acc));
        }
        RoundAnalysis::from_parts(p_acc, p_rej, pass, steps)
    }

    pub fn analyze(&self, w: &Word) -> Result<RoundAnalysis> {
        self.m.group.check_word(w)?;
        let mut st = self.start();
        match &self.kind {
            Kind::OneWay(_) => w.0.iter().for_each(|&g| self.push_left(&mut st, g)),
            Kind::Rounds(_) => w.0.iter().rev().for_each(|&g| self.push_left(&mut st, g)),
        }
        Ok(self.finish(&st))
    }
}

pub fn analyze_acceptance(m: &QcfaMachine, w: &Word) -> Result<RoundAnalysis> {
    Analyzer::new(m)?.analyze(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn walk_closed_form_small() {
        // n = 0: each walk succeeds immediately, cost 1 on #_R
        let (p, c) = coin_closed_form(&Coin::Walk { m: 1, y: 0 }, 0);
        assert_eq!(p, Q::one());
        assert!((c - 1.0).abs() < 1e-12);
        let (p, _) = coin_closed_form(&Coin::Walk { m: 2, y: 3 }, 4);
        assert_eq!(p, Q::frac(1, 25 * 8));
    }

    #[test]
    fn bias_closed_form_small() {
        let (p, _) = coin_closed_form(&Coin::Bias { p: Q::frac(1, 4), y: 1 }, 2);
        assert_eq!(p, Q::frac(1, 32));
    }
}
