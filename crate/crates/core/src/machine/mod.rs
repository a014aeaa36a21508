//! Two-way finite automata with quantum and classical states: the machine model,
//! assemblers for the round-structured algorithms, the overgroup transform, the
//! measure-once one-way automaton, and the analytic and Monte Carlo engines.

pub mod analytic;
pub mod assemble;
pub mod montecarlo;
pub mod mo1qfa;

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::group::{CosetTable, Gen, Presentation, Word};
use crate::linalg::{Matrix, Partition};
use crate::scalar::{AmplitudeClass, Q};

pub use analytic::{analyze_acceptance, coin_closed_form, Analyzer, RoundAnalysis, SweepState};
pub use assemble::{
    assemble_exp_machine, assemble_poly_machine, assemble_unbounded_machine, coin_machine, transform_overgroup,
};
pub use mo1qfa::build_mo1qfa;
pub use montecarlo::{run_montecarlo, AcceptanceStats, McConfig, Verdict, DEFAULT_STEP_LIMIT};

pub const LEFT_END: usize = 0;
pub const RIGHT_END: usize = 1;

/// Tape symbol of a generator letter.
pub fn symbol_of(g: Gen) -> usize {
    2 + g.code()
}

/// `#_L w #_R` as tape symbols.
pub fn tape(w: &Word) -> Vec<usize> {
    let mut t = Vec::with_capacity(w.len() + 2);
    t.push(LEFT_END);
    t.extend(w.0.iter().map(|&g| symbol_of(g)));
    t.push(RIGHT_END);
    t
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Action {
    Unitary { unitary: usize, next: usize, mv: i8 },
    /// `branches[r]` for result block `r`.
    Measure { partition: usize, branches: Vec<(usize, i8)> },
}

/// One measurement round: prepare `𝒯_{|q₁⟩→|ψ⟩}`, sweep right to left applying the
/// per-symbol unitaries, apply `t`, measure `{B₀ = {q₂..q_d}, B₁ = {q₁}}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundSpec {
    pub rep: usize,
    pub prep: usize,
    /// Indexed by generator code of the swept alphabet (the subgroup's alphabet when
    /// the sweep goes through a coset table).
    pub symbol_unitaries: Vec<usize>,
    pub final_t: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Coin {
    None,
    /// `m` random walks then `y` fair flips.
    Walk { m: usize, y: usize },
    /// Per-symbol biased measurement with success `p`, then `y` fair flips.
    Bias { p: Q, y: usize },
}

impl std::fmt::Display for Coin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Coin::None => write!(f, "none"),
            Coin::Walk { m, y } => write!(f, "walk(m={m}, y={y})"),
            Coin::Bias { p, y } => write!(f, "bias(p={p}, y={y})"),
        }
    }
}

impl Coin {
    pub fn y(&self) -> usize {
        match self {
            Coin::None => 0,
            Coin::Walk { y, .. } | Coin::Bias { y, .. } => *y,
        }
    }
}

/// Where the coin parameters came from, so that the overgroup transform can rescale them.
#[derive(Clone, Debug, PartialEq)]
pub enum CoinSource {
    Poly { c1: f64, c2: f64, eps: f64, d: usize },
    Exp { base: f64, eps: f64, d: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Sweep {
    Direct,
    Coset(CosetTable),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoundStructure {
    pub kind: MachineKind,
    pub rounds: Vec<RoundSpec>,
    pub sweep: Sweep,
    pub coin: Coin,
    pub coin_source: Option<CoinSource>,
    /// Coin failure returns to the first round (assembled machines) or rejects (coin fragments).
    pub restart_on_coin_failure: bool,
    pub eps: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MachineKind {
    Poly,
    Exp,
    Unbounded,
    CoinFragment,
}

impl MachineKind {
    pub fn tag(&self) -> &'static str {
        match self {
            MachineKind::Poly => "poly",
            MachineKind::Exp => "exp",
            MachineKind::Unbounded => "unbounded",
            MachineKind::CoinFragment => "coin",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OneWayStructure {
    /// Dimension of the combined representation.
    pub rep_dim: usize,
    pub prep: usize,
    pub symbol_unitaries: Vec<usize>,
    pub final_h: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Structure {
    None,
    Rounds(RoundStructure),
    OneWay(OneWayStructure),
}

#[derive(Clone, Debug, PartialEq)]
pub struct QcfaMachine {
    pub d: usize,
    pub group: Presentation,
    pub states: Vec<String>,
    pub start: usize,
    pub accept: usize,
    pub reject: usize,
    pub unitaries: Vec<Matrix>,
    pub partitions: Vec<Partition>,
    /// `delta[state * symbols + symbol]`, `None` only for the halting states.
    pub delta: Vec<Option<Action>>,
    pub structure: Structure,
}

impl QcfaMachine {
    pub fn symbols(&self) -> usize {
        2 + self.group.alphabet_size()
    }

    pub fn kind_tag(&self) -> &'static str {
        match &self.structure {
            Structure::None => "unstructured",
            Structure::Rounds(r) => r.kind.tag(),
            Structure::OneWay(_) => "mo1qfa",
        }
    }

    pub fn action(&self, state: usize, symbol: usize) -> Option<&Action> {
        self.delta[state * self.symbols() + symbol].as_ref()
    }

    pub fn amplitude_class(&self) -> AmplitudeClass {
        let used: Vec<bool> = {
            let mut u = vec![false; self.unitaries.len()];
            for a in self.delta.iter().flatten() {
                if let Action::Unitary { unitary, .. } = a {
                    u[*unitary] = true;
                }
            }
            u
        };
        self.unitaries
            .iter()
            .zip(used)
            .filter(|(_, u)| *u)
            .fold(AmplitudeClass::AlgebraicExact, |c, (m, _)| c.join(m.class()))
    }

    pub fn is_exact(&self) -> bool {
        self.unitaries.iter().all(Matrix::is_exact)
    }

    pub fn round_structure(&self) -> Option<&RoundStructure> {
        match &self.structure {
            Structure::Rounds(r) => Some(r),
            _ => None,
        }
    }

    /// Checks totality of δ, dimensions, partition validity and state references.
    pub fn validate(&self) -> Result<()> {
        let s = self.symbols();
        if self.delta.len() != self.states.len() * s {
            return Err(Error::Invalid("δ table has the wrong size".into()));
        }
        if self.accept == self.reject {
            return Err(Error::Invalid("accept and reject states coincide".into()));
        }
        for m in &self.unitaries {
            if m.dim() != self.d {
                return Err(Error::Dimension(format!("unitary of dimension {} in a machine with d = {}", m.dim(), self.d)));
            }
        }
        for p in &self.partitions {
            if p.dim() != self.d {
                return Err(Error::Dimension("partition dimension differs from d".into()));
            }
        }
        let n = self.states.len();
        for c in 0..n {
            for g in 0..s {
                let a = &self.delta[c * s + g];
                let halting = c == self.accept || c == self.reject;
                match (a, halting) {
                    (None, false) => {
                        return Err(Error::Invalid(format!("δ undefined on ({}, {g})", self.states[c])));
                    }
                    (Some(Action::Unitary { unitary, next, .. }), _) => {
                        if *unitary >= self.unitaries.len() || *next >= n {
                            return Err(Error::Invalid(format!("dangling reference in δ({}, {g})", self.states[c])));
                        }
                    }
                    (Some(Action::Measure { partition, branches }), _) => {
                        if *partition >= self.partitions.len()
                            || branches.len() != self.partitions[*partition].blocks.len()
                            || branches.iter().any(|(c2, _)| *c2 >= n)
                        {
                            return Err(Error::Invalid(format!("bad measurement in δ({}, {g})", self.states[c])));
                        }
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }
}

/// Incremental construction of a machine with named states.
pub struct MachineBuilder {
    d: usize,
    group: Presentation,
    states: Vec<String>,
    index: HashMap<String, usize>,
    unitaries: Vec<Matrix>,
    partitions: Vec<Partition>,
    delta: HashMap<(usize, usize), Action>,
}

impl MachineBuilder {
    pub fn new(d: usize, group: Presentation) -> MachineBuilder {
        let mut b = MachineBuilder {
            d,
            group,
            states: Vec::new(),
            index: HashMap::new(),
            unitaries: Vec::new(),
            partitions: Vec::new(),
            delta: HashMap::new(),
        };
        b.state("acc");
        b.state("rej");
        b.unitary(Matrix::identity(d));
        b
    }

    pub fn symbols(&self) -> usize {
        2 + self.group.alphabet_size()
    }

    pub fn state(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        self.states.push(name.to_string());
        self.index.insert(name.to_string(), self.states.len() - 1);
        self.states.len() - 1
    }

    pub fn unitary(&mut self, m: Matrix) -> usize {
        if let Some(i) = self.unitaries.iter().position(|u| *u == m) {
            return i;
        }
        self.unitaries.push(m);
        self.unitaries.len() - 1
    }

    pub fn partition(&mut self, p: Partition) -> usize {
        if let Some(i) = self.partitions.iter().position(|u| *u == p) {
            return i;
        }
        self.partitions.push(p);
        self.partitions.len() - 1
    }

    pub fn set(&mut self, c: usize, symbol: usize, a: Action) {
        self.delta.insert((c, symbol), a);
    }

    pub fn set_unitary(&mut self, c: usize, symbol: usize, unitary: usize, next: usize, mv: i8) {
        self.set(c, symbol, Action::Unitary { unitary, next, mv });
    }

    /// Same unitary transition on every generator symbol.
    pub fn set_inner(&mut self, c: usize, unitary: usize, next: usize, mv: i8) {
        for s in 2..self.symbols() {
            self.set_unitary(c, s, unitary, next, mv);
        }
    }

    pub fn finish(self, start: usize, structure: Structure) -> Result<QcfaMachine> {
        let s = self.symbols();
        let n = self.states.len();
        let accept = 0;
        let reject = 1;
        let mut delta = vec![None; n * s];
        for c in 0..n {
            if c == accept || c == reject {
                continue;
            }
            for g in 0..s {
                // unreachable pairs still need a transition; they reject
                delta[c * s + g] =
                    Some(self.delta.get(&(c, g)).cloned().unwrap_or(Action::Unitary { unitary: 0, next: reject, mv: 0 }));
            }
        }
        let m = QcfaMachine {
            d: self.d,
            group: self.group,
            states: self.states,
            start,
            accept,
            reject,
            unitaries: self.unitaries,
            partitions: self.partitions,
            delta,
            structure,
        };
        m.validate()?;
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfr::{build_named_dfr, DfrSpec};
    use crate::machine::montecarlo::run_montecarlo;
    use crate::scalar::Scalar;

    fn z_machine() -> QcfaMachine {
        let mut f = build_named_dfr(&DfrSpec::ZAlgebraic).unwrap();
        f.certify(30).unwrap();
        assemble_poly_machine(&f, 0.125).unwrap()
    }

    #[test]
    fn z_machine_on_a() {
        let m = z_machine();
        let w = m.group.parse_word("a").unwrap();
        let r = analyze_acceptance(&m, &w).unwrap();
        assert!(r.p_rej.approx_eq(&Scalar::frac(1, 5), &Default::default()));
        assert!(r.p_rej.is_exact());
        assert!(r.overall_reject_f64() >= 7.0 / 8.0);
    }

    #[test]
    fn identity_words_never_reject() {
        let m = z_machine();
        for s in ["", "a,-a", "-a,-a,a,a"] {
            let w = m.group.parse_word(s).unwrap();
            let r = analyze_acceptance(&m, &w).unwrap();
            assert!(r.p_rej.is_exact_zero(), "{s}");
            assert!(r.overall_accept.is_exact_one());
        }
    }

    #[test]
    fn montecarlo_matches_analysis() {
        let m = z_machine();
        for s in ["a", "a,a", "-a,a"] {
            let w = m.group.parse_word(s).unwrap();
            let r = analyze_acceptance(&m, &w).unwrap();
            let cfg = McConfig { trials: 4000, seed: 7, step_limit: 1_000_000 };
            let st = run_montecarlo(&m, &w, &cfg).unwrap();
            assert_eq!(st.step_limits, 0);
            let p = r.overall_accept_f64();
            let sigma = (p * (1.0 - p) / cfg.trials as f64).sqrt().max(1e-3);
            assert!((st.accept_freq - p).abs() <= 3.0 * sigma, "{s}: {} vs {p}", st.accept_freq);
            let rel = (st.mean_steps - r.expected_steps).abs() / r.expected_steps;
            assert!(rel < 0.1, "{s}: steps {} vs {}", st.mean_steps, r.expected_steps);
            assert_eq!(st, run_montecarlo(&m, &w, &cfg).unwrap());
        }
    }

    #[test]
    fn dinf_overgroup_machine() {
        let mh = z_machine();
        let g = Presentation::dinf_over_z();
        let m = transform_overgroup(&mh, &g).unwrap();
        for (s, ident) in [("s,s", true), ("t,s,t,s", true), ("s", false), ("t", false), ("s,t", false)] {
            let w = g.parse_word(s).unwrap();
            assert_eq!(g.is_identity(&w).unwrap(), ident);
            let r = analyze_acceptance(&m, &w).unwrap();
            assert_eq!(r.p_rej.is_exact_zero(), ident, "{s}");
            let trials = if ident { 200 } else { 2000 };
            let cfg = McConfig { trials, seed: 1, step_limit: 100_000_000 };
            let st = run_montecarlo(&m, &w, &cfg).unwrap();
            assert_eq!(st.step_limits, 0);
            let p = r.overall_accept_f64();
            let sigma = (p * (1.0 - p) / cfg.trials as f64).sqrt().max(1e-3);
            assert!((st.halted_accept_freq() - p).abs() <= 3.0 * sigma, "{s}: {} vs {p}", st.accept_freq);
            let rel = (st.mean_steps - r.expected_steps).abs() / r.expected_steps;
            assert!(rel < 0.2, "{s}: steps {} vs {}", st.mean_steps, r.expected_steps);
        }
    }
}
