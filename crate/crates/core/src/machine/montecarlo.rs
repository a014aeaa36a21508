//! Sampled execution on a double-precision copy of a machine.
//!
//! Trial `t` draws from `ChaCha8Rng::seed_from_u64(seed)` on stream `t`, and all
//! aggregation is over integers, so results do not depend on thread scheduling.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::Word;
use crate::machine::{tape, Action, QcfaMachine};

pub const DEFAULT_STEP_LIMIT: u64 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub trials: u64,
    pub seed: u64,
    pub step_limit: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig { trials: 1000, seed: 0, step_limit: DEFAULT_STEP_LIMIT }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Accept,
    Reject,
    StepLimit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceStats {
    pub trials: u64,
    pub accepts: u64,
    pub rejects: u64,
    pub step_limits: u64,
    pub accept_freq: f64,
    pub reject_freq: f64,
    /// Over halted trials.
    pub mean_steps: f64,
    pub std_steps: f64,
    /// 95% Wilson interval for the acceptance frequency among halted trials.
    pub accept_ci: (f64, f64),
}

impl AcceptanceStats {
    /// Acceptance frequency among trials that halted.
    pub fn halted_accept_freq(&self) -> f64 {
        let h = self.accepts + self.rejects;
        if h == 0 {
            0.0
        } else {
            self.accepts as f64 / h as f64
        }
    }

    /// Standard error of the acceptance frequency among halted trials.
    pub fn accept_sigma(&self) -> f64 {
        let h = (self.accepts + self.rejects) as f64;
        if h == 0.0 {
            return 0.0;
        }
        let p = self.accepts as f64 / h;
        (p * (1.0 - p) / h).sqrt()
    }
}

#[derive(Clone, Debug)]
pub struct RunRecord {
    pub verdict: Verdict,
    pub steps: u64,
    /// `(step, state, result)` for each measurement, when requested.
    pub transcript: Vec<(u64, usize, usize)>,
}

enum FastAction {
    Halt,
    Unitary { u: usize, next: usize, mv: i8 },
    Measure { p: usize, branches: Vec<(usize, i8)> },
}

/// Row-major `f64` copies of the unitaries; `None` marks the identity.
struct Fast {
    d: usize,
    symbols: usize,
    unitaries: Vec<Option<Vec<Complex64>>>,
    /// `block[p][q]` is the result index of basis state `q`.
    blocks: Vec<Vec<usize>>,
    nblocks: Vec<usize>,
    delta: Vec<FastAction>,
    start: usize,
    accept: usize,
}

impl Fast {
    fn new(m: &QcfaMachine) -> Fast {
        let tol = crate::scalar::Tolerance::default();
        let unitaries = m
            .unitaries
            .iter()
            .map(|u| {
                if u.is_identity(&tol) {
                    None
                } else {
                    Some(u.to_f64().into_iter().map(|(re, im)| Complex64::new(re, im)).collect())
                }
            })
            .collect();
        let blocks = m.partitions.iter().map(|p| (0..m.d).map(|q| p.block_of(q)).collect()).collect();
        let nblocks = m.partitions.iter().map(|p| p.blocks.len()).collect();
        let delta = m
            .delta
            .iter()
            .map(|a| match a {
                None => FastAction::Halt,
                Some(Action::Unitary { unitary, next, mv }) => FastAction::Unitary { u: *unitary, next: *next, mv: *mv },
                Some(Action::Measure { partition, branches }) => {
                    FastAction::Measure { p: *partition, branches: branches.clone() }
                }
            })
            .collect();
        Fast { d: m.d, symbols: m.symbols(), unitaries, blocks, nblocks, delta, start: m.start, accept: m.accept }
    }

    fn run(&self, tape: &[usize], rng: &mut ChaCha8Rng, limit: u64, record: bool) -> RunRecord {
        let d = self.d;
        let mut psi = vec![Complex64::new(0.0, 0.0); d];
        psi[0] = Complex64::new(1.0, 0.0);
        let mut tmp = psi.clone();
        let mut probs = vec![0.0; d];
        let (mut state, mut head, mut steps) = (self.start, 0usize, 0u64);
        let mut transcript = Vec::new();
        loop {
            let act = &self.delta[state * self.symbols + tape[head]];
            let (next, mv) = match act {
                FastAction::Halt => {
                    let verdict = if state == self.accept { Verdict::Accept } else { Verdict::Reject };
                    return RunRecord { verdict, steps, transcript };
                }
                _ if steps >= limit => return RunRecord { verdict: Verdict::StepLimit, steps, transcript },
                FastAction::Unitary { u, next, mv } => {
                    if let Some(m) = &self.unitaries[*u] {
                        for (r, t) in tmp.iter_mut().enumerate() {
                            let row = &m[r * d..(r + 1) * d];
                            *t = row.iter().zip(&psi).map(|(a, x)| a * x).sum();
                        }
                        std::mem::swap(&mut psi, &mut tmp);
                    }
                    (*next, *mv)
                }
                FastAction::Measure { p, branches } => {
                    let blk = &self.blocks[*p];
                    probs[..self.nblocks[*p]].iter_mut().for_each(|x| *x = 0.0);
                    for (q, a) in psi.iter().enumerate() {
                        probs[blk[q]] += a.norm_sqr();
                    }
                    let total: f64 = probs[..self.nblocks[*p]].iter().sum();
                    let u: f64 = rng.gen::<f64>() * total;
                    let mut acc = 0.0;
                    let mut res = self.nblocks[*p] - 1;
                    for (i, pr) in probs[..self.nblocks[*p]].iter().enumerate() {
                        acc += pr;
                        if u < acc && *pr > 0.0 {
                            res = i;
                            break;
                        }
                    }
                    let scale = 1.0 / probs[res].sqrt();
                    for (q, a) in psi.iter_mut().enumerate() {
                        *a = if blk[q] == res { *a * scale } else { Complex64::new(0.0, 0.0) };
                    }
                    if record {
                        transcript.push((steps, state, res));
                    }
                    branches[res]
                }
            };
            steps += 1;
            state = next;
            head = (head as i64 + mv as i64) as usize;
        }
    }
}

fn check(m: &QcfaMachine, w: &Word, step_limit: u64) -> Result<()> {
    if step_limit == 0 {
        return Err(Error::Invalid("step_limit must be positive".into()));
    }
    m.group.check_word(w)
}

/// A single sampled run.
pub fn run_once(m: &QcfaMachine, w: &Word, seed: u64, step_limit: u64, record: bool) -> Result<RunRecord> {
    check(m, w, step_limit)?;
    let fast = Fast::new(m);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(fast.run(&tape(w), &mut rng, step_limit, record))
}

pub fn run_montecarlo(m: &QcfaMachine, w: &Word, cfg: &McConfig) -> Result<AcceptanceStats> {
    check(m, w, cfg.step_limit)?;
    let fast = Fast::new(m);
    let t = tape(w);
    let zero = || (0u64, 0u64, 0u64, 0u128, 0u128);
    let (acc, rej, lim, s1, s2) = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(trial);
            let r = fast.run(&t, &mut rng, cfg.step_limit, false);
            let s = r.steps as u128;
            match r.verdict {
                Verdict::Accept => (1, 0, 0, s, s * s),
                Verdict::Reject => (0, 1, 0, s, s * s),
                Verdict::StepLimit => (0, 0, 1, 0, 0),
            }
        })
        .reduce(zero, |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2, a.3 + b.3, a.4 + b.4));
    let n = cfg.trials.max(1) as f64;
    let halted = (acc + rej) as f64;
    let (mean, std) = if halted > 0.0 {
        let mean = s1 as f64 / halted;
        let var = (s2 as f64 / halted - mean * mean).max(0.0);
        (mean, var.sqrt())
    } else {
        (0.0, 0.0)
    };
    Ok(AcceptanceStats {
        trials: cfg.trials,
        accepts: acc,
        rejects: rej,
        step_limits: lim,
        accept_freq: acc as f64 / n,
        reject_freq: rej as f64 / n,
        mean_steps: mean,
        std_steps: std,
        accept_ci: wilson(acc, acc + rej),
    })
}

fn wilson(k: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.96f64;
    let (k, n) = (k as f64, n as f64);
    let p = k / n;
    let den = 1.0 + z * z / n;
    let c = (p + z * z / (2.0 * n)) / den;
    let h = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / den;
    ((c - h).max(0.0), (c + h).min(1.0))
}
