//! Quantitative checks: nearest-integer distance scans, gap scans with envelope fits,
//! τ calibration, runtime profiles and Monte Carlo reconciliation.

use astro_float::BigFloat;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dfr::{calibrate, power_envelope, scan_gaps, Calibration, Dfr, TauModel, TauShape};
use crate::error::{Error, Result};
use crate::group::Word;
use crate::machine::{analyze_acceptance, run_montecarlo, McConfig, QcfaMachine};
use crate::scalar::float::{bf_acos, bf_add, bf_div, bf_floor, bf_mul, bf_pi, bf_sqrt, bf_sub, bf_to_f64};
use crate::scalar::{Tolerance, Q};

// ---------------------------------------------------------------------------
// nearest-integer distances

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlphaSpec {
    Rational { num: i64, den: i64 },
    /// `√n`
    Sqrt { n: u64 },
    /// `(1/2π)·cos⁻¹(num/den)`
    AcosOverTwoPi { num: i64, den: i64 },
}

impl AlphaSpec {
    pub fn describe(&self) -> String {
        match self {
            AlphaSpec::Rational { num, den } => format!("{num}/{den}"),
            AlphaSpec::Sqrt { n } => format!("sqrt({n})"),
            AlphaSpec::AcosOverTwoPi { num, den } => format!("acos({num}/{den})/(2pi)"),
        }
    }

    fn value(&self, p: usize) -> BigFloat {
        match self {
            AlphaSpec::Rational { num, den } => {
                bf_div(&BigFloat::from_i64(*num, p), &BigFloat::from_i64(*den, p), p)
            }
            AlphaSpec::Sqrt { n } => bf_sqrt(&BigFloat::from_u64(*n, p), p),
            AlphaSpec::AcosOverTwoPi { num, den } => {
                let x = bf_div(&BigFloat::from_i64(*num, p), &BigFloat::from_i64(*den, p), p);
                let two_pi = bf_mul(&bf_pi(p), &BigFloat::from_u64(2, p), p);
                bf_div(&bf_acos(&x, p), &two_pi, p)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiophantineReport {
    pub alpha: String,
    pub q_max: u64,
    /// Successive minima of `‖qα‖`: each entry beats every smaller `q`.
    pub records: Vec<(u64, f64)>,
    /// `(c, D)` with `‖qα‖ ≥ c·q^{−D}` on the whole scanned range.
    pub fit: Option<(f64, f64)>,
    /// False when some `‖qα‖` vanishes, i.e. α is rational with denominator ≤ `q_max`.
    pub irrational_on_range: bool,
}

impl DiophantineReport {
    pub fn min_distance(&self) -> f64 {
        self.records.last().map_or(f64::INFINITY, |r| r.1)
    }

    /// The fit is a lower envelope of every record, hence of every scanned `q`.
    pub fn fit_holds(&self) -> bool {
        match self.fit {
            None => true,
            Some((c, d)) => self.records.iter().all(|&(q, x)| c * (q as f64).powf(-d) <= x * (1.0 + 1e-9)),
        }
    }
}

fn dist_to_int(x: &BigFloat, p: usize) -> f64 {
    let f = bf_sub(x, &bf_floor(x), p);
    let v = bf_to_f64(&f);
    v.min(1.0 - v).max(0.0)
}

const CHUNK: u64 = 1 << 15;

fn chunk_records(alpha: &BigFloat, lo: u64, hi: u64, p: usize) -> Vec<(u64, f64)> {
    let mut x = bf_mul(alpha, &BigFloat::from_u64(lo, p), p);
    let mut out: Vec<(u64, f64)> = Vec::new();
    let mut best = f64::INFINITY;
    for q in lo..hi {
        let dq = dist_to_int(&x, p);
        if dq < best {
            best = dq;
            out.push((q, dq));
        }
        x = bf_add(&x, alpha, p);
    }
    out
}

/// `‖qα‖` for `1 ≤ q ≤ q_max` at `precision` bits. Chunks run in parallel and merge in order.
pub fn diophantine_scan(alpha: &AlphaSpec, q_max: u64, precision: usize) -> Result<DiophantineReport> {
    if q_max == 0 || q_max > 10_000_000 {
        return Err(Error::Invalid(format!("Q_max must lie in [1, 10^7], got {q_max}")));
    }
    let records: Vec<(u64, f64)> = if let AlphaSpec::Rational { num, den } = alpha {
        if *den == 0 {
            return Err(Error::Invalid("zero denominator".into()));
        }
        let den = den.unsigned_abs() as u128;
        let num = num.unsigned_abs() as u128 % den;
        let mut best = f64::INFINITY;
        let mut out = Vec::new();
        for q in 1..=q_max as u128 {
            let r = (q * num) % den;
            let dq = r.min(den - r) as f64 / den as f64;
            if dq < best {
                best = dq;
                out.push((q as u64, dq));
                if dq == 0.0 {
                    break;
                }
            }
        }
        out
    } else {
        let a = alpha.value(precision);
        let chunks: Vec<(u64, u64)> =
            (0..q_max.div_ceil(CHUNK)).map(|i| (1 + i * CHUNK, (1 + (i + 1) * CHUNK).min(q_max + 1))).collect();
        let parts: Vec<Vec<(u64, f64)>> = chunks.par_iter().map(|&(lo, hi)| chunk_records(&a, lo, hi, precision)).collect();
        let mut best = f64::INFINITY;
        let mut out = Vec::new();
        for (q, dq) in parts.into_iter().flatten() {
            if dq < best {
                best = dq;
                out.push((q, dq));
            }
        }
        let tol = Tolerance::for_precision(precision);
        if best < tol.eps_num * q_max as f64 {
            return Err(Error::Precision(format!(
                "‖qα‖ = {best:e} is below ε_num·Q_max at {precision} bits; raise the precision"
            )));
        }
        out
    };
    let irrational = records.last().is_none_or(|r| r.1 > 0.0);
    let fit = if irrational {
        power_envelope(&records.iter().map(|&(q, x)| (q as f64, x)).collect::<Vec<_>>())
    } else {
        None
    };
    Ok(DiophantineReport { alpha: alpha.describe(), q_max, records, fit, irrational_on_range: irrational })
}

/// Continued-fraction cross-check for `√n`: `q‖q√n‖` over the records.
pub fn sqrt_records_times_q(r: &DiophantineReport) -> Vec<f64> {
    r.records.iter().map(|&(q, x)| q as f64 * x).collect()
}

// ---------------------------------------------------------------------------
// gap scans

#[derive(Clone, Debug, PartialEq)]
pub struct GapScanReport {
    pub dfr: String,
    pub radius: usize,
    pub elements: usize,
    pub minima: Vec<Option<f64>>,
    pub witnesses: Vec<Option<Word>>,
    pub exp_base: Option<f64>,
    pub poly: Option<(f64, f64)>,
    /// Declared τ against the scan; `None` when τ is unbounded or pending.
    pub declared_ok: Option<bool>,
    /// Every witness re-evaluates to its reported minimum.
    pub witnesses_ok: bool,
    pub passed: bool,
}

pub fn trace_gap_scan(f: &Dfr, radius: usize) -> Result<GapScanReport> {
    let scan = scan_gaps(f, radius)?;
    let tol = Tolerance::default();
    let mut witnesses_ok = true;
    for (m, w) in scan.minima.iter().zip(&scan.witnesses) {
        if let (Some(m), Some(w)) = (m, w) {
            let g = f.gap(w)?;
            if (g - m).abs() > tol.eps_num.max(1e-12 * m.abs()) {
                witnesses_ok = false;
            }
        }
    }
    let positive = scan.minima.iter().flatten().all(|m| *m > 0.0);
    Ok(GapScanReport {
        dfr: f.name.clone(),
        radius,
        elements: scan.elements,
        passed: positive && witnesses_ok && scan.declared_ok != Some(false),
        minima: scan.minima,
        witnesses: scan.witnesses,
        exp_base: scan.exp_base,
        poly: scan.poly,
        declared_ok: scan.declared_ok,
        witnesses_ok,
    })
}

/// Largest lower envelope of the given shape under every scanned minimum, halved.
pub fn calibrate_tau(report: &GapScanReport, shape: TauShape) -> TauModel {
    let scan = crate::dfr::GapScan {
        radius: report.radius,
        elements: report.elements,
        minima: report.minima.clone(),
        witnesses: report.witnesses.clone(),
        exp_base: report.exp_base,
        poly: report.poly,
        declared_ok: report.declared_ok,
    };
    let c: Calibration = calibrate(&scan, shape);
    TauModel::Calibrated(c)
}

// ---------------------------------------------------------------------------
// runtime profiles

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuntimeFit {
    pub lengths: Vec<usize>,
    pub expected_steps: Vec<f64>,
    /// Least-squares slope of `ln steps` against `ln n`.
    pub poly_exponent: f64,
    pub poly_r2: f64,
    /// Least-squares slope of `ln steps` against `n`.
    pub exp_slope: f64,
    pub exp_r2: f64,
    /// True when the values came from Monte Carlo means instead of the analytic engine.
    pub noisy: bool,
}

/// Ordinary least squares `y ≈ a + b x`; returns `(a, b, R²)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let a = my - b * mx;
    let r2 = if syy > 0.0 { (sxy * sxy) / (sxx * syy) } else { 1.0 };
    (a, b, r2)
}

pub fn runtime_profile(m: &QcfaMachine, lengths: &[usize], word: impl Fn(usize) -> Word) -> Result<RuntimeFit> {
    if lengths.len() < 2 {
        return Err(Error::Invalid("a runtime fit needs at least two lengths".into()));
    }
    let mut steps = Vec::with_capacity(lengths.len());
    let mut noisy = false;
    for &n in lengths {
        let w = word(n);
        match analyze_acceptance(m, &w) {
            Ok(r) => steps.push(r.expected_steps),
            Err(Error::AnalysisUnavailable(_)) => {
                noisy = true;
                let cfg = McConfig { trials: 2000, seed: 0, ..McConfig::default() };
                steps.push(run_montecarlo(m, &w, &cfg)?.mean_steps);
            }
            Err(e) => return Err(e),
        }
    }
    let ln_y: Vec<f64> = steps.iter().map(|s| s.ln()).collect();
    let ln_n: Vec<f64> = lengths.iter().map(|&n| (n.max(1) as f64).ln()).collect();
    let nf: Vec<f64> = lengths.iter().map(|&n| n as f64).collect();
    let (_, pe, pr2) = linear_fit(&ln_n, &ln_y);
    let (_, es, er2) = linear_fit(&nf, &ln_y);
    Ok(RuntimeFit {
        lengths: lengths.to_vec(),
        expected_steps: steps,
        poly_exponent: pe,
        poly_r2: pr2,
        exp_slope: es,
        exp_r2: er2,
        noisy,
    })
}

/// `g^{n/2} g^{−n/2}` in the first generator; odd `n` rounds down.
pub fn identity_word(n: usize) -> Word {
    let h = Word::gen_power(0, (n / 2) as i64);
    h.concat(&h.inverse())
}

// ---------------------------------------------------------------------------
// reconciliation

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reconciliation {
    pub word: String,
    pub analytic_accept: f64,
    pub mc_accept: f64,
    pub z_accept: f64,
    pub analytic_steps: f64,
    pub mc_steps: f64,
    pub z_steps: f64,
    pub step_limits: u64,
    pub passed: bool,
}

fn z(diff: f64, sigma: f64) -> f64 {
    if sigma > 0.0 {
        diff / sigma
    } else if diff.abs() <= 1e-12 {
        0.0
    } else {
        f64::INFINITY
    }
}

pub fn mc_vs_analytic(m: &QcfaMachine, w: &Word, cfg: &McConfig) -> Result<Reconciliation> {
    let a = analyze_acceptance(m, w)?;
    let s = run_montecarlo(m, w, cfg)?;
    let halted = (s.accepts + s.rejects) as f64;
    let p = a.overall_accept_f64();
    let za = z(s.halted_accept_freq() - p, (p * (1.0 - p) / halted.max(1.0)).sqrt());
    let zs = z(s.mean_steps - a.expected_steps, s.std_steps / halted.max(1.0).sqrt());
    Ok(Reconciliation {
        word: m.group.format_word(w),
        analytic_accept: p,
        mc_accept: s.halted_accept_freq(),
        z_accept: za,
        analytic_steps: a.expected_steps,
        mc_steps: s.mean_steps,
        z_steps: zs,
        step_limits: s.step_limits,
        passed: za.abs() <= 3.0 && zs.abs() <= 3.0 && s.step_limits == 0,
    })
}

/// The scan's rational reading for reports: `‖q·num/den‖` exactly.
pub fn rational_distance(q: u64, alpha: &Q) -> Q {
    let x = alpha.mul(&Q::int(q as i64));
    let n = x.numer();
    let d = x.denom();
    let r = ((n % &d) + &d) % &d;
    let r2 = &d - &r;
    Q::from_big(r.min(r2), d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfr::{build_named_dfr, DfrSpec};

    #[test]
    fn rational_alpha_hits_zero() {
        let r = diophantine_scan(&AlphaSpec::Rational { num: 1, den: 3 }, 100, 128).unwrap();
        assert!(!r.irrational_on_range);
        assert_eq!(r.records.last().unwrap(), &(3, 0.0));
        assert_eq!(rational_distance(3, &Q::frac(1, 3)), Q::zero());
        assert_eq!(rational_distance(2, &Q::frac(1, 3)), Q::frac(1, 3));
    }

    #[test]
    fn sqrt2_is_badly_approximable() {
        let r = diophantine_scan(&AlphaSpec::Sqrt { n: 2 }, 20_000, 128).unwrap();
        assert!(r.fit_holds());
        for v in sqrt_records_times_q(&r) {
            assert!(v > 0.3, "{v}");
        }
        // records sit on the convergent denominators 1, 2, 5, 12, 29, 70, ...
        let qs: Vec<u64> = r.records.iter().map(|x| x.0).collect();
        assert_eq!(&qs[..6], &[1, 2, 5, 12, 29, 70]);
    }

    #[test]
    fn chunked_scan_matches_serial() {
        let a = AlphaSpec::AcosOverTwoPi { num: 3, den: 5 };
        let r = diophantine_scan(&a, 3 * CHUNK + 17, 128).unwrap();
        let serial = chunk_records(&a.value(128), 1, 3 * CHUNK + 18, 128);
        assert_eq!(r.records, serial);
    }

    #[test]
    fn z_gap_scan() {
        let f = build_named_dfr(&DfrSpec::ZAlgebraic).unwrap();
        let rep = trace_gap_scan(&f, 20).unwrap();
        assert!(rep.passed && rep.witnesses_ok);
        let m1 = rep.minima[1].unwrap();
        assert!((m1 - (2.0 - 4.0 / 5f64.sqrt())).abs() < 1e-12);
        let tau = calibrate_tau(&rep, TauShape::Poly);
        for n in 1..=20 {
            assert!(tau.eval(n).unwrap() <= rep.minima[n].unwrap() / 2.0 * (1.0 + 1e-9));
        }
    }

    #[test]
    fn trivial_gap_scan_is_vacuous() {
        let f = build_named_dfr(&DfrSpec::Trivial).unwrap();
        let rep = trace_gap_scan(&f, 5).unwrap();
        assert!(rep.passed);
        assert!(rep.minima.iter().all(Option::is_none));
    }

    #[test]
    fn fits() {
        let xs = [1.0, 2.0, 3.0];
        let (a, b, r2) = linear_fit(&xs, &[3.0, 5.0, 7.0]);
        assert!((a - 1.0).abs() < 1e-12 && (b - 2.0).abs() < 1e-12 && (r2 - 1.0).abs() < 1e-12);
    }
}
