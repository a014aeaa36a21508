//! Distinguishing families of representations: τ models, the named constructions,
//! the conversion/product/subgroup/overgroup combinators and gap certification.

use std::collections::HashMap;
use std::fmt;

use astro_float::BigFloat;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{direct_product, GroupFamily, Presentation, Word};
use crate::linalg::Matrix;
use crate::repr::{self, gap_from_trace, UnitaryRep};
use crate::scalar::float::{bf_mul, bf_pi, bf_sqrt};
use crate::scalar::{AmplitudeClass, Scalar, Tolerance, DEFAULT_PRECISION, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TauShape {
    Poly,
    Exp,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub shape: TauShape,
    pub radius: usize,
    /// `m(n)` for `n = 0..=radius`; `None` where the sphere has no non-identity element.
    pub minima: Vec<Option<f64>>,
    /// Poly: `[C₁, C₂]`; Exp: `[C]`.
    pub params: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TauModel {
    /// `C₁·n^{−C₂}`
    PolyLower { c1: f64, c2: f64 },
    /// `C^{−n}`
    ExpLower { base: f64 },
    Constant(f64),
    Calibrated(Calibration),
    Unbounded,
    /// Shape known, constants awaiting calibration.
    Pending(TauShape),
    /// Pointwise minimum, produced by the product construction.
    Min(Vec<TauModel>),
}

impl TauModel {
    pub fn eval(&self, n: usize) -> Option<f64> {
        let nf = n.max(1) as f64;
        match self {
            TauModel::PolyLower { c1, c2 } => Some(c1 * nf.powf(-c2)),
            TauModel::ExpLower { base } => Some(base.powf(-nf)),
            TauModel::Constant(c) => Some(*c),
            TauModel::Calibrated(c) => match c.shape {
                TauShape::Poly => Some(c.params[0] * nf.powf(-c.params[1])),
                TauShape::Exp => Some(c.params[0].powf(-nf)),
            },
            TauModel::Unbounded | TauModel::Pending(_) => None,
            TauModel::Min(v) => v.iter().map(|t| t.eval(n)).try_fold(f64::INFINITY, |a, x| x.map(|x| a.min(x))),
        }
    }

    pub fn shape(&self) -> Option<TauShape> {
        match self {
            TauModel::PolyLower { .. } | TauModel::Constant(_) => Some(TauShape::Poly),
            TauModel::ExpLower { .. } => Some(TauShape::Exp),
            TauModel::Calibrated(c) => Some(c.shape),
            TauModel::Pending(s) => Some(*s),
            TauModel::Unbounded => None,
            TauModel::Min(v) => {
                let shapes: Vec<_> = v.iter().map(TauModel::shape).collect();
                if shapes.iter().any(Option::is_none) {
                    None
                } else if shapes.contains(&Some(TauShape::Exp)) {
                    Some(TauShape::Exp)
                } else {
                    Some(TauShape::Poly)
                }
            }
        }
    }

    /// `(C₁, C₂)` with `τ(n) ≥ C₁ n^{−C₂}`, when known.
    pub fn as_poly(&self) -> Option<(f64, f64)> {
        match self {
            TauModel::PolyLower { c1, c2 } => Some((*c1, *c2)),
            TauModel::Constant(c) => Some((*c, 0.0)),
            TauModel::Calibrated(c) if c.shape == TauShape::Poly => Some((c.params[0], c.params[1])),
            TauModel::Min(v) => v.iter().map(TauModel::as_poly).try_fold((f64::INFINITY, 0.0f64), |(a, b), x| {
                x.map(|(c1, c2)| (a.min(c1), b.max(c2)))
            }),
            _ => None,
        }
    }

    /// `C` with `τ(n) ≥ C^{−n}`, when known.
    pub fn as_exp(&self) -> Option<f64> {
        match self {
            TauModel::ExpLower { base } => Some(*base),
            TauModel::Constant(c) => Some(1f64.max(1.0 / c)),
            TauModel::Calibrated(c) if c.shape == TauShape::Exp => Some(c.params[0]),
            TauModel::Min(v) => v.iter().map(TauModel::as_exp).try_fold(1f64, |a, x| x.map(|b| a.max(b))),
            _ => None,
        }
    }

    pub fn is_unbounded(&self) -> bool {
        matches!(self, TauModel::Unbounded)
    }

    fn downgraded(&self) -> TauModel {
        match self.shape() {
            Some(s) => TauModel::Pending(s),
            None => TauModel::Unbounded,
        }
    }
}

impl fmt::Display for TauModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TauModel::PolyLower { c1, c2 } => write!(f, "{c1:.6e}·n^-{c2:.4}"),
            TauModel::ExpLower { base } => write!(f, "{base:.6}^-n"),
            TauModel::Constant(c) => write!(f, "{c:.6e}"),
            TauModel::Calibrated(c) => match c.shape {
                TauShape::Poly => write!(f, "calibrated {:.6e}·n^-{:.4} (radius {})", c.params[0], c.params[1], c.radius),
                TauShape::Exp => write!(f, "calibrated {:.6}^-n (radius {})", c.params[0], c.radius),
            },
            TauModel::Unbounded => write!(f, "unbounded"),
            TauModel::Pending(s) => write!(f, "pending {s:?}"),
            TauModel::Min(v) => {
                let parts: Vec<String> = v.iter().map(|t| t.to_string()).collect();
                write!(f, "min({})", parts.join(", "))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dfr {
    pub name: String,
    pub reps: Vec<UnitaryRep>,
    pub tau: TauModel,
    pub diagonal: bool,
    /// Radius of the last successful certification.
    pub certified: Option<usize>,
}

impl Dfr {
    pub fn new(name: impl Into<String>, reps: Vec<UnitaryRep>, tau: TauModel) -> Result<Dfr> {
        let first = reps.first().ok_or_else(|| Error::Invalid("a DFR needs at least one representation".into()))?;
        for r in &reps[1..] {
            if r.group != first.group || r.dim != first.dim {
                return Err(Error::Dimension("DFR representations must share group and dimension".into()));
            }
        }
        let diagonal = reps.iter().all(UnitaryRep::is_diagonal);
        Ok(Dfr { name: name.into(), reps, tau, diagonal, certified: None })
    }

    pub fn k(&self) -> usize {
        self.reps.len()
    }

    pub fn d(&self) -> usize {
        self.reps[0].dim
    }

    pub fn group(&self) -> &Presentation {
        &self.reps[0].group
    }

    pub fn projective(&self) -> bool {
        self.reps.iter().any(|r| r.projective)
    }

    pub fn amplitude_class(&self) -> AmplitudeClass {
        self.reps.iter().fold(AmplitudeClass::AlgebraicExact, |c, r| c.join(r.amplitude_class()))
    }

    pub fn is_exact(&self) -> bool {
        self.reps.iter().all(UnitaryRep::is_exact)
    }

    /// `max_j (d − |χ_{ρ_j}(w)|)`.
    pub fn gap(&self, w: &Word) -> Result<f64> {
        let mut g = f64::NEG_INFINITY;
        for r in &self.reps {
            g = g.max(r.gap(w)?);
        }
        Ok(g)
    }

    /// Rename generators; the family must be unchanged.
    pub fn relabel(mut self, p: Presentation) -> Result<Dfr> {
        if p.family != self.group().family {
            return Err(Error::Alphabet("relabel must keep the group family".into()));
        }
        for r in &mut self.reps {
            r.group = p.clone();
        }
        Ok(self)
    }

    /// Run the gap scan at `radius`; on success record the certification and replace
    /// pending/min/calibrated τ models by a fresh calibration of the declared shape.
    pub fn certify(&mut self, radius: usize) -> Result<GapScan> {
        let scan = scan_gaps(self, radius)?;
        match &self.tau {
            TauModel::Pending(_) | TauModel::Min(_) | TauModel::Calibrated(_) => {
                if let Some(shape) = self.tau.shape() {
                    self.tau = TauModel::Calibrated(calibrate(&scan, shape));
                }
            }
            _ => {}
        }
        if scan.declared_ok == Some(false) {
            return Err(Error::Certification(format!("declared τ {} exceeds a scanned minimum", self.tau)));
        }
        self.certified = Some(radius);
        Ok(scan)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GapScan {
    pub radius: usize,
    pub elements: usize,
    pub minima: Vec<Option<f64>>,
    pub witnesses: Vec<Option<Word>>,
    /// `C* = max_n m(n)^{−1/n}`.
    pub exp_base: Option<f64>,
    /// Lower power envelope `(C₁*, C₂*)`.
    pub poly: Option<(f64, f64)>,
    pub declared_ok: Option<bool>,
}

/// Per-length minima of the DFR gap over `B(radius)`, with lower envelopes.
pub fn scan_gaps(f: &Dfr, radius: usize) -> Result<GapScan> {
    let group = f.group();
    let ball = group.enumerate_ball(radius)?;
    let tol = Tolerance::default();
    let mut minima: Vec<Option<f64>> = vec![None; radius + 1];
    let mut witnesses: Vec<Option<Word>> = vec![None; radius + 1];
    // canonical words are prefix-closed, so each image extends its prefix's image by one factor
    let mut prev: HashMap<Word, Vec<Matrix>> = HashMap::new();
    let mut cur: HashMap<Word, Vec<Matrix>> = HashMap::new();
    let mut cur_len = 0;
    prev.insert(Word::empty(), f.reps.iter().map(|r| Matrix::identity(r.dim)).collect());
    for (w, len) in &ball {
        if *len == 0 {
            continue;
        }
        if *len != cur_len {
            if cur_len > 0 {
                prev = std::mem::take(&mut cur);
            }
            cur_len = *len;
        }
        let prefix = Word(w.0[..w.len() - 1].to_vec());
        let last = *w.0.last().unwrap();
        let mats: Vec<Matrix> = match prev.get(&prefix) {
            Some(pm) => pm.iter().zip(&f.reps).map(|(m, r)| m.mul(r.image(last))).collect::<Result<_>>()?,
            None => f.reps.iter().map(|r| r.eval(w)).collect::<Result<_>>()?,
        };
        if group.is_identity(w)? {
            cur.insert(w.clone(), mats);
            continue;
        }
        let g = mats.iter().map(|m| gap_from_trace(&m.trace(), m.dim())).fold(f64::NEG_INFINITY, f64::max);
        if g <= tol.eps_num {
            return Err(Error::Certification(format!(
                "non-identity element {} has gap {g:e}",
                group.format_word(w)
            )));
        }
        if minima[*len].map_or(true, |m| g < m) {
            minima[*len] = Some(g);
            witnesses[*len] = Some(w.clone());
        }
        cur.insert(w.clone(), mats);
    }
    let exp_base = exp_envelope(&minima, 1.0);
    let poly = poly_envelope(&minima, 1.0);
    let declared_ok = match &f.tau {
        TauModel::Unbounded | TauModel::Pending(_) => None,
        t => Some(minima.iter().enumerate().all(|(n, m)| match (m, t.eval(n)) {
            (Some(m), Some(tau)) => tau <= *m * (1.0 + 1e-12),
            _ => true,
        })),
    };
    Ok(GapScan { radius, elements: ball.len(), minima, witnesses, exp_base, poly, declared_ok })
}

/// Smallest `C ≥ 1` with `C^{−n} ≤ factor·m(n)` for all scanned `n`.
pub fn exp_envelope(minima: &[Option<f64>], factor: f64) -> Option<f64> {
    let mut c: Option<f64> = None;
    for (n, m) in minima.iter().enumerate() {
        if let (Some(m), true) = (m, n > 0) {
            let v = (m * factor).min(1.0).powf(-1.0 / n as f64);
            c = Some(c.map_or(v, |x: f64| x.max(v)));
        }
    }
    c.map(|x| x.max(1.0))
}

/// `(C₁, C₂)` maximizing `Σ(log C₁ − C₂ log n)` subject to `C₁ n^{−C₂} ≤ factor·m(n)` and `C₂ ≥ 0`.
/// The optimum of this two-variable linear program sits on a vertex; all vertices are tried.
pub fn poly_envelope(minima: &[Option<f64>], factor: f64) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = minima
        .iter()
        .enumerate()
        .filter_map(|(n, m)| m.filter(|_| n > 0).map(|m| (n as f64, m * factor)))
        .collect();
    power_envelope(&pts)
}

/// Best `(c, D)` with `c·x^{−D} ≤ y` at every point `(x, y)`, `x, y > 0`, by the same
/// log-space linear program as [`poly_envelope`].
pub fn power_envelope(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    if pts.is_empty() {
        return None;
    }
    let sum_x: f64 = pts.iter().map(|p| p.0).sum();
    let np = pts.len() as f64;
    let feasible = |a: f64, b: f64| pts.iter().all(|&(x, y)| a - b * x <= y + 1e-12 * (1.0 + y.abs()));
    let mut best: Option<(f64, f64, f64)> = None;
    let mut consider = |a: f64, b: f64| {
        if b >= 0.0 && a.is_finite() && b.is_finite() && feasible(a, b) {
            let obj = np * a - b * sum_x;
            if best.map_or(true, |(o, _, _)| obj > o) {
                best = Some((obj, a, b));
            }
        }
    };
    let a0 = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    consider(a0, 0.0);
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let (x1, y1) = pts[i];
            let (x2, y2) = pts[j];
            if (x1 - x2).abs() < 1e-15 {
                continue;
            }
            let b = (y1 - y2) / (x2 - x1);
            let a = y1 + b * x1;
            consider(a, b);
        }
    }
    best.map(|(_, a, b)| (a.exp(), b))
}

/// The power envelope that is largest at the shortest scanned length: `C₁ = factor·m(n₀)`
/// and the smallest `C₂ ≥ 0` keeping every other point above `C₁ n^{−C₂}`.
pub fn anchored_poly_envelope(minima: &[Option<f64>], factor: f64) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = minima
        .iter()
        .enumerate()
        .filter_map(|(n, m)| m.filter(|_| n > 0).map(|m| (n as f64, m * factor)))
        .collect();
    let &(x0, c1) = pts.first()?;
    let c1 = pts.iter().filter(|p| p.0 == x0).map(|p| p.1).fold(c1, f64::min);
    let mut c2 = 0.0f64;
    for &(x, y) in &pts {
        if x > x0 && y < c1 {
            c2 = c2.max((c1 / y).ln() / (x / x0).ln());
        }
    }
    // C₁ n^{−C₂} with the anchor at n₀ rather than 1
    Some((c1 * x0.powf(c2), c2))
}

/// Calibrated τ of the given shape with safety factor 1/2.
pub fn calibrate(scan: &GapScan, shape: TauShape) -> Calibration {
    let params = match shape {
        TauShape::Exp => vec![exp_envelope(&scan.minima, 0.5).unwrap_or(1.0)],
        TauShape::Poly => {
            let (c1, c2) = anchored_poly_envelope(&scan.minima, 0.5).unwrap_or((1.0, 0.0));
            vec![c1, c2]
        }
    };
    Calibration { shape, radius: scan.radius, minima: scan.minima.clone(), params }
}

// ---------------------------------------------------------------------------
// named constructions

#[derive(Clone, Debug, PartialEq)]
pub enum DfrSpec {
    Trivial,
    Zm(u64),
    ZAlgebraic,
    ZNonAlgebraic { delta: f64 },
    F2,
    Fr(usize),
    AbelianAlgebraic { r: usize, torsion: Vec<u64> },
    AbelianNonAlgebraic { r: usize, torsion: Vec<u64>, delta: f64 },
    DirectProductOfFrees(Vec<usize>),
    TanZr(usize),
    /// `α = √alpha_radicand`.
    ShalenZFreeZr { r: usize, alpha_radicand: u64 },
}

fn g(re: i64, im: i64, den: i64) -> Scalar {
    Scalar::gaussian(Q::frac(re, den), Q::frac(im, den))
}

fn inv_sqrt5() -> Scalar {
    Scalar::sqrt_rational(&Q::frac(1, 5), DEFAULT_PRECISION)
}

fn f2_images() -> Vec<Matrix> {
    let s = inv_sqrt5();
    let a = Matrix::diag(vec![g(2, 1, 1).mul(&s), g(2, -1, 1).mul(&s)]);
    let b = Matrix::from_rows(vec![
        vec![Scalar::int(2).mul(&s), Scalar::i().mul(&s)],
        vec![Scalar::i().mul(&s), Scalar::int(2).mul(&s)],
    ]);
    vec![a, b]
}

/// `diag(e^{2πi θ}, 1)` with `θ = √radicand`.
fn irrational_phase(radicand: u64, p: usize) -> Matrix {
    let theta = bf_mul(&bf_sqrt(&BigFloat::from_u64(radicand, p), p), &bf_mul(&bf_pi(p), &BigFloat::from_u64(2, p), p), p);
    Matrix::diag(vec![Scalar::expi(&theta, p), Scalar::one()]).with_class(AmplitudeClass::CTildeNumeric)
}

pub fn primes() -> impl Iterator<Item = u64> {
    (2u64..).filter(|&n| (2..).take_while(|d| d * d <= n).all(|d| n % d != 0))
}

/// `(p, m, n)` for the `j`-th prime `p ≡ 1 mod 4` (zero-based), `p = m² + n²`, `m > n > 0`.
pub fn tan_prime(j: usize) -> (u64, u64, u64) {
    let p = primes().filter(|p| p % 4 == 1).nth(j).unwrap();
    for n in 1.. {
        let m2 = p - n * n;
        let m = (m2 as f64).sqrt().round() as u64;
        if m * m == m2 && m > n {
            return (p, m, n);
        }
    }
    unreachable!()
}

pub fn tan_matrix(j: usize) -> Matrix {
    let (p, m, n) = tan_prime(j);
    let (p, m, n) = (p as i64, m as i64, n as i64);
    let c = Scalar::frac(m * m - n * n, p);
    let s = Scalar::frac(2 * m * n, p);
    Matrix::from_rows(vec![vec![c.clone(), s.clone()], vec![s.neg(), c]])
}

fn zm_image(m: u64) -> Matrix {
    Matrix::diag(vec![Scalar::root_of_unity(1, m as i64, DEFAULT_PRECISION), Scalar::one()])
}

fn zm_tau(m: u64) -> TauModel {
    TauModel::Constant(19.0 * std::f64::consts::PI.powi(2) / (24.0 * (m * m) as f64))
}

pub fn build_named_dfr(spec: &DfrSpec) -> Result<Dfr> {
    match spec {
        DfrSpec::Trivial => {
            let rep = UnitaryRep::trivial(Presentation::trivial(), 2);
            Dfr::new("trivial", vec![rep], TauModel::Constant(2.0))
        }
        DfrSpec::Zm(m) => {
            if *m < 2 {
                return Err(Error::Invalid(format!("ℤ_m needs m ≥ 2, got {m}")));
            }
            let rep = UnitaryRep::new(Presentation::cyclic(*m), vec![zm_image(*m)], false)?;
            Dfr::new(format!("z{m}"), vec![rep], zm_tau(*m))
        }
        DfrSpec::ZAlgebraic => {
            let rep = UnitaryRep::new(Presentation::z(), vec![Matrix::diag(vec![g(3, 4, 5), Scalar::one()])], false)?;
            Dfr::new("z", vec![rep], TauModel::Pending(TauShape::Poly))
        }
        DfrSpec::ZNonAlgebraic { delta } => {
            if !(*delta > 0.0) || !delta.is_finite() {
                return Err(Error::Invalid(format!("δ must be positive, got {delta}")));
            }
            let k = 1 + (2.0 / delta).floor() as usize;
            let reps = primes()
                .take(k)
                .map(|p| UnitaryRep::new(Presentation::z(), vec![irrational_phase(p, DEFAULT_PRECISION)], false))
                .collect::<Result<Vec<_>>>()?;
            Dfr::new(format!("z-nonalg-{delta}"), reps, TauModel::Pending(TauShape::Poly))
        }
        DfrSpec::F2 => {
            let rep = UnitaryRep::new(Presentation::free(2), f2_images(), false)?;
            Dfr::new("f2", vec![rep], TauModel::Pending(TauShape::Exp))
        }
        DfrSpec::Fr(r) => {
            let f2 = UnitaryRep::new(Presentation::free(2), f2_images(), false)?;
            let rep = match r {
                0 => return Err(Error::Invalid("F_r needs r ≥ 1".into())),
                1 => repr::restrict(&f2, Presentation::free(1), &[Word::gen_power(0, 1)])?,
                2 => f2,
                _ => {
                    let emb: Vec<Word> = (1..=*r as i64)
                        .map(|j| Word::gen_power(0, j).concat(&Word::gen_power(1, 1)).concat(&Word::gen_power(0, -j)))
                        .collect();
                    repr::restrict(&f2, Presentation::free(*r), &emb)?
                }
            };
            Dfr::new(format!("f{r}"), vec![rep], TauModel::Pending(TauShape::Exp))
        }
        DfrSpec::AbelianAlgebraic { r, torsion } => abelian(*r, torsion, None),
        DfrSpec::AbelianNonAlgebraic { r, torsion, delta } => abelian(*r, torsion, Some(*delta)),
        DfrSpec::DirectProductOfFrees(rs) => {
            if rs.is_empty() {
                return Err(Error::Invalid("need at least one free factor".into()));
            }
            let mut acc = build_named_dfr(&DfrSpec::Fr(rs[0]))?;
            for &r in &rs[1..] {
                acc = dfr_product(&acc, &build_named_dfr(&DfrSpec::Fr(r))?)?;
            }
            let p = Presentation::new(GroupFamily::DirectProductOfFrees(rs.clone()))?;
            let p = if rs.len() == 1 { Presentation::free(rs[0]) } else { p };
            let mut out = acc.relabel(p)?;
            out.name = format!("dpof-{}", rs.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("-"));
            Ok(out)
        }
        DfrSpec::TanZr(r) => {
            if *r == 0 {
                return Err(Error::Invalid("ℤ^r needs r ≥ 1".into()));
            }
            let rep = UnitaryRep::new(Presentation::free_abelian(*r), (0..*r).map(tan_matrix).collect(), false)?;
            Dfr::new(format!("tan-z{r}"), vec![rep], TauModel::Pending(TauShape::Poly))
        }
        DfrSpec::ShalenZFreeZr { r, alpha_radicand } => shalen(*r, *alpha_radicand),
    }
}

fn abelian(r: usize, torsion: &[u64], delta: Option<f64>) -> Result<Dfr> {
    let target = Presentation::new(if torsion.is_empty() {
        GroupFamily::FreeAbelian(r)
    } else {
        GroupFamily::AbelianMixed(r, torsion.to_vec())
    })?;
    if r == 0 && torsion.is_empty() {
        return build_named_dfr(&DfrSpec::Trivial);
    }
    let z = match delta {
        None => DfrSpec::ZAlgebraic,
        Some(delta) => DfrSpec::ZNonAlgebraic { delta },
    };
    let mut parts: Vec<Dfr> = Vec::new();
    for _ in 0..r {
        parts.push(build_named_dfr(&z)?);
    }
    for &m in torsion {
        parts.push(build_named_dfr(&DfrSpec::Zm(m))?);
    }
    let mut acc = parts.remove(0);
    for p in &parts {
        acc = dfr_product(&acc, p)?;
    }
    let mut out = acc.relabel(target)?;
    out.name = match delta {
        None => format!("abelian-{r}-{torsion:?}"),
        Some(d) => format!("abelian-nonalg-{r}-{torsion:?}-{d}"),
    };
    Ok(out)
}

fn shalen(r: usize, radicand: u64) -> Result<Dfr> {
    if r == 0 {
        return Err(Error::Invalid("ℤ * ℤ^r needs r ≥ 1".into()));
    }
    let root = (radicand as f64).sqrt().round() as u64;
    if radicand < 2 || root * root == radicand {
        return Err(Error::Invalid(format!("√{radicand} is not a supported quadratic irrational")));
    }
    let p = DEFAULT_PRECISION;
    let theta = bf_mul(&bf_sqrt(&BigFloat::from_u64(radicand, p), p), &bf_pi(p), p);
    let lambda = Scalar::expi(&theta, p);
    let lambda2 = lambda.mul(&lambda);
    let big = Matrix::diag(vec![lambda.clone(), lambda2.clone()]).with_class(AmplitudeClass::CTildeNumeric);
    let big_inv = big.adjoint();
    let group = Presentation::new(GroupFamily::FreeProductZWithZr(r))?;
    let y = tan_matrix(r);
    let mut images = vec![y.clone()];
    let mut factors = vec![vec![y]];
    for j in 0..r {
        let x = tan_matrix(j);
        images.push(big.mul(&x)?.mul(&big_inv)?.with_class(AmplitudeClass::CTildeNumeric));
        factors.push(vec![big.clone(), x, big_inv.clone()]);
    }
    let rep = UnitaryRep::new(group, images, false)?.with_factorizations(factors)?;
    Dfr::new(format!("shalen-z-z{r}"), vec![rep], TauModel::Unbounded)
}

// ---------------------------------------------------------------------------
// combinators

/// `{ρ_1 ⊕ ⋯ ⊕ ρ_k}`.
pub fn dfr_combine(f: &Dfr) -> Result<Dfr> {
    let mut acc = f.reps[0].clone();
    for r in &f.reps[1..] {
        acc = repr::direct_sum(&acc, r)?;
    }
    let mut out = Dfr::new(format!("{}-combined", f.name), vec![acc], f.tau.clone())?;
    out.certified = f.certified;
    Ok(out)
}

/// Pad every representation with the trivial one up to dimension `d`.
pub fn dfr_pad(f: &Dfr, d: usize) -> Result<Dfr> {
    let reps = f.reps.iter().map(|r| repr::pad(r, d)).collect::<Result<Vec<_>>>()?;
    let mut out = Dfr::new(format!("{}-pad{d}", f.name), reps, f.tau.clone())?;
    out.certified = f.certified;
    Ok(out)
}

/// DFR of `G × H` from DFRs of `G` and `H`, generators `S_G ⊔ S_H`.
pub fn dfr_product(fg: &Dfr, fh: &Dfr) -> Result<Dfr> {
    let group = direct_product(fg.group(), fh.group())?;
    let d = fg.d().max(fh.d());
    let off = fg.group().generator_count();
    let mut reps = Vec::new();
    let trivial_g = matches!(fg.group().family, GroupFamily::Trivial);
    let trivial_h = matches!(fh.group().family, GroupFamily::Trivial);
    if trivial_g {
        return Ok(fh.clone());
    }
    if trivial_h {
        return Ok(fg.clone());
    }
    for r in &fg.reps {
        reps.push(repr::extend_to_product(&repr::pad(r, d)?, group.clone(), 0)?);
    }
    for r in &fh.reps {
        reps.push(repr::extend_to_product(&repr::pad(r, d)?, group.clone(), off)?);
    }
    let tau = match (&fg.tau, &fh.tau) {
        (TauModel::Unbounded, _) | (_, TauModel::Unbounded) => TauModel::Unbounded,
        (a, b) => {
            let mut v = Vec::new();
            for t in [a, b] {
                match t {
                    TauModel::Min(inner) => v.extend(inner.iter().cloned()),
                    t => v.push(t.clone()),
                }
            }
            TauModel::Min(v)
        }
    };
    Dfr::new(format!("{}x{}", fg.name, fh.name), reps, tau)
}

/// Restrict along `h_i ↦ embedding[i]`; τ constants must be recalibrated.
pub fn dfr_subgroup(f: &Dfr, target: Presentation, embedding: &[Word]) -> Result<Dfr> {
    let reps = f.reps.iter().map(|r| repr::restrict(r, target.clone(), embedding)).collect::<Result<Vec<_>>>()?;
    Dfr::new(format!("{}-sub", f.name), reps, f.tau.downgraded())
}

/// Induce along the coset table of a virtual-overgroup presentation; τ must be recalibrated.
pub fn dfr_overgroup(f: &Dfr, overgroup: &Presentation) -> Result<Dfr> {
    let reps = f.reps.iter().map(|r| repr::induce(r, overgroup)).collect::<Result<Vec<_>>>()?;
    Dfr::new(format!("{}-over", f.name), reps, f.tau.downgraded())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zm4_shape() {
        let f = build_named_dfr(&DfrSpec::Zm(4)).unwrap();
        assert_eq!((f.k(), f.d()), (1, 2));
        assert_eq!(f.reps[0].images()[0], Matrix::diag(vec![Scalar::i(), Scalar::one()]));
        let t = f.tau.eval(1).unwrap();
        assert!((t - 0.4885).abs() < 2e-4, "{t}");
        assert!(build_named_dfr(&DfrSpec::Zm(1)).is_err());
    }

    #[test]
    fn tan_first_two() {
        assert_eq!(tan_prime(0), (5, 2, 1));
        assert_eq!(tan_prime(1), (13, 3, 2));
        let m = tan_matrix(0);
        assert_eq!(m.get(0, 0), &Scalar::frac(3, 5));
        assert_eq!(m.get(0, 1), &Scalar::frac(4, 5));
        assert_eq!(m.get(1, 0), &Scalar::frac(-4, 5));
        let m = tan_matrix(1);
        assert_eq!(m.get(0, 1), &Scalar::frac(12, 13));
    }

    #[test]
    fn f2_is_exact_and_faithful_on_small_ball() {
        let mut f = build_named_dfr(&DfrSpec::F2).unwrap();
        assert!(f.is_exact());
        let scan = f.certify(4).unwrap();
        assert_eq!(scan.elements, 161);
        assert!(scan.minima[1..].iter().all(|m| m.unwrap() > 0.0));
        assert!(matches!(f.tau, TauModel::Calibrated(_)));
    }

    #[test]
    fn z_scan_first_minimum() {
        let mut f = build_named_dfr(&DfrSpec::ZAlgebraic).unwrap();
        let scan = f.certify(20).unwrap();
        assert!((scan.minima[1].unwrap() - (2.0 - 4.0 / 5f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn product_and_combine() {
        let z = build_named_dfr(&DfrSpec::ZAlgebraic).unwrap();
        let p = dfr_product(&z, &z).unwrap();
        assert_eq!((p.k(), p.d()), (2, 2));
        assert!(p.diagonal);
        let c = dfr_combine(&p).unwrap();
        assert_eq!((c.k(), c.d()), (1, 4));
    }

    #[test]
    fn envelopes_are_lower_bounds() {
        let minima = vec![None, Some(0.2), Some(0.05), Some(0.1), Some(0.01)];
        let c = exp_envelope(&minima, 1.0).unwrap();
        let (c1, c2) = poly_envelope(&minima, 1.0).unwrap();
        for (n, m) in minima.iter().enumerate().skip(1) {
            let m = m.unwrap();
            assert!(c.powf(-(n as f64)) <= m * (1.0 + 1e-9));
            assert!(c1 * (n as f64).powf(-c2) <= m * (1.0 + 1e-9));
        }
    }

    #[test]
    fn shalen_factorization_recorded() {
        let f = build_named_dfr(&DfrSpec::ShalenZFreeZr { r: 2, alpha_radicand: 2 }).unwrap();
        assert_eq!(f.reps[0].factorizations.as_ref().unwrap()[1].len(), 3);
        assert_eq!(f.amplitude_class(), AmplitudeClass::CTildeNumeric);
        assert!(build_named_dfr(&DfrSpec::ShalenZFreeZr { r: 2, alpha_radicand: 4 }).is_err());
    }
}
