//! JSON and CSV formats for presentations, matrices, DFRs, machines and reports.
//!
//! Exact scalars are written as their eight rational coordinates over the basis
//! `1, √2, √5, √10, i, i√2, i√5, i√10`, each a `"p/q"` string. Float scalars are a pair of
//! hexadecimal mantissa strings with the precision stored on the matrix.

use std::path::Path;

use serde_json::{json, Map, Value};

use crate::analysis::{DiophantineReport, GapScanReport, Reconciliation, RuntimeFit};
use crate::dfr::{Calibration, Dfr, TauModel, TauShape};
use crate::error::{Error, Result};
use crate::group::{CosetTable, GroupFamily, Presentation, Word};
use crate::linalg::{Matrix, Partition};
use crate::machine::{
    Action, AcceptanceStats, Coin, CoinSource, MachineKind, OneWayStructure, QcfaMachine, RoundAnalysis, RoundSpec,
    RoundStructure, Structure, Sweep,
};
use crate::repr::UnitaryRep;
use crate::scalar::exact::QE;
use crate::scalar::float::{bf_from_hex, bf_to_hex};
use crate::scalar::{AmplitudeClass, Scalar, Q};

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn field<'a>(v: &'a Value, k: &str) -> Result<&'a Value> {
    v.get(k).ok_or_else(|| perr(format!("missing field {k:?}")))
}

fn as_u64(v: &Value, what: &str) -> Result<u64> {
    v.as_u64().ok_or_else(|| perr(format!("{what} must be a non-negative integer")))
}

fn as_usize(v: &Value, what: &str) -> Result<usize> {
    as_u64(v, what).map(|x| x as usize)
}

fn as_f64(v: &Value, what: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| perr(format!("{what} must be a number")))
}

fn as_str<'a>(v: &'a Value, what: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| perr(format!("{what} must be a string")))
}

fn as_arr<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| perr(format!("{what} must be an array")))
}

fn usize_vec(v: &Value, what: &str) -> Result<Vec<usize>> {
    as_arr(v, what)?.iter().map(|x| as_usize(x, what)).collect()
}

fn from_serde<T: serde::de::DeserializeOwned>(v: &Value) -> Result<T> {
    Ok(serde_json::from_value(v.clone())?)
}

// ---------------------------------------------------------------------------
// words, coset tables, presentations

pub fn word_to_json(w: &Word) -> Value {
    json!(w.to_signed())
}

pub fn word_from_json(v: &Value) -> Result<Word> {
    let codes: Vec<i64> = as_arr(v, "word")?
        .iter()
        .map(|x| x.as_i64().ok_or_else(|| perr("word letters must be signed integers")))
        .collect::<Result<_>>()?;
    Word::from_signed(&codes)
}

pub fn coset_table_to_json(t: &CosetTable) -> Value {
    json!({
        "index": t.index,
        "g_generators": t.g_generators,
        "alpha": t.alpha,
        "beta_hat": t.beta_hat.iter().map(|row| row.iter().map(word_to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

pub fn coset_table_from_json(v: &Value) -> Result<CosetTable> {
    let alpha: Vec<Vec<usize>> =
        as_arr(field(v, "alpha")?, "alpha")?.iter().map(|r| usize_vec(r, "alpha")).collect::<Result<_>>()?;
    let beta_hat: Vec<Vec<Word>> = as_arr(field(v, "beta_hat")?, "beta_hat")?
        .iter()
        .map(|r| as_arr(r, "beta_hat row")?.iter().map(word_from_json).collect())
        .collect::<Result<_>>()?;
    Ok(CosetTable {
        index: as_usize(field(v, "index")?, "index")?,
        g_generators: as_usize(field(v, "g_generators")?, "g_generators")?,
        alpha,
        beta_hat,
    })
}

pub fn presentation_to_json(p: &Presentation) -> Value {
    let params: Vec<u64> = match &p.family {
        GroupFamily::Trivial => vec![],
        GroupFamily::CyclicFinite(m) => vec![*m],
        GroupFamily::FreeAbelian(r) | GroupFamily::Free(r) | GroupFamily::FreeProductZWithZr(r) => vec![*r as u64],
        GroupFamily::AbelianMixed(r, ms) => std::iter::once(*r as u64).chain(ms.iter().copied()).collect(),
        GroupFamily::DirectProductOfFrees(rs) => rs.iter().map(|&r| r as u64).collect(),
        GroupFamily::VirtualOvergroup(_, t) => vec![t.index as u64, t.g_generators as u64],
    };
    let mut o = json!({ "family": p.family.tag(), "params": params, "labels": p.labels });
    if let GroupFamily::VirtualOvergroup(base, t) = &p.family {
        let m = o.as_object_mut().unwrap();
        m.insert("base".into(), presentation_to_json(base));
        let tj = coset_table_to_json(t);
        m.insert("alpha".into(), tj["alpha"].clone());
        m.insert("beta_hat".into(), tj["beta_hat"].clone());
    }
    o
}

pub fn presentation_from_json(v: &Value) -> Result<Presentation> {
    let tag = as_str(field(v, "family")?, "family")?;
    let params: Vec<u64> =
        as_arr(field(v, "params")?, "params")?.iter().map(|x| as_u64(x, "params")).collect::<Result<_>>()?;
    let need = |n: usize| -> Result<()> {
        if params.len() < n {
            Err(perr(format!("family {tag} needs {n} parameter(s)")))
        } else {
            Ok(())
        }
    };
    let family = match tag {
        "trivial" => GroupFamily::Trivial,
        "cyclic" => {
            need(1)?;
            GroupFamily::CyclicFinite(params[0])
        }
        "free_abelian" => {
            need(1)?;
            GroupFamily::FreeAbelian(params[0] as usize)
        }
        "abelian_mixed" => {
            need(1)?;
            GroupFamily::AbelianMixed(params[0] as usize, params[1..].to_vec())
        }
        "free" => {
            need(1)?;
            GroupFamily::Free(params[0] as usize)
        }
        "direct_product_of_frees" => GroupFamily::DirectProductOfFrees(params.iter().map(|&r| r as usize).collect()),
        "free_product_z_zr" => {
            need(1)?;
            GroupFamily::FreeProductZWithZr(params[0] as usize)
        }
        "virtual_overgroup" => {
            need(2)?;
            let base = presentation_from_json(field(v, "base")?)?;
            let t = coset_table_from_json(&json!({
                "index": params[0],
                "g_generators": params[1],
                "alpha": field(v, "alpha")?,
                "beta_hat": field(v, "beta_hat")?,
            }))?;
            GroupFamily::VirtualOvergroup(Box::new(base), t)
        }
        other => return Err(perr(format!("unknown group family {other:?}"))),
    };
    match v.get("labels") {
        Some(l) => {
            let labels: Vec<String> = from_serde(l)?;
            Presentation::with_labels(family, labels)
        }
        None => Presentation::new(family),
    }
}

// ---------------------------------------------------------------------------
// scalars and matrices

fn scalar_to_json(s: &Scalar) -> Value {
    match s {
        Scalar::Exact(e) => json!(e.coords().iter().map(|q| q.to_string()).collect::<Vec<_>>()),
        Scalar::Float(c) => json!([bf_to_hex(&c.re), bf_to_hex(&c.im)]),
    }
}

fn scalar_from_json(v: &Value, precision: Option<usize>) -> Result<Scalar> {
    let a = as_arr(v, "matrix entry")?;
    match (a.len(), precision) {
        (8, _) => {
            let mut c: [Q; 8] = Default::default();
            for (slot, x) in c.iter_mut().zip(a) {
                *slot = as_str(x, "rational")?.parse::<Q>().map_err(perr)?;
            }
            Ok(Scalar::Exact(QE::from_coords(c)))
        }
        (2, Some(p)) => {
            let re = bf_from_hex(as_str(&a[0], "hex float")?, p).ok_or_else(|| perr("bad hex float"))?;
            let im = bf_from_hex(as_str(&a[1], "hex float")?, p).ok_or_else(|| perr("bad hex float"))?;
            Ok(Scalar::float(re, im, p))
        }
        _ => Err(perr("matrix entries are 8 rationals (exact) or 2 hex floats (bigfloat)")),
    }
}

pub fn matrix_to_json(m: &Matrix) -> Value {
    let precision = m.entries().iter().find_map(Scalar::precision);
    let backend = if precision.is_some() { "bigfloat" } else { "exact" };
    let d = m.dim();
    let rows: Vec<Value> = (0..d).map(|r| json!((0..d).map(|c| scalar_to_json(m.get(r, c))).collect::<Vec<_>>())).collect();
    let mut o = json!({ "dim": d, "backend": backend, "entries": rows, "class": m.class() });
    if let Some(p) = precision {
        o["precision"] = json!(p);
    }
    o
}

pub fn matrix_from_json(v: &Value) -> Result<Matrix> {
    let d = as_usize(field(v, "dim")?, "dim")?;
    let precision = match v.get("precision") {
        Some(p) => Some(as_usize(p, "precision")?),
        None => None,
    };
    let rows = as_arr(field(v, "entries")?, "entries")?;
    if rows.len() != d {
        return Err(Error::Dimension(format!("matrix has {} rows, dim {d}", rows.len())));
    }
    let mut data = Vec::with_capacity(d * d);
    for r in rows {
        let r = as_arr(r, "matrix row")?;
        if r.len() != d {
            return Err(Error::Dimension("non-square matrix".into()));
        }
        for e in r {
            // exact zeros in float matrices are written as exact coordinates
            data.push(scalar_from_json(e, precision)?);
        }
    }
    let class: AmplitudeClass = from_serde(field(v, "class")?)?;
    Ok(Matrix::from_vec(d, data).with_class(class))
}

// ---------------------------------------------------------------------------
// DFRs

fn tau_to_json(t: &TauModel) -> Value {
    match t {
        TauModel::PolyLower { c1, c2 } => json!({ "kind": "poly_lower", "params": [c1, c2] }),
        TauModel::ExpLower { base } => json!({ "kind": "exp_lower", "params": [base] }),
        TauModel::Constant(c) => json!({ "kind": "constant", "params": [c] }),
        TauModel::Calibrated(c) => json!({
            "kind": "calibrated",
            "params": c.params,
            "calibration": c,
        }),
        TauModel::Unbounded => json!({ "kind": "unbounded", "params": [] }),
        TauModel::Pending(s) => json!({ "kind": "pending", "params": [], "shape": s }),
        TauModel::Min(v) => json!({ "kind": "min", "params": [], "parts": v.iter().map(tau_to_json).collect::<Vec<_>>() }),
    }
}

fn tau_from_json(v: &Value) -> Result<TauModel> {
    let kind = as_str(field(v, "kind")?, "tau.kind")?;
    let params: Vec<f64> = from_serde(field(v, "params")?)?;
    let p = |i: usize| params.get(i).copied().ok_or_else(|| perr(format!("tau {kind} needs {} params", i + 1)));
    Ok(match kind {
        "poly_lower" => TauModel::PolyLower { c1: p(0)?, c2: p(1)? },
        "exp_lower" => TauModel::ExpLower { base: p(0)? },
        "constant" => TauModel::Constant(p(0)?),
        "calibrated" => TauModel::Calibrated(from_serde::<Calibration>(field(v, "calibration")?)?),
        "unbounded" => TauModel::Unbounded,
        "pending" => TauModel::Pending(from_serde::<TauShape>(field(v, "shape")?)?),
        "min" => TauModel::Min(as_arr(field(v, "parts")?, "parts")?.iter().map(tau_from_json).collect::<Result<_>>()?),
        other => return Err(perr(format!("unknown tau kind {other:?}"))),
    })
}

pub fn dfr_to_json(f: &Dfr) -> Value {
    let reps: Vec<Value> = f
        .reps
        .iter()
        .map(|r| {
            let mut o = json!({
                "images": r.images().iter().map(matrix_to_json).collect::<Vec<_>>(),
                "projective": r.projective,
            });
            if let Some(fs) = &r.factorizations {
                o["factorizations"] =
                    json!(fs.iter().map(|g| g.iter().map(matrix_to_json).collect::<Vec<_>>()).collect::<Vec<_>>());
            }
            o
        })
        .collect();
    json!({
        "name": f.name,
        "group": presentation_to_json(f.group()),
        "k": f.k(),
        "d": f.d(),
        "diagonal": f.diagonal,
        "projective": f.projective(),
        "tau": tau_to_json(&f.tau),
        "reps": reps,
        "amplitude_class": f.amplitude_class(),
        "certified": f.certified,
    })
}

pub fn dfr_from_json(v: &Value) -> Result<Dfr> {
    let group = presentation_from_json(field(v, "group")?)?;
    let mut reps = Vec::new();
    for r in as_arr(field(v, "reps")?, "reps")? {
        let images: Vec<Matrix> =
            as_arr(field(r, "images")?, "images")?.iter().map(matrix_from_json).collect::<Result<_>>()?;
        let projective = field(r, "projective")?.as_bool().unwrap_or(false);
        let mut rep = UnitaryRep::new(group.clone(), images, projective)?;
        if let Some(fs) = r.get("factorizations") {
            let fs: Vec<Vec<Matrix>> = as_arr(fs, "factorizations")?
                .iter()
                .map(|g| as_arr(g, "factorization")?.iter().map(matrix_from_json).collect())
                .collect::<Result<_>>()?;
            rep = rep.with_factorizations(fs)?;
        }
        reps.push(rep);
    }
    let name = v.get("name").and_then(Value::as_str).unwrap_or("dfr").to_string();
    let mut f = Dfr::new(name, reps, tau_from_json(field(v, "tau")?)?)?;
    f.certified = match v.get("certified") {
        Some(Value::Null) | None => None,
        Some(x) => Some(as_usize(x, "certified")?),
    };
    let (k, d) = (as_usize(field(v, "k")?, "k")?, as_usize(field(v, "d")?, "d")?);
    if k != f.k() || d != f.d() {
        return Err(Error::Dimension(format!("DFR header says [k={k}, d={d}], reps give [{}, {}]", f.k(), f.d())));
    }
    Ok(f)
}

// ---------------------------------------------------------------------------
// machines

fn coin_to_json(c: &Coin) -> Value {
    match c {
        Coin::None => json!({ "type": "none" }),
        Coin::Walk { m, y } => json!({ "type": "walk", "m": m, "y": y }),
        Coin::Bias { p, y } => json!({ "type": "bias", "p": p.to_string(), "y": y }),
    }
}

fn coin_from_json(v: &Value) -> Result<Coin> {
    Ok(match as_str(field(v, "type")?, "coin.type")? {
        "none" => Coin::None,
        "walk" => Coin::Walk { m: as_usize(field(v, "m")?, "m")?, y: as_usize(field(v, "y")?, "y")? },
        "bias" => Coin::Bias {
            p: as_str(field(v, "p")?, "p")?.parse::<Q>().map_err(perr)?,
            y: as_usize(field(v, "y")?, "y")?,
        },
        other => return Err(perr(format!("unknown coin {other:?}"))),
    })
}

fn coin_source_to_json(c: &Option<CoinSource>) -> Value {
    match c {
        None => Value::Null,
        Some(CoinSource::Poly { c1, c2, eps, d }) => json!({ "type": "poly", "c1": c1, "c2": c2, "eps": eps, "d": d }),
        Some(CoinSource::Exp { base, eps, d }) => json!({ "type": "exp", "base": base, "eps": eps, "d": d }),
    }
}

fn coin_source_from_json(v: &Value) -> Result<Option<CoinSource>> {
    if v.is_null() {
        return Ok(None);
    }
    let eps = as_f64(field(v, "eps")?, "eps")?;
    let d = as_usize(field(v, "d")?, "d")?;
    Ok(Some(match as_str(field(v, "type")?, "coin_source.type")? {
        "poly" => CoinSource::Poly { c1: as_f64(field(v, "c1")?, "c1")?, c2: as_f64(field(v, "c2")?, "c2")?, eps, d },
        "exp" => CoinSource::Exp { base: as_f64(field(v, "base")?, "base")?, eps, d },
        other => return Err(perr(format!("unknown coin source {other:?}"))),
    }))
}

fn kind_from_tag(s: &str) -> Result<MachineKind> {
    Ok(match s {
        "poly" => MachineKind::Poly,
        "exp" => MachineKind::Exp,
        "unbounded" => MachineKind::Unbounded,
        "coin" => MachineKind::CoinFragment,
        other => return Err(perr(format!("unknown machine kind {other:?}"))),
    })
}

fn structure_to_json(s: &Structure) -> Value {
    match s {
        Structure::None => json!({ "kind": "none" }),
        Structure::OneWay(o) => json!({
            "kind": "one_way",
            "rep_dim": o.rep_dim,
            "prep": o.prep,
            "symbol_unitaries": o.symbol_unitaries,
            "final_h": o.final_h,
        }),
        Structure::Rounds(r) => json!({
            "kind": "rounds",
            "machine_kind": r.kind.tag(),
            "rounds": r.rounds.iter().map(|x| json!({
                "rep": x.rep, "prep": x.prep, "symbol_unitaries": x.symbol_unitaries, "final_t": x.final_t,
            })).collect::<Vec<_>>(),
            "sweep": match &r.sweep {
                Sweep::Direct => json!("direct"),
                Sweep::Coset(t) => json!({ "coset_table": coset_table_to_json(t) }),
            },
            "coin": coin_to_json(&r.coin),
            "coin_source": coin_source_to_json(&r.coin_source),
            "restart_on_coin_failure": r.restart_on_coin_failure,
            "eps": r.eps,
        }),
    }
}

fn structure_from_json(v: &Value) -> Result<Structure> {
    Ok(match as_str(field(v, "kind")?, "structure.kind")? {
        "none" => Structure::None,
        "one_way" => Structure::OneWay(OneWayStructure {
            rep_dim: as_usize(field(v, "rep_dim")?, "rep_dim")?,
            prep: as_usize(field(v, "prep")?, "prep")?,
            symbol_unitaries: usize_vec(field(v, "symbol_unitaries")?, "symbol_unitaries")?,
            final_h: as_usize(field(v, "final_h")?, "final_h")?,
        }),
        "rounds" => {
            let rounds = as_arr(field(v, "rounds")?, "rounds")?
                .iter()
                .map(|x| {
                    Ok(RoundSpec {
                        rep: as_usize(field(x, "rep")?, "rep")?,
                        prep: as_usize(field(x, "prep")?, "prep")?,
                        symbol_unitaries: usize_vec(field(x, "symbol_unitaries")?, "symbol_unitaries")?,
                        final_t: as_usize(field(x, "final_t")?, "final_t")?,
                    })
                })
                .collect::<Result<_>>()?;
            let sweep = match field(v, "sweep")? {
                Value::String(s) if s == "direct" => Sweep::Direct,
                x => Sweep::Coset(coset_table_from_json(field(x, "coset_table")?)?),
            };
            Structure::Rounds(RoundStructure {
                kind: kind_from_tag(as_str(field(v, "machine_kind")?, "machine_kind")?)?,
                rounds,
                sweep,
                coin: coin_from_json(field(v, "coin")?)?,
                coin_source: coin_source_from_json(field(v, "coin_source")?)?,
                restart_on_coin_failure: field(v, "restart_on_coin_failure")?.as_bool().unwrap_or(true),
                eps: field(v, "eps")?.as_f64(),
            })
        }
        other => return Err(perr(format!("unknown structure kind {other:?}"))),
    })
}

pub fn machine_to_json(m: &QcfaMachine) -> Value {
    let s = m.symbols();
    let mut delta = Vec::new();
    for (i, a) in m.delta.iter().enumerate() {
        let Some(a) = a else { continue };
        let action = match a {
            Action::Unitary { unitary, next, mv } => json!({ "unitary": unitary, "next": next, "move": mv }),
            Action::Measure { partition, branches } => {
                let mut b = Map::new();
                for (r, (c, h)) in branches.iter().enumerate() {
                    b.insert(r.to_string(), json!([c, h]));
                }
                json!({ "measure": partition, "branches": b })
            }
        };
        delta.push(json!({ "state": i / s, "symbol": i % s, "action": action }));
    }
    json!({
        "d": m.d,
        "group": presentation_to_json(&m.group),
        "classical_states": m.states,
        "start": m.start,
        "accept": m.accept,
        "reject": m.reject,
        "unitaries": m.unitaries.iter().map(matrix_to_json).collect::<Vec<_>>(),
        "partitions": m.partitions.iter().map(|p| json!(p.blocks)).collect::<Vec<_>>(),
        "delta": delta,
        "structure": structure_to_json(&m.structure),
    })
}

pub fn machine_from_json(v: &Value) -> Result<QcfaMachine> {
    let d = as_usize(field(v, "d")?, "d")?;
    let group = presentation_from_json(field(v, "group")?)?;
    let states: Vec<String> = from_serde(field(v, "classical_states")?)?;
    let unitaries: Vec<Matrix> =
        as_arr(field(v, "unitaries")?, "unitaries")?.iter().map(matrix_from_json).collect::<Result<_>>()?;
    let partitions: Vec<Partition> = as_arr(field(v, "partitions")?, "partitions")?
        .iter()
        .map(|p| Partition::new(d, from_serde(p)?))
        .collect::<Result<_>>()?;
    let s = 2 + group.alphabet_size();
    let mut delta: Vec<Option<Action>> = vec![None; states.len() * s];
    for e in as_arr(field(v, "delta")?, "delta")? {
        let c = as_usize(field(e, "state")?, "state")?;
        let g = as_usize(field(e, "symbol")?, "symbol")?;
        if c >= states.len() || g >= s {
            return Err(perr(format!("δ entry ({c}, {g}) out of range")));
        }
        let a = field(e, "action")?;
        let mv = |x: &Value| -> Result<i8> {
            let h = x.as_i64().ok_or_else(|| perr("move must be an integer"))?;
            if !(-1..=1).contains(&h) {
                return Err(perr(format!("head move {h} outside {{-1, 0, 1}}")));
            }
            Ok(h as i8)
        };
        let action = if let Some(u) = a.get("unitary") {
            Action::Unitary { unitary: as_usize(u, "unitary")?, next: as_usize(field(a, "next")?, "next")?, mv: mv(field(a, "move")?)? }
        } else {
            let partition = as_usize(field(a, "measure")?, "measure")?;
            let b = field(a, "branches")?.as_object().ok_or_else(|| perr("branches must be an object"))?;
            let mut branches = vec![(0usize, 0i8); b.len()];
            for (k, x) in b {
                let r: usize = k.parse().map_err(|_| perr(format!("bad result key {k:?}")))?;
                let pair = as_arr(x, "branch")?;
                if r >= branches.len() || pair.len() != 2 {
                    return Err(perr("malformed branch table"));
                }
                branches[r] = (as_usize(&pair[0], "branch state")?, mv(&pair[1])?);
            }
            Action::Measure { partition, branches }
        };
        delta[c * s + g] = Some(action);
    }
    let m = QcfaMachine {
        d,
        group,
        states,
        start: as_usize(field(v, "start")?, "start")?,
        accept: as_usize(field(v, "accept")?, "accept")?,
        reject: as_usize(field(v, "reject")?, "reject")?,
        unitaries,
        partitions,
        delta,
        structure: structure_from_json(field(v, "structure")?)?,
    };
    m.validate()?;
    Ok(m)
}

// ---------------------------------------------------------------------------
// reports

pub fn round_analysis_to_json(r: &RoundAnalysis) -> Value {
    json!({
        "p_acc": r.p_acc_f64(),
        "p_rej": r.p_rej_f64(),
        "p_halt": r.p_halt.to_f64(),
        "overall_accept": r.overall_accept_f64(),
        "overall_reject": r.overall_reject_f64(),
        "exact": r.p_acc.is_exact(),
        "p_acc_exact": r.p_acc.is_exact().then(|| r.p_acc.to_string()),
        "p_rej_exact": r.p_rej.is_exact().then(|| r.p_rej.to_string()),
        "round_pass": r.round_pass.iter().map(|p| p.to_f64()).collect::<Vec<_>>(),
        "steps_per_iteration": r.steps_per_iteration,
        "expected_iterations": r.expected_iterations,
        "expected_steps": r.expected_steps,
    })
}

pub fn gap_report_to_json(r: &GapScanReport, p: &Presentation) -> Value {
    json!({
        "dfr": r.dfr,
        "radius": r.radius,
        "elements": r.elements,
        "minima": r.minima,
        "witnesses": r.witnesses.iter().map(|w| w.as_ref().map(|w| p.format_word(w))).collect::<Vec<_>>(),
        "exp_base": r.exp_base,
        "poly": r.poly,
        "declared_ok": r.declared_ok,
        "witnesses_ok": r.witnesses_ok,
        "passed": r.passed,
    })
}

pub fn diophantine_to_json(r: &DiophantineReport) -> Value {
    serde_json::to_value(r).expect("report serializes")
}

pub fn runtime_fit_to_json(r: &RuntimeFit) -> Value {
    serde_json::to_value(r).expect("report serializes")
}

pub fn reconciliation_to_json(r: &Reconciliation) -> Value {
    serde_json::to_value(r).expect("report serializes")
}

pub fn stats_to_json(s: &AcceptanceStats) -> Value {
    serde_json::to_value(s).expect("stats serialize")
}

fn csv_string(header: &[&str], rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| perr(e.to_string()))?;
    for r in rows {
        w.write_record(&r).map_err(|e| perr(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| perr(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| perr(e.to_string()))
}

pub fn stats_to_csv(rows: &[(String, AcceptanceStats)]) -> Result<String> {
    csv_string(
        &["word", "trials", "accepts", "rejects", "step_limits", "accept_freq", "reject_freq", "mean_steps", "std_steps", "ci_low", "ci_high"],
        rows.iter()
            .map(|(w, s)| {
                vec![
                    w.clone(),
                    s.trials.to_string(),
                    s.accepts.to_string(),
                    s.rejects.to_string(),
                    s.step_limits.to_string(),
                    s.accept_freq.to_string(),
                    s.reject_freq.to_string(),
                    s.mean_steps.to_string(),
                    s.std_steps.to_string(),
                    s.accept_ci.0.to_string(),
                    s.accept_ci.1.to_string(),
                ]
            })
            .collect(),
    )
}

pub fn gap_report_to_csv(r: &GapScanReport, p: &Presentation) -> Result<String> {
    csv_string(
        &["n", "min_gap", "witness"],
        r.minima
            .iter()
            .zip(&r.witnesses)
            .enumerate()
            .map(|(n, (m, w))| {
                vec![
                    n.to_string(),
                    m.map(|x| x.to_string()).unwrap_or_default(),
                    w.as_ref().map(|w| p.format_word(w)).unwrap_or_default(),
                ]
            })
            .collect(),
    )
}

pub fn runtime_fit_to_csv(r: &RuntimeFit) -> Result<String> {
    csv_string(
        &["n", "expected_steps"],
        r.lengths.iter().zip(&r.expected_steps).map(|(n, s)| vec![n.to_string(), s.to_string()]).collect(),
    )
}

pub fn read_json(path: &Path) -> Result<Value> {
    let s = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&s)?)
}

pub fn write_json(path: &Path, v: &Value) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(v)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfr::{build_named_dfr, DfrSpec};
    use crate::machine::{assemble_exp_machine, assemble_poly_machine, build_mo1qfa, transform_overgroup};

    fn rt_dfr(f: &Dfr) {
        let v = dfr_to_json(f);
        let text = serde_json::to_string(&v).unwrap();
        let back = dfr_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(&back, f, "{}", f.name);
    }

    #[test]
    fn presentations_round_trip() {
        for p in [
            Presentation::trivial(),
            Presentation::z(),
            Presentation::free(2),
            Presentation::cyclic(5),
            Presentation::new(GroupFamily::AbelianMixed(1, vec![2, 4])).unwrap(),
            Presentation::new(GroupFamily::DirectProductOfFrees(vec![2, 1])).unwrap(),
            Presentation::new(GroupFamily::FreeProductZWithZr(2)).unwrap(),
            Presentation::z_over_2z(),
            Presentation::dinf_over_z(),
        ] {
            assert_eq!(presentation_from_json(&presentation_to_json(&p)).unwrap(), p);
        }
    }

    #[test]
    fn dfrs_round_trip() {
        rt_dfr(&build_named_dfr(&DfrSpec::F2).unwrap());
        rt_dfr(&build_named_dfr(&DfrSpec::Zm(5)).unwrap());
        rt_dfr(&build_named_dfr(&DfrSpec::ZNonAlgebraic { delta: 1.0 }).unwrap());
        rt_dfr(&build_named_dfr(&DfrSpec::ShalenZFreeZr { r: 2, alpha_radicand: 2 }).unwrap());
        let mut z = build_named_dfr(&DfrSpec::ZAlgebraic).unwrap();
        z.certify(10).unwrap();
        rt_dfr(&z);
    }

    #[test]
    fn machines_round_trip() {
        let mut z = build_named_dfr(&DfrSpec::ZAlgebraic).unwrap();
        z.certify(10).unwrap();
        let mut f2 = build_named_dfr(&DfrSpec::F2).unwrap();
        f2.certify(3).unwrap();
        let mz = assemble_poly_machine(&z, 0.125).unwrap();
        for m in [
            transform_overgroup(&mz, &Presentation::z_over_2z()).unwrap(),
            mz,
            assemble_exp_machine(&f2, 0.25).unwrap(),
            build_mo1qfa(&f2).unwrap(),
        ] {
            let text = serde_json::to_string(&machine_to_json(&m)).unwrap();
            let back = machine_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
            assert_eq!(back, m);
        }
    }

    #[test]
    fn stats_csv_has_header() {
        let s = AcceptanceStats {
            trials: 1,
            accepts: 1,
            rejects: 0,
            step_limits: 0,
            accept_freq: 1.0,
            reject_freq: 0.0,
            mean_steps: 3.0,
            std_steps: 0.0,
            accept_ci: (0.2, 1.0),
        };
        let c = stats_to_csv(&[("a,-a".into(), s)]).unwrap();
        assert!(c.starts_with("word,trials"));
        assert!(c.contains("\"a,-a\""));
    }
}
