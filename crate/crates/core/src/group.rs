//! Words, presentations of the supported group families, identity oracles, word
//! metrics, Cayley-ball enumeration and coset tables.

use std::cmp::Ordering;
use std::collections::{HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

/// A letter of `Σ = S ⊔ S⁻¹`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Gen {
    pub index: usize,
    pub inverse: bool,
}

impl Gen {
    pub fn pos(index: usize) -> Gen {
        Gen { index, inverse: false }
    }

    pub fn neg(index: usize) -> Gen {
        Gen { index, inverse: true }
    }

    pub fn inv(self) -> Gen {
        Gen { index: self.index, inverse: !self.inverse }
    }

    pub fn sign(self) -> i64 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    /// `±(index+1)`.
    pub fn signed(self) -> i64 {
        self.sign() * (self.index as i64 + 1)
    }

    pub fn from_signed(s: i64) -> Result<Gen> {
        if s == 0 {
            return Err(Error::Parse("generator code 0".into()));
        }
        Ok(Gen { index: (s.unsigned_abs() - 1) as usize, inverse: s < 0 })
    }

    /// Dense code `2·index + inverse`, used for tape symbols and tables.
    pub fn code(self) -> usize {
        2 * self.index + self.inverse as usize
    }

    pub fn from_code(c: usize) -> Gen {
        Gen { index: c / 2, inverse: c % 2 == 1 }
    }
}

impl PartialOrd for Gen {
    fn partial_cmp(&self, o: &Gen) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Gen {
    fn cmp(&self, o: &Gen) -> Ordering {
        self.code().cmp(&o.code())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<Gen>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn from_signed(codes: &[i64]) -> Result<Word> {
        codes.iter().map(|&c| Gen::from_signed(c)).collect::<Result<Vec<_>>>().map(Word)
    }

    pub fn to_signed(&self) -> Vec<i64> {
        self.0.iter().map(|g| g.signed()).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[Gen] {
        &self.0
    }

    pub fn concat(&self, o: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&o.0);
        Word(v)
    }

    /// Symbol-wise inverse in reverse order.
    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|g| g.inv()).collect())
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut v = Vec::new();
        for _ in 0..k.unsigned_abs() {
            v.extend_from_slice(&base.0);
        }
        Word(v)
    }

    pub fn gen_power(index: usize, k: i64) -> Word {
        let g = if k < 0 { Gen::neg(index) } else { Gen::pos(index) };
        Word(vec![g; k.unsigned_abs() as usize])
    }

    pub fn prepend(&self, g: Gen) -> Word {
        let mut v = Vec::with_capacity(self.len() + 1);
        v.push(g);
        v.extend_from_slice(&self.0);
        Word(v)
    }

    pub fn max_index(&self) -> Option<usize> {
        self.0.iter().map(|g| g.index).max()
    }

    /// Shortlex comparison used for canonical representatives.
    pub fn shortlex(&self, o: &Word) -> Ordering {
        self.len().cmp(&o.len()).then_with(|| self.0.cmp(&o.0))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.to_signed().iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", s.join(","))
    }
}

/// Free reduction over `rank` generators.
pub fn free_reduce(w: &Word, rank: usize) -> Result<Word> {
    let mut out: Vec<Gen> = Vec::with_capacity(w.len());
    for &g in &w.0 {
        if g.index >= rank {
            return Err(Error::SymbolRange { index: g.index, rank });
        }
        if out.last() == Some(&g.inv()) {
            out.pop();
        } else {
            out.push(g);
        }
    }
    Ok(Word(out))
}

/// Left-coset data of a finite-index subgroup `H ≤ G`: `σ g_j = g_{α(σ,j)} φ(β̂(σ,j))`.
/// Cosets are zero-based here; coset 0 is `H` itself (`g_1 = 1_G`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CosetTable {
    pub index: usize,
    pub g_generators: usize,
    /// `alpha[σ.code()][j]`
    pub alpha: Vec<Vec<usize>>,
    /// `beta_hat[σ.code()][j]`, words over the subgroup's alphabet
    pub beta_hat: Vec<Vec<Word>>,
}

impl CosetTable {
    pub fn alpha(&self, s: Gen, j: usize) -> usize {
        self.alpha[s.code()][j]
    }

    pub fn beta_hat(&self, s: Gen, j: usize) -> &Word {
        &self.beta_hat[s.code()][j]
    }

    pub fn max_beta_len(&self) -> usize {
        self.beta_hat.iter().flatten().map(Word::len).max().unwrap_or(0)
    }

    /// Rewrite a G-word right to left: returns the final coset and the subgroup word
    /// `ŵ` with `φ_G(w) = g_t φ_H(ŵ)`.
    pub fn rewrite(&self, w: &Word) -> (usize, Word) {
        let mut t = 0;
        let mut parts: Vec<&Word> = Vec::with_capacity(w.len());
        for &s in w.0.iter().rev() {
            parts.push(self.beta_hat(s, t));
            t = self.alpha(s, t);
        }
        let mut out = Vec::new();
        for p in parts.iter().rev() {
            out.extend_from_slice(&p.0);
        }
        (t, Word(out))
    }

    /// Validate shape, permutation property, inverse consistency and cocycle consistency.
    pub fn validate(&self, base: &Presentation) -> Result<()> {
        let n = 2 * self.g_generators;
        if self.alpha.len() != n || self.beta_hat.len() != n {
            return Err(Error::CosetTable("table rows do not match 2·|S_G|".into()));
        }
        for code in 0..n {
            let s = Gen::from_code(code);
            let row = &self.alpha[code];
            if row.len() != self.index || self.beta_hat[code].len() != self.index {
                return Err(Error::CosetTable(format!("row {code} has wrong length")));
            }
            let mut seen = vec![false; self.index];
            for &a in row {
                if a >= self.index || seen[a] {
                    return Err(Error::CosetTable(format!("α({}, ·) is not a permutation", s.signed())));
                }
                seen[a] = true;
            }
            for j in 0..self.index {
                let a = self.alpha(s, j);
                if self.alpha(s.inv(), a) != j {
                    return Err(Error::CosetTable(format!("α({}, α({}, {})) ≠ {}", -s.signed(), s.signed(), j + 1, j + 1)));
                }
                let b = self.beta_hat(s, j);
                if let Some(m) = b.max_index() {
                    if m >= base.generator_count() {
                        return Err(Error::CosetTable(format!("β̂({}, {}) uses a generator outside H", s.signed(), j + 1)));
                    }
                }
                let back = self.beta_hat(s.inv(), a).concat(b);
                if !base.is_identity(&back)? {
                    return Err(Error::CosetTable(format!(
                        "β̂({}, {}) is not inverse to β̂({}, {})",
                        -s.signed(),
                        a + 1,
                        s.signed(),
                        j + 1
                    )));
                }
            }
        }
        if base.generator_count() > self.g_generators {
            return Err(Error::CosetTable("G needs at least |S_H| generators".into()));
        }
        Ok(())
    }

    /// The trivial table for `H = G`.
    pub fn identity(rank: usize) -> CosetTable {
        let mut alpha = Vec::new();
        let mut beta = Vec::new();
        for code in 0..2 * rank {
            alpha.push(vec![0]);
            beta.push(vec![Word(vec![Gen::from_code(code)])]);
        }
        CosetTable { index: 1, g_generators: rank, alpha, beta_hat: beta }
    }

    /// `2ℤ ≤ ℤ` with `S_G = {h, a}`, `h = a²` generating `2ℤ`, `g_2 = a`.
    pub fn two_z_in_z() -> CosetTable {
        let h = Gen::pos(0);
        let e = Word::empty;
        let hw = || Word(vec![h]);
        let hi = || Word(vec![h.inv()]);
        // codes: 0 = h, 1 = h⁻¹, 2 = a, 3 = a⁻¹
        let alpha = vec![vec![0, 1], vec![0, 1], vec![1, 0], vec![1, 0]];
        let beta_hat = vec![vec![hw(), hw()], vec![hi(), hi()], vec![e(), hw()], vec![hi(), e()]];
        CosetTable { index: 2, g_generators: 2, alpha, beta_hat }
    }

    /// `ℤ = ⟨t⟩ ≤ D_∞ = ⟨t, s | s², (st)²⟩` with `g_2 = s`.
    pub fn z_in_dinf() -> CosetTable {
        let t = Gen::pos(0);
        let e = Word::empty;
        let tw = || Word(vec![t]);
        let ti = || Word(vec![t.inv()]);
        // codes: 0 = t, 1 = t⁻¹, 2 = s, 3 = s⁻¹ (= s)
        let alpha = vec![vec![0, 1], vec![0, 1], vec![1, 0], vec![1, 0]];
        let beta_hat = vec![vec![tw(), ti()], vec![ti(), tw()], vec![e(), e()], vec![e(), e()]];
        CosetTable { index: 2, g_generators: 2, alpha, beta_hat }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroupFamily {
    Trivial,
    CyclicFinite(u64),
    FreeAbelian(usize),
    /// `ℤ^r × ℤ_{m_1} × ⋯ × ℤ_{m_t}` with `m_i | m_{i+1}`, `m_i ≥ 2`.
    AbelianMixed(usize, Vec<u64>),
    Free(usize),
    DirectProductOfFrees(Vec<usize>),
    /// `ℤ * ℤ^r`; generator 0 is `y`, generators `1..=r` are `x_1..x_r`.
    FreeProductZWithZr(usize),
    VirtualOvergroup(Box<Presentation>, CosetTable),
}

impl GroupFamily {
    pub fn tag(&self) -> &'static str {
        match self {
            GroupFamily::Trivial => "trivial",
            GroupFamily::CyclicFinite(_) => "cyclic",
            GroupFamily::FreeAbelian(_) => "free_abelian",
            GroupFamily::AbelianMixed(..) => "abelian_mixed",
            GroupFamily::Free(_) => "free",
            GroupFamily::DirectProductOfFrees(_) => "direct_product_of_frees",
            GroupFamily::FreeProductZWithZr(_) => "free_product_z_zr",
            GroupFamily::VirtualOvergroup(..) => "virtual_overgroup",
        }
    }

    pub fn generator_count(&self) -> usize {
        match self {
            GroupFamily::Trivial => 0,
            GroupFamily::CyclicFinite(_) => 1,
            GroupFamily::FreeAbelian(r) | GroupFamily::Free(r) => *r,
            GroupFamily::AbelianMixed(r, ms) => r + ms.len(),
            GroupFamily::DirectProductOfFrees(rs) => rs.iter().sum(),
            GroupFamily::FreeProductZWithZr(r) => r + 1,
            GroupFamily::VirtualOvergroup(_, t) => t.g_generators,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            GroupFamily::CyclicFinite(m) if *m < 1 => Err(Error::Invalid("cyclic order must be ≥ 1".into())),
            GroupFamily::AbelianMixed(_, ms) => {
                for (i, &m) in ms.iter().enumerate() {
                    if m < 2 {
                        return Err(Error::Invalid(format!("torsion factor m_{} = {m} < 2", i + 1)));
                    }
                    if i + 1 < ms.len() && ms[i + 1] % m != 0 {
                        return Err(Error::Invalid(format!("m_{} = {m} does not divide m_{} = {}", i + 1, i + 2, ms[i + 1])));
                    }
                }
                Ok(())
            }
            GroupFamily::VirtualOvergroup(base, t) => t.validate(base),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Presentation {
    pub family: GroupFamily,
    pub labels: Vec<String>,
}

/// Normal form key: equal keys iff equal group elements.
pub type NormalForm = Vec<i64>;

pub const DEFAULT_BFS_RADIUS: usize = 10;
pub const DEFAULT_BALL_CAP: usize = 2_000_000;

fn default_labels(f: &GroupFamily) -> Vec<String> {
    match f {
        GroupFamily::Trivial => vec![],
        GroupFamily::CyclicFinite(_) => vec!["a".into()],
        GroupFamily::FreeAbelian(1) | GroupFamily::Free(1) => vec!["a".into()],
        GroupFamily::Free(2) => vec!["a".into(), "b".into()],
        GroupFamily::FreeAbelian(r) | GroupFamily::Free(r) => (1..=*r).map(|i| format!("a{i}")).collect(),
        GroupFamily::AbelianMixed(r, ms) => {
            let mut v: Vec<String> = (1..=*r).map(|i| format!("a{i}")).collect();
            v.extend((1..=ms.len()).map(|i| format!("c{i}")));
            v
        }
        GroupFamily::DirectProductOfFrees(rs) => {
            let mut v = Vec::new();
            for (f, &r) in rs.iter().enumerate() {
                for i in 1..=r {
                    v.push(format!("f{}_{}", f + 1, i));
                }
            }
            v
        }
        GroupFamily::FreeProductZWithZr(r) => {
            let mut v = vec!["y".to_string()];
            v.extend((1..=*r).map(|i| format!("x{i}")));
            v
        }
        GroupFamily::VirtualOvergroup(base, t) => {
            let mut v = base.labels.clone();
            v.extend((base.generator_count()..t.g_generators).map(|i| format!("g{}", i - base.generator_count() + 2)));
            v
        }
    }
}

impl Presentation {
    pub fn new(family: GroupFamily) -> Result<Presentation> {
        family.validate()?;
        let labels = default_labels(&family);
        Ok(Presentation { family, labels })
    }

    pub fn with_labels(family: GroupFamily, labels: Vec<String>) -> Result<Presentation> {
        family.validate()?;
        if labels.len() != family.generator_count() {
            return Err(Error::Invalid(format!("{} labels for {} generators", labels.len(), family.generator_count())));
        }
        Ok(Presentation { family, labels })
    }

    pub fn trivial() -> Presentation {
        Presentation::new(GroupFamily::Trivial).unwrap()
    }

    pub fn z() -> Presentation {
        Presentation::new(GroupFamily::FreeAbelian(1)).unwrap()
    }

    pub fn free(r: usize) -> Presentation {
        Presentation::new(GroupFamily::Free(r)).unwrap()
    }

    pub fn free_abelian(r: usize) -> Presentation {
        Presentation::new(GroupFamily::FreeAbelian(r)).unwrap()
    }

    pub fn cyclic(m: u64) -> Presentation {
        Presentation::new(GroupFamily::CyclicFinite(m)).unwrap()
    }

    /// `ℤ` presented as the overgroup of `2ℤ = ⟨h⟩` with generators `{h, a}`.
    pub fn z_over_2z() -> Presentation {
        let base = Presentation::with_labels(GroupFamily::FreeAbelian(1), vec!["h".into()]).unwrap();
        Presentation::with_labels(
            GroupFamily::VirtualOvergroup(Box::new(base), CosetTable::two_z_in_z()),
            vec!["h".into(), "a".into()],
        )
        .unwrap()
    }

    /// The infinite dihedral group as the overgroup of `⟨t⟩` with generators `{t, s}`.
    pub fn dinf_over_z() -> Presentation {
        let base = Presentation::with_labels(GroupFamily::FreeAbelian(1), vec!["t".into()]).unwrap();
        Presentation::with_labels(
            GroupFamily::VirtualOvergroup(Box::new(base), CosetTable::z_in_dinf()),
            vec!["t".into(), "s".into()],
        )
        .unwrap()
    }

    pub fn generator_count(&self) -> usize {
        self.family.generator_count()
    }

    pub fn alphabet_size(&self) -> usize {
        2 * self.generator_count()
    }

    pub fn check_word(&self, w: &Word) -> Result<()> {
        let rank = self.generator_count();
        for g in &w.0 {
            if g.index >= rank {
                return Err(Error::SymbolRange { index: g.index, rank });
            }
        }
        Ok(())
    }

    /// Every word over the alphabet of length exactly `n`, in lexicographic code order.
    pub fn all_words(&self, n: usize) -> Vec<Word> {
        let a = self.alphabet_size();
        if a == 0 {
            return if n == 0 { vec![Word::empty()] } else { vec![] };
        }
        let total = a.pow(n as u32);
        let mut out = Vec::with_capacity(total);
        for mut idx in 0..total {
            let mut v = vec![Gen::pos(0); n];
            for k in (0..n).rev() {
                v[k] = Gen::from_code(idx % a);
                idx /= a;
            }
            out.push(Word(v));
        }
        out
    }

    pub fn normal_form(&self, w: &Word) -> Result<NormalForm> {
        self.check_word(w)?;
        Ok(match &self.family {
            GroupFamily::Trivial => vec![],
            GroupFamily::CyclicFinite(m) => {
                let s: i64 = w.0.iter().map(|g| g.sign()).sum();
                vec![s.rem_euclid(*m as i64)]
            }
            GroupFamily::FreeAbelian(r) => exponent_vector(w, *r),
            GroupFamily::AbelianMixed(r, ms) => {
                let mut v = exponent_vector(w, r + ms.len());
                for (i, &m) in ms.iter().enumerate() {
                    v[r + i] = v[r + i].rem_euclid(m as i64);
                }
                v
            }
            GroupFamily::Free(r) => free_reduce(w, *r)?.to_signed(),
            GroupFamily::DirectProductOfFrees(rs) => {
                let mut out = Vec::new();
                let mut offset = 0;
                for &r in rs {
                    let sub: Vec<Gen> = w.0.iter().filter(|g| g.index >= offset && g.index < offset + r).cloned().collect();
                    out.extend(free_reduce(&Word(sub), offset + r)?.to_signed());
                    out.push(0);
                    offset += r;
                }
                out
            }
            GroupFamily::FreeProductZWithZr(r) => {
                let syl = free_product_syllables(w, *r);
                let mut out = Vec::new();
                for s in syl {
                    match s {
                        Syllable::Y(k) => {
                            out.push(i64::MIN);
                            out.push(k);
                        }
                        Syllable::X(v) => {
                            out.push(i64::MAX);
                            out.extend(v);
                        }
                    }
                }
                out
            }
            GroupFamily::VirtualOvergroup(base, table) => {
                let (t, h) = table.rewrite(w);
                let mut out = vec![t as i64];
                out.extend(base.normal_form(&h)?);
                out
            }
        })
    }

    pub fn is_identity(&self, w: &Word) -> Result<bool> {
        match &self.family {
            GroupFamily::VirtualOvergroup(base, table) => {
                self.check_word(w)?;
                let (t, h) = table.rewrite(w);
                Ok(t == 0 && base.is_identity(&h)?)
            }
            _ => {
                let nf = self.normal_form(w)?;
                Ok(match &self.family {
                    GroupFamily::Trivial => true,
                    GroupFamily::DirectProductOfFrees(_) => nf.iter().all(|&x| x == 0),
                    _ => nf.iter().all(|&x| x == 0),
                })
            }
        }
    }

    /// Word-metric length of the element represented by `w`.
    pub fn word_length(&self, w: &Word) -> Result<usize> {
        self.word_length_within(w, DEFAULT_BFS_RADIUS)
    }

    pub fn word_length_within(&self, w: &Word, radius: usize) -> Result<usize> {
        self.check_word(w)?;
        Ok(match &self.family {
            GroupFamily::Trivial => 0,
            GroupFamily::CyclicFinite(m) => {
                let v = self.normal_form(w)?[0];
                v.min(*m as i64 - v) as usize
            }
            GroupFamily::FreeAbelian(_) => self.normal_form(w)?.iter().map(|x| x.unsigned_abs() as usize).sum(),
            GroupFamily::AbelianMixed(r, ms) => {
                let v = self.normal_form(w)?;
                let free: usize = v[..*r].iter().map(|x| x.unsigned_abs() as usize).sum();
                let tors: usize = ms.iter().enumerate().map(|(i, &m)| (v[r + i].min(m as i64 - v[r + i])) as usize).sum();
                free + tors
            }
            GroupFamily::Free(r) => free_reduce(w, *r)?.len(),
            GroupFamily::DirectProductOfFrees(_) => self.normal_form(w)?.iter().filter(|&&x| x != 0).count(),
            GroupFamily::FreeProductZWithZr(r) => free_product_syllables(w, *r)
                .iter()
                .map(|s| match s {
                    Syllable::Y(k) => k.unsigned_abs() as usize,
                    Syllable::X(v) => v.iter().map(|x| x.unsigned_abs() as usize).sum(),
                })
                .sum(),
            GroupFamily::VirtualOvergroup(..) => {
                let target = self.normal_form(w)?;
                let ball = self.enumerate_ball_with_cap(radius, DEFAULT_BALL_CAP)?;
                for (word, len) in &ball {
                    if self.normal_form(word)? == target {
                        return Ok(*len);
                    }
                }
                return Err(Error::RadiusExceeded(radius));
            }
        })
    }

    pub fn enumerate_ball(&self, n: usize) -> Result<Vec<(Word, usize)>> {
        self.enumerate_ball_with_cap(n, DEFAULT_BALL_CAP)
    }

    /// One shortlex-minimal representative per element of `B(n)` with its length,
    /// sorted by (length, shortlex).
    pub fn enumerate_ball_with_cap(&self, n: usize, cap: usize) -> Result<Vec<(Word, usize)>> {
        let a = self.alphabet_size();
        let mut seen: HashMap<NormalForm, usize> = HashMap::new();
        let mut out: Vec<(Word, usize)> = vec![(Word::empty(), 0)];
        seen.insert(self.normal_form(&Word::empty())?, 0);
        let mut frontier = vec![Word::empty()];
        for len in 1..=n {
            let mut next: Vec<Word> = Vec::new();
            for w in &frontier {
                // right multiplication keeps the first-found representative shortlex-minimal
                for code in 0..a {
                    let mut v = w.0.clone();
                    v.push(Gen::from_code(code));
                    let nw = Word(v);
                    let nf = self.normal_form(&nw)?;
                    if seen.contains_key(&nf) {
                        continue;
                    }
                    seen.insert(nf, len);
                    next.push(nw.clone());
                    out.push((nw, len));
                    if out.len() > cap {
                        return Err(Error::CapExceeded(cap));
                    }
                }
            }
            next.sort();
            frontier = next;
            if frontier.is_empty() {
                break;
            }
        }
        out.sort_by(|x, y| x.1.cmp(&y.1).then_with(|| x.0.cmp(&y.0)));
        Ok(out)
    }

    /// Canonical (shortlex-least) representative within radius `n`, if any.
    pub fn canonical_within(&self, w: &Word, n: usize) -> Result<Option<Word>> {
        let target = self.normal_form(w)?;
        for (word, _) in self.enumerate_ball(n)? {
            if self.normal_form(&word)? == target {
                return Ok(Some(word));
            }
        }
        Ok(None)
    }

    pub fn parse_word(&self, s: &str) -> Result<Word> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Word::empty());
        }
        let mut out = Vec::new();
        for tok in s.split(',') {
            let tok = tok.trim();
            let (inv, name) = match tok.strip_prefix('-') {
                Some(n) => (true, n),
                None => (false, tok),
            };
            let idx = self
                .labels
                .iter()
                .position(|l| l == name)
                .ok_or_else(|| Error::Parse(format!("unknown generator {name:?}; known: {}", self.labels.join(","))))?;
            out.push(Gen { index: idx, inverse: inv });
        }
        Ok(Word(out))
    }

    pub fn format_word(&self, w: &Word) -> String {
        w.0.iter()
            .map(|g| {
                let name = self.labels.get(g.index).cloned().unwrap_or_else(|| format!("g{}", g.index + 1));
                if g.inverse {
                    format!("-{name}")
                } else {
                    name
                }
            })
            .collect::<Vec<_>>()
            .join(",")
    }
}

fn exponent_vector(w: &Word, n: usize) -> Vec<i64> {
    let mut v = vec![0i64; n];
    for g in &w.0 {
        v[g.index] += g.sign();
    }
    v
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Syllable {
    Y(i64),
    X(Vec<i64>),
}

fn free_product_syllables(w: &Word, r: usize) -> Vec<Syllable> {
    let mut st: Vec<Syllable> = Vec::new();
    for g in &w.0 {
        if g.index == 0 {
            match st.last_mut() {
                Some(Syllable::Y(k)) => {
                    *k += g.sign();
                    if *k == 0 {
                        st.pop();
                    }
                }
                _ => st.push(Syllable::Y(g.sign())),
            }
        } else {
            match st.last_mut() {
                Some(Syllable::X(v)) => {
                    v[g.index - 1] += g.sign();
                    if v.iter().all(|&x| x == 0) {
                        st.pop();
                    }
                }
                _ => {
                    let mut v = vec![0; r];
                    v[g.index - 1] = g.sign();
                    st.push(Syllable::X(v));
                }
            }
        }
    }
    st
}

/// Presentation of `G × H` with generators `S_G ⊔ S_H`, when it is one of the supported families.
pub fn direct_product(g: &Presentation, h: &Presentation) -> Result<Presentation> {
    use GroupFamily::*;
    let labels = {
        let mut l: Vec<String> = g.labels.iter().map(|s| format!("{s}_1")).collect();
        l.extend(h.labels.iter().map(|s| format!("{s}_2")));
        l
    };
    let fam = match (&g.family, &h.family) {
        (Trivial, _) => return Ok(h.clone()),
        (_, Trivial) => return Ok(g.clone()),
        (Free(a), Free(b)) => DirectProductOfFrees(vec![*a, *b]),
        (DirectProductOfFrees(a), Free(b)) => DirectProductOfFrees([a.clone(), vec![*b]].concat()),
        (Free(a), DirectProductOfFrees(b)) => DirectProductOfFrees([vec![*a], b.clone()].concat()),
        (DirectProductOfFrees(a), DirectProductOfFrees(b)) => DirectProductOfFrees([a.clone(), b.clone()].concat()),
        (x, y) => {
            let (r1, t1) = abelian_parts(x).ok_or_else(|| Error::Unsupported(format!("{} × {}", x.tag(), y.tag())))?;
            let (r2, t2) = abelian_parts(y).ok_or_else(|| Error::Unsupported(format!("{} × {}", x.tag(), y.tag())))?;
            if !t1.is_empty() && r2 > 0 {
                return Err(Error::Unsupported("product would interleave torsion and free generators".into()));
            }
            let ms = [t1, t2].concat();
            if ms.is_empty() {
                FreeAbelian(r1 + r2)
            } else {
                AbelianMixed(r1 + r2, ms)
            }
        }
    };
    Presentation::with_labels(fam, labels)
}

fn abelian_parts(f: &GroupFamily) -> Option<(usize, Vec<u64>)> {
    match f {
        GroupFamily::FreeAbelian(r) => Some((*r, vec![])),
        GroupFamily::CyclicFinite(m) => Some((0, vec![*m])),
        GroupFamily::AbelianMixed(r, ms) => Some((*r, ms.clone())),
        _ => None,
    }
}

/// Independent breadth-first distances over the Cayley graph, keyed by normal form.
/// Used to cross-check `word_length` and `enumerate_ball`.
pub fn bfs_distances(p: &Presentation, n: usize) -> Result<HashMap<NormalForm, usize>> {
    let mut dist = HashMap::new();
    let mut q = VecDeque::new();
    dist.insert(p.normal_form(&Word::empty())?, 0);
    q.push_back((Word::empty(), 0usize));
    while let Some((w, d)) = q.pop_front() {
        if d == n {
            continue;
        }
        for code in 0..p.alphabet_size() {
            let nw = w.prepend(Gen::from_code(code));
            let nf = p.normal_form(&nw)?;
            if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(nf) {
                e.insert(d + 1);
                q.push_back((nw, d + 1));
            }
        }
    }
    Ok(dist)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(p: &Presentation, s: &str) -> Word {
        p.parse_word(s).unwrap()
    }

    #[test]
    fn free_reduce_examples() {
        let f2 = Presentation::free(2);
        assert!(free_reduce(&w(&f2, "a,-a"), 2).unwrap().is_empty());
        assert_eq!(free_reduce(&w(&f2, "a,b,-b,a"), 2).unwrap(), w(&f2, "a,a"));
        assert!(matches!(free_reduce(&Word(vec![Gen::pos(2)]), 2), Err(Error::SymbolRange { .. })));
    }

    #[test]
    fn identity_examples() {
        let z = Presentation::z();
        assert!(z.is_identity(&w(&z, "a,-a")).unwrap());
        assert!(!z.is_identity(&w(&z, "a")).unwrap());
        let f2 = Presentation::free(2);
        assert!(!f2.is_identity(&w(&f2, "a,b,-a,-b")).unwrap());
        let z4 = Presentation::cyclic(4);
        assert!(z4.is_identity(&w(&z4, "a,a,a,a")).unwrap());
    }

    #[test]
    fn length_examples() {
        let f2 = Presentation::free(2);
        assert_eq!(f2.word_length(&w(&f2, "a,b,-b")).unwrap(), 1);
        let z2 = Presentation::free_abelian(2);
        assert_eq!(z2.word_length(&w(&z2, "a1,a2,a1")).unwrap(), 3);
        let z5 = Presentation::cyclic(5);
        assert_eq!(z5.word_length(&w(&z5, "a,a,a,a")).unwrap(), 1);
    }

    #[test]
    fn ball_sizes() {
        assert_eq!(Presentation::free(2).enumerate_ball(2).unwrap().len(), 17);
        assert_eq!(Presentation::free(2).enumerate_ball(3).unwrap().len(), 53);
        assert_eq!(Presentation::trivial().enumerate_ball(5).unwrap().len(), 1);
        assert_eq!(Presentation::z().enumerate_ball(3).unwrap().len(), 7);
    }

    #[test]
    fn coset_tables_validate() {
        let z = Presentation::z_over_2z();
        let d = Presentation::dinf_over_z();
        for p in [&z, &d] {
            if let GroupFamily::VirtualOvergroup(base, t) = &p.family {
                t.validate(base).unwrap();
            }
        }
        assert!(d.is_identity(&w(&d, "s,s")).unwrap());
        assert!(d.is_identity(&w(&d, "t,s,t,s")).unwrap());
        assert!(!d.is_identity(&w(&d, "t")).unwrap());
        assert!(!d.is_identity(&w(&d, "s")).unwrap());
        assert!(z.is_identity(&w(&z, "a,a,-h")).unwrap());
        assert!(!z.is_identity(&w(&z, "a,h")).unwrap());
    }

    #[test]
    fn bad_table_rejected() {
        let mut t = CosetTable::two_z_in_z();
        t.alpha[2] = vec![0, 0];
        let base = Presentation::with_labels(GroupFamily::FreeAbelian(1), vec!["h".into()]).unwrap();
        assert!(t.validate(&base).is_err());
    }

    #[test]
    fn products() {
        let p = direct_product(&Presentation::z(), &Presentation::z()).unwrap();
        assert_eq!(p.family, GroupFamily::FreeAbelian(2));
        let q = direct_product(&Presentation::free(2), &Presentation::free(3)).unwrap();
        assert_eq!(q.family, GroupFamily::DirectProductOfFrees(vec![2, 3]));
        assert!(direct_product(&Presentation::cyclic(2), &Presentation::z()).is_err());
    }

    #[test]
    fn mixed_abelian_validation() {
        assert!(Presentation::new(GroupFamily::AbelianMixed(1, vec![2, 4])).is_ok());
        assert!(Presentation::new(GroupFamily::AbelianMixed(1, vec![2, 3])).is_err());
        assert!(Presentation::new(GroupFamily::AbelianMixed(0, vec![1])).is_err());
    }
}
