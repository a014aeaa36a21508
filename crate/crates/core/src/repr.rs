//! Finite-dimensional unitary (and projective) representations of presented groups.

use crate::error::{Error, Result};
use crate::group::{CosetTable, Gen, GroupFamily, Presentation, Word};
use crate::linalg::Matrix;
use crate::scalar::{AmplitudeClass, Scalar, Tolerance};

#[derive(Clone, Debug)]
pub struct UnitaryRep {
    pub group: Presentation,
    pub dim: usize,
    images: Vec<Matrix>,
    inverses: Vec<Matrix>,
    pub projective: bool,
    /// Per generator, factors `Y_1..Y_t` whose product is the image.
    pub factorizations: Option<Vec<Vec<Matrix>>>,
}

impl PartialEq for UnitaryRep {
    fn eq(&self, o: &UnitaryRep) -> bool {
        self.group == o.group
            && self.dim == o.dim
            && self.images == o.images
            && self.projective == o.projective
            && self.factorizations == o.factorizations
    }
}

impl UnitaryRep {
    pub fn new(group: Presentation, images: Vec<Matrix>, projective: bool) -> Result<UnitaryRep> {
        if images.len() != group.generator_count() {
            return Err(Error::Alphabet(format!(
                "{} images for {} generators",
                images.len(),
                group.generator_count()
            )));
        }
        let dim = images.first().map(Matrix::dim).unwrap_or(1);
        let tol = Tolerance::default();
        for (i, m) in images.iter().enumerate() {
            if m.dim() != dim {
                return Err(Error::Dimension(format!("image {} has dimension {}, expected {dim}", i + 1, m.dim())));
            }
            if !m.is_unitary(&tol) {
                return Err(Error::Invalid(format!("image of generator {} is not unitary", i + 1)));
            }
        }
        let inverses = images.iter().map(Matrix::adjoint).collect();
        Ok(UnitaryRep { group, dim, images, inverses, projective, factorizations: None })
    }

    /// The trivial representation `1_d`.
    pub fn trivial(group: Presentation, dim: usize) -> UnitaryRep {
        let n = group.generator_count();
        UnitaryRep {
            group,
            dim,
            images: vec![Matrix::identity(dim); n],
            inverses: vec![Matrix::identity(dim); n],
            projective: false,
            factorizations: None,
        }
    }

    pub fn with_factorizations(mut self, f: Vec<Vec<Matrix>>) -> Result<UnitaryRep> {
        if f.len() != self.images.len() {
            return Err(Error::Alphabet("one factorization per generator required".into()));
        }
        let tol = Tolerance::default();
        for (i, fs) in f.iter().enumerate() {
            let p = Matrix::product(self.dim, fs)?;
            if !p.approx_eq(&self.images[i], &tol) {
                return Err(Error::Invalid(format!("factorization of generator {} does not multiply out", i + 1)));
            }
        }
        self.factorizations = Some(f);
        Ok(self)
    }

    pub fn images(&self) -> &[Matrix] {
        &self.images
    }

    pub fn image(&self, g: Gen) -> &Matrix {
        if g.inverse {
            &self.inverses[g.index]
        } else {
            &self.images[g.index]
        }
    }

    pub fn amplitude_class(&self) -> AmplitudeClass {
        let mut c = self.images.iter().fold(AmplitudeClass::AlgebraicExact, |c, m| c.join(m.class()));
        if let Some(f) = &self.factorizations {
            // factorized images only need their factors to lie in the class
            c = f.iter().flatten().fold(AmplitudeClass::AlgebraicExact, |c, m| c.join(m.class()));
        }
        c
    }

    pub fn is_exact(&self) -> bool {
        self.images.iter().all(Matrix::is_exact)
    }

    pub fn is_diagonal(&self) -> bool {
        self.images.iter().all(Matrix::is_diagonal)
    }

    /// `ρ(w_1)ρ(w_2)⋯ρ(w_n)`.
    pub fn eval(&self, w: &Word) -> Result<Matrix> {
        self.group.check_word(w)?;
        if w.is_empty() {
            return Ok(Matrix::identity(self.dim));
        }
        let mut acc = self.image(w.0[0]).clone();
        for &g in &w.0[1..] {
            acc = acc.mul(self.image(g))?;
        }
        Ok(acc)
    }

    pub fn character(&self, w: &Word) -> Result<Scalar> {
        Ok(self.eval(w)?.trace())
    }

    pub fn character_magnitude(&self, w: &Word) -> Result<f64> {
        Ok(self.dim as f64 - self.gap(w)?)
    }

    /// `d − |χ(w)|`, evaluated as `(d² − |χ|²)/(d + |χ|)` so the subtraction happens
    /// in the scalar backend rather than in f64.
    pub fn gap(&self, w: &Word) -> Result<f64> {
        Ok(gap_from_trace(&self.character(w)?, self.dim))
    }

    pub fn quasikernel_test(&self, w: &Word) -> Result<bool> {
        let tr = self.character(w)?;
        let d = self.dim as i64;
        let diff = Scalar::int(d * d).sub(&tr.abs2());
        if diff.is_exact() {
            return Ok(diff.is_exact_zero());
        }
        let tol = Tolerance::for_precision(diff.precision().unwrap_or(crate::scalar::DEFAULT_PRECISION));
        Ok(diff.to_f64().abs() <= tol.eps_num)
    }

    pub fn to_precision(&self, p: usize) -> UnitaryRep {
        let conv = |m: &Matrix| {
            if m.is_exact() {
                m.clone()
            } else {
                Matrix::from_vec(m.dim(), m.entries().iter().map(|s| Scalar::Float(s.to_cf(p))).collect()).with_class(m.class())
            }
        };
        UnitaryRep {
            group: self.group.clone(),
            dim: self.dim,
            images: self.images.iter().map(conv).collect(),
            inverses: self.inverses.iter().map(conv).collect(),
            projective: self.projective,
            factorizations: self.factorizations.as_ref().map(|f| f.iter().map(|v| v.iter().map(conv).collect()).collect()),
        }
    }
}

pub fn gap_from_trace(tr: &Scalar, d: usize) -> f64 {
    let a2 = tr.abs2();
    let diff = Scalar::int((d * d) as i64).sub(&a2).to_f64();
    let mag = a2.to_f64().max(0.0).sqrt();
    diff / (d as f64 + mag)
}

fn same_group(a: &UnitaryRep, b: &UnitaryRep) -> Result<()> {
    if a.group != b.group {
        return Err(Error::Alphabet("representations of different presentations".into()));
    }
    Ok(())
}

pub fn direct_sum(a: &UnitaryRep, b: &UnitaryRep) -> Result<UnitaryRep> {
    same_group(a, b)?;
    let images: Vec<Matrix> = a.images.iter().zip(&b.images).map(|(x, y)| x.direct_sum(y)).collect();
    let inverses = a.inverses.iter().zip(&b.inverses).map(|(x, y)| x.direct_sum(y)).collect();
    Ok(UnitaryRep {
        group: a.group.clone(),
        dim: a.dim + b.dim,
        images,
        inverses,
        projective: a.projective || b.projective,
        factorizations: None,
    })
}

/// `ρ ⊕ 1_{d′−d}`.
pub fn pad(r: &UnitaryRep, d: usize) -> Result<UnitaryRep> {
    if d < r.dim {
        return Err(Error::Dimension(format!("cannot pad dimension {} down to {d}", r.dim)));
    }
    if d == r.dim {
        return Ok(r.clone());
    }
    let mut out = direct_sum(r, &UnitaryRep::trivial(r.group.clone(), d - r.dim))?;
    out.factorizations = r.factorizations.as_ref().map(|f| {
        f.iter().map(|fs| fs.iter().map(|m| m.direct_sum(&Matrix::identity(d - r.dim))).collect()).collect()
    });
    Ok(out)
}

/// Restriction along `h_i ↦ embedding[i]` (words over the source group).
pub fn restrict(r: &UnitaryRep, target: Presentation, embedding: &[Word]) -> Result<UnitaryRep> {
    if embedding.len() != target.generator_count() {
        return Err(Error::Alphabet(format!(
            "{} embedding words for {} generators",
            embedding.len(),
            target.generator_count()
        )));
    }
    let images = embedding.iter().map(|w| r.eval(w)).collect::<Result<Vec<_>>>()?;
    let inverses = images.iter().map(Matrix::adjoint).collect();
    Ok(UnitaryRep { group: target, dim: r.dim, images, inverses, projective: r.projective, factorizations: None })
}

/// Extend a representation of one factor to a product whose generators are
/// `[0, offset) ⊔ [offset, offset+n) ⊔ …`; other generators act trivially.
pub fn extend_to_product(r: &UnitaryRep, product: Presentation, offset: usize) -> Result<UnitaryRep> {
    let n = product.generator_count();
    if offset + r.images.len() > n {
        return Err(Error::Alphabet("factor does not fit inside the product".into()));
    }
    let mut images = vec![Matrix::identity(r.dim); n];
    let mut inverses = vec![Matrix::identity(r.dim); n];
    for i in 0..r.images.len() {
        images[offset + i] = r.images[i].clone();
        inverses[offset + i] = r.inverses[i].clone();
    }
    let factorizations = r.factorizations.as_ref().map(|f| {
        let mut all = vec![vec![Matrix::identity(r.dim)]; n];
        for (i, fs) in f.iter().enumerate() {
            all[offset + i] = fs.clone();
        }
        all
    });
    Ok(UnitaryRep { group: product, dim: r.dim, images, inverses, projective: r.projective, factorizations })
}

/// `Ind_H^G π`: block column `j` of `σ`'s image holds `π(β̂(σ,j))` in block row `α(σ,j)`.
pub fn induce(pi: &UnitaryRep, overgroup: &Presentation) -> Result<UnitaryRep> {
    let (base, table) = match &overgroup.family {
        GroupFamily::VirtualOvergroup(base, table) => (base.as_ref(), table),
        _ => return Err(Error::CosetTable("induction needs a virtual-overgroup presentation".into())),
    };
    if *base != pi.group {
        return Err(Error::CosetTable("coset table base differs from the representation's group".into()));
    }
    let images = (0..table.g_generators).map(|i| induced_image(pi, table, Gen::pos(i))).collect::<Result<Vec<_>>>()?;
    let inverses = (0..table.g_generators).map(|i| induced_image(pi, table, Gen::neg(i))).collect::<Result<Vec<_>>>()?;
    Ok(UnitaryRep {
        group: overgroup.clone(),
        dim: pi.dim * table.index,
        images,
        inverses,
        projective: pi.projective,
        factorizations: None,
    })
}

fn induced_image(pi: &UnitaryRep, t: &CosetTable, s: Gen) -> Result<Matrix> {
    let r = t.index;
    let mut grid: Vec<Vec<Option<Matrix>>> = vec![vec![None; r]; r];
    for j in 0..r {
        grid[t.alpha(s, j)][j] = Some(pi.eval(t.beta_hat(s, j))?);
    }
    Ok(Matrix::from_blocks(pi.dim, &grid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Q;

    fn g(a: i64, b: i64, d: i64) -> Scalar {
        Scalar::gaussian(Q::frac(a, d), Q::frac(b, d))
    }

    fn gamma() -> UnitaryRep {
        UnitaryRep::new(Presentation::z(), vec![Matrix::diag(vec![g(3, 4, 5), Scalar::one()])], false).unwrap()
    }

    #[test]
    fn eval_and_character() {
        let r = gamma();
        let z = Presentation::z();
        assert_eq!(r.eval(&Word::empty()).unwrap(), Matrix::identity(2));
        assert!(r.quasikernel_test(&z.parse_word("a,-a").unwrap()).unwrap());
        assert!(!r.quasikernel_test(&z.parse_word("a").unwrap()).unwrap());
        let m = r.character_magnitude(&z.parse_word("a").unwrap()).unwrap();
        assert!((m - 4.0 / 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn restrict_to_even() {
        let r = gamma();
        let h = Presentation::with_labels(GroupFamily::FreeAbelian(1), vec!["h".into()]).unwrap();
        let res = restrict(&r, h, &[Word::gen_power(0, 2)]).unwrap();
        assert_eq!(res.images()[0], Matrix::diag(vec![g(-7, 24, 25), Scalar::one()]));
    }

    #[test]
    fn induce_two_z() {
        let z = Presentation::z_over_2z();
        let base = match &z.family {
            GroupFamily::VirtualOvergroup(b, _) => b.as_ref().clone(),
            _ => unreachable!(),
        };
        let pi = UnitaryRep::new(base, vec![Matrix::diag(vec![g(3, 4, 5), Scalar::one()])], false).unwrap();
        let ind = induce(&pi, &z).unwrap();
        assert_eq!(ind.dim, 4);
        let a = &ind.images()[1];
        // block column 1 → block row 2 holds I₂; block column 2 → block row 1 holds π(h)
        assert_eq!(a.get(2, 0), &Scalar::one());
        assert_eq!(a.get(3, 1), &Scalar::one());
        assert_eq!(a.get(0, 2), &g(3, 4, 5));
        assert_eq!(a.get(1, 3), &Scalar::one());
        // the overgroup relation a² = h holds
        let w = z.parse_word("a,a,-h").unwrap();
        assert!(ind.eval(&w).unwrap().is_identity(&Tolerance::default()));
    }

    #[test]
    fn pad_adds_trivial_block() {
        let r = UnitaryRep::new(Presentation::z(), vec![Matrix::diag(vec![g(3, 4, 5)])], false).unwrap();
        assert_eq!(pad(&r, 2).unwrap(), gamma());
    }
}
