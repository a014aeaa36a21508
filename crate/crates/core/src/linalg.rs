//! Small dense complex matrices, state vectors and computational-basis measurements.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{AmplitudeClass, Scalar, Tolerance, DEFAULT_PRECISION, Q, QE};

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<Scalar>,
    class: AmplitudeClass,
}

fn class_of(entries: &[Scalar]) -> AmplitudeClass {
    if entries.iter().all(Scalar::is_exact) {
        AmplitudeClass::AlgebraicExact
    } else {
        AmplitudeClass::AlgebraicNumeric
    }
}

impl Matrix {
    pub fn from_vec(dim: usize, data: Vec<Scalar>) -> Matrix {
        assert_eq!(data.len(), dim * dim, "matrix data length");
        let class = class_of(&data);
        Matrix { dim, data, class }
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Matrix {
        let dim = rows.len();
        let data: Vec<Scalar> = rows.into_iter().flat_map(|r| {
            assert_eq!(r.len(), dim, "non-square matrix");
            r
        }).collect();
        Matrix::from_vec(dim, data)
    }

    pub fn identity(dim: usize) -> Matrix {
        let mut data = vec![Scalar::zero(); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Scalar::one();
        }
        Matrix { dim, data, class: AmplitudeClass::AlgebraicExact }
    }

    pub fn diag(entries: Vec<Scalar>) -> Matrix {
        let dim = entries.len();
        let mut data = vec![Scalar::zero(); dim * dim];
        for (i, e) in entries.into_iter().enumerate() {
            data[i * dim + i] = e;
        }
        Matrix::from_vec(dim, data)
    }

    pub fn with_class(mut self, class: AmplitudeClass) -> Matrix {
        self.class = self.class.join(class);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn class(&self) -> AmplitudeClass {
        self.class
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.dim + c]
    }

    pub fn is_exact(&self) -> bool {
        self.data.iter().all(Scalar::is_exact)
    }

    pub fn mul(&self, o: &Matrix) -> Result<Matrix> {
        if self.dim != o.dim {
            return Err(Error::Dimension(format!("mat_mul {} x {}", self.dim, o.dim)));
        }
        let d = self.dim;
        let mut data = Vec::with_capacity(d * d);
        for r in 0..d {
            for c in 0..d {
                let mut acc = Scalar::zero();
                for k in 0..d {
                    let a = &self.data[r * d + k];
                    if a.is_exact_zero() {
                        continue;
                    }
                    let b = &o.data[k * d + c];
                    if b.is_exact_zero() {
                        continue;
                    }
                    acc = acc.add(&a.mul(b));
                }
                data.push(acc);
            }
        }
        let class = self.class.join(o.class).join(class_of(&data));
        Ok(Matrix { dim: d, data, class })
    }

    /// Product of a non-empty chain; identity for an empty chain of dimension `dim`.
    pub fn product<'a>(dim: usize, it: impl IntoIterator<Item = &'a Matrix>) -> Result<Matrix> {
        let mut acc = Matrix::identity(dim);
        for m in it {
            acc = acc.mul(m)?;
        }
        Ok(acc)
    }

    pub fn adjoint(&self) -> Matrix {
        let d = self.dim;
        let mut data = Vec::with_capacity(d * d);
        for r in 0..d {
            for c in 0..d {
                data.push(self.data[c * d + r].conj());
            }
        }
        Matrix { dim: d, data, class: self.class }
    }

    pub fn transpose(&self) -> Matrix {
        let d = self.dim;
        let mut data = Vec::with_capacity(d * d);
        for r in 0..d {
            for c in 0..d {
                data.push(self.data[c * d + r].clone());
            }
        }
        Matrix { dim: d, data, class: self.class }
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        let data: Vec<Scalar> = self.data.iter().map(|x| x.mul(s)).collect();
        let class = self.class.join(class_of(&data));
        Matrix { dim: self.dim, data, class }
    }

    pub fn trace(&self) -> Scalar {
        let mut acc = Scalar::zero();
        for i in 0..self.dim {
            acc = acc.add(self.get(i, i));
        }
        acc
    }

    pub fn direct_sum(&self, o: &Matrix) -> Matrix {
        let d = self.dim + o.dim;
        let mut data = vec![Scalar::zero(); d * d];
        for r in 0..self.dim {
            for c in 0..self.dim {
                data[r * d + c] = self.get(r, c).clone();
            }
        }
        for r in 0..o.dim {
            for c in 0..o.dim {
                data[(r + self.dim) * d + c + self.dim] = o.get(r, c).clone();
            }
        }
        Matrix { dim: d, data, class: self.class.join(o.class) }
    }

    pub fn kron(&self, o: &Matrix) -> Matrix {
        let d = self.dim * o.dim;
        let mut data = vec![Scalar::zero(); d * d];
        for r1 in 0..self.dim {
            for c1 in 0..self.dim {
                let a = self.get(r1, c1);
                if a.is_exact_zero() {
                    continue;
                }
                for r2 in 0..o.dim {
                    for c2 in 0..o.dim {
                        let b = o.get(r2, c2);
                        if b.is_exact_zero() {
                            continue;
                        }
                        data[(r1 * o.dim + r2) * d + c1 * o.dim + c2] = a.mul(b);
                    }
                }
            }
        }
        Matrix { dim: d, data, class: self.class.join(o.class) }
    }

    /// Block matrix from a `blocks × blocks` grid of equally sized blocks (`None` = zero block).
    pub fn from_blocks(block_dim: usize, grid: &[Vec<Option<Matrix>>]) -> Matrix {
        let nb = grid.len();
        let d = nb * block_dim;
        let mut data = vec![Scalar::zero(); d * d];
        let mut class = AmplitudeClass::AlgebraicExact;
        for (br, row) in grid.iter().enumerate() {
            for (bc, blk) in row.iter().enumerate() {
                if let Some(b) = blk {
                    class = class.join(b.class);
                    for r in 0..block_dim {
                        for c in 0..block_dim {
                            data[(br * block_dim + r) * d + bc * block_dim + c] = b.get(r, c).clone();
                        }
                    }
                }
            }
        }
        Matrix { dim: d, data, class }
    }

    pub fn is_diagonal(&self) -> bool {
        for r in 0..self.dim {
            for c in 0..self.dim {
                if r != c && !self.get(r, c).is_exact_zero() {
                    if self.get(r, c).is_exact() {
                        return false;
                    }
                    let (re, im) = self.get(r, c).to_f64_pair();
                    if re.hypot(im) > Tolerance::default().eps_num {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn approx_eq(&self, o: &Matrix, tol: &Tolerance) -> bool {
        self.dim == o.dim && self.data.iter().zip(&o.data).all(|(a, b)| a.approx_eq(b, tol))
    }

    pub fn is_identity(&self, tol: &Tolerance) -> bool {
        self.approx_eq(&Matrix::identity(self.dim), tol)
    }

    /// Largest entry of `|M†M − I|`, computed in f64 after the product at full precision.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.adjoint().mul(self).expect("square");
        let id = Matrix::identity(self.dim);
        p.data
            .iter()
            .zip(&id.data)
            .map(|(a, b)| {
                let (re, im) = a.sub(b).to_f64_pair();
                re.hypot(im)
            })
            .fold(0.0, f64::max)
    }

    /// Exact check on the exact backend; tolerance check otherwise.
    pub fn is_unitary(&self, tol: &Tolerance) -> bool {
        if self.is_exact() {
            let p = self.adjoint().mul(self).expect("square");
            return p == Matrix::identity(self.dim);
        }
        self.unitarity_defect() <= tol.eps_num
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        if self.dim != v.dim() {
            return Err(Error::Dimension(format!("apply {} to {}", self.dim, v.dim())));
        }
        Ok(StateVector::from_amplitudes(self.apply_raw(&v.amps)))
    }

    /// Matrix-vector product without any normalization bookkeeping.
    pub fn apply_raw(&self, v: &[Scalar]) -> Vec<Scalar> {
        let d = self.dim;
        let mut out = Vec::with_capacity(d);
        for r in 0..d {
            let mut acc = Scalar::zero();
            for (c, x) in v.iter().enumerate() {
                if x.is_exact_zero() {
                    continue;
                }
                let a = &self.data[r * d + c];
                if a.is_exact_zero() {
                    continue;
                }
                acc = acc.add(&a.mul(x));
            }
            out.push(acc);
        }
        out
    }

    pub fn to_f64(&self) -> Vec<(f64, f64)> {
        self.data.iter().map(Scalar::to_f64_pair).collect()
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.dim {
            let row: Vec<String> = (0..self.dim).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: Vec<Scalar>,
}

impl StateVector {
    pub fn from_amplitudes(amps: Vec<Scalar>) -> StateVector {
        StateVector { amps }
    }

    /// `|q_i⟩`, zero-based.
    pub fn basis(dim: usize, i: usize) -> StateVector {
        let mut amps = vec![Scalar::zero(); dim];
        amps[i] = Scalar::one();
        StateVector { amps }
    }

    /// `|1⟩ = (1/√d) Σ_j |q_j⟩`.
    pub fn uniform(dim: usize) -> StateVector {
        let a = Scalar::sqrt_rational(&Q::frac(1, dim as i64), DEFAULT_PRECISION);
        StateVector { amps: vec![a; dim] }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Scalar] {
        &self.amps
    }

    pub fn norm2(&self) -> Scalar {
        self.amps.iter().fold(Scalar::zero(), |acc, a| acc.add(&a.abs2()))
    }

    pub fn inner(&self, o: &StateVector) -> Scalar {
        self.amps.iter().zip(&o.amps).fold(Scalar::zero(), |acc, (a, b)| acc.add(&a.conj().mul(b)))
    }

    pub fn approx_eq(&self, o: &StateVector, tol: &Tolerance) -> bool {
        self.dim() == o.dim() && self.amps.iter().zip(&o.amps).all(|(a, b)| a.approx_eq(b, tol))
    }
}

/// Partition of the basis `{0..d-1}` into labelled blocks; block `r` yields result `r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(dim: usize, blocks: Vec<Vec<usize>>) -> Result<Partition> {
        let mut seen = vec![false; dim];
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::Invalid("empty measurement block".into()));
            }
            for &q in b {
                if q >= dim || seen[q] {
                    return Err(Error::Invalid(format!("bad measurement block element {q}")));
                }
                seen[q] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Invalid("measurement blocks do not cover the basis".into()));
        }
        Ok(Partition { blocks })
    }

    /// `B_0 = {q_2..q_d}`, `B_1 = {q_1}`.
    pub fn first_vs_rest(dim: usize) -> Partition {
        Partition { blocks: vec![(1..dim).collect(), vec![0]] }
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    pub fn block_of(&self, q: usize) -> usize {
        self.blocks.iter().position(|b| b.contains(&q)).expect("partition covers basis")
    }
}

/// One outcome of a measurement: result index, probability and collapsed (normalized) state.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub result: usize,
    pub probability: Scalar,
    pub state: StateVector,
}

pub fn measure(psi: &StateVector, b: &Partition) -> Result<Vec<Outcome>> {
    if b.dim() != psi.dim() {
        return Err(Error::Dimension("partition and state differ".into()));
    }
    let mut out = Vec::new();
    for (r, block) in b.blocks.iter().enumerate() {
        let mut proj = vec![Scalar::zero(); psi.dim()];
        let mut p = Scalar::zero();
        for &q in block {
            proj[q] = psi.amps[q].clone();
            p = p.add(&psi.amps[q].abs2());
        }
        if p.is_exact_zero() {
            continue;
        }
        let prec = p.precision().unwrap_or(DEFAULT_PRECISION);
        let norm = p.sqrt_real(prec).inv();
        let state = StateVector::from_amplitudes(proj.iter().map(|a| a.mul(&norm)).collect());
        out.push(Outcome { result: r, probability: p.re(), state });
    }
    Ok(out)
}

/// The unitary DFT matrix `F[u,v] = e^{-2πi uv/d}/√d` (zero-based u, v).
pub fn dft_matrix(d: usize) -> Result<Matrix> {
    if d < 2 {
        return Err(Error::Invalid("dft_matrix needs d >= 2".into()));
    }
    let p = DEFAULT_PRECISION;
    let s = Scalar::sqrt_rational(&Q::frac(1, d as i64), p);
    let mut data = Vec::with_capacity(d * d);
    for u in 0..d {
        for v in 0..d {
            let k = (u * v) % d;
            let w = Scalar::root_of_unity(-(k as i64), d as i64, p);
            data.push(w.mul(&s));
        }
    }
    Ok(Matrix::from_vec(d, data))
}

/// Permutation matrix with a 1 at (row 1, column v) (one-based `v`); the remaining columns
/// map in increasing order onto the remaining rows.
pub fn permutation_matrix(d: usize, v: usize) -> Result<Matrix> {
    if v == 0 || v > d {
        return Err(Error::Invalid(format!("permutation column {v} outside 1..={d}")));
    }
    let mut data = vec![Scalar::zero(); d * d];
    data[v - 1] = Scalar::one();
    let mut row = 1;
    for c in 0..d {
        if c == v - 1 {
            continue;
        }
        data[row * d + c] = Scalar::one();
        row += 1;
    }
    Ok(Matrix::from_vec(d, data))
}

/// `K = H ⊕ I_{d-2}`: Hadamard on `q_1, q_2`.
pub fn coin_matrix(d: usize) -> Matrix {
    assert!(d >= 2);
    let h = Scalar::Exact(QE::surd(Q::frac(1, 2), 2));
    let mut m = Matrix::identity(d);
    m.data[0] = h.clone();
    m.data[1] = h.clone();
    m.data[d] = h.clone();
    m.data[d + 1] = h.neg();
    m.class = AmplitudeClass::AlgebraicExact;
    m
}

/// A unitary `t` with `t ψ1 = ψ2` for unit vectors: the Householder reflection
/// `I − 2uu†/(u†u)`, `u = ψ1 − ψ2`, preceded by a global phase when `⟨ψ1|ψ2⟩` is not real.
pub fn transfer_unitary(psi1: &StateVector, psi2: &StateVector) -> Result<Matrix> {
    let d = psi1.dim();
    if d != psi2.dim() {
        return Err(Error::Dimension("transfer between different dimensions".into()));
    }
    if psi1 == psi2 {
        return Ok(Matrix::identity(d));
    }
    let ip = psi1.inner(psi2);
    let (target, phase) = match &ip {
        Scalar::Exact(e) if e.is_real() => (psi2.clone(), None),
        _ => {
            // rotate ψ2 so that ⟨ψ1|ψ2'⟩ is real and non-negative, then undo with a global phase
            let prec = ip.precision().unwrap_or(DEFAULT_PRECISION);
            if ip.to_f64_pair().1.abs() <= Tolerance::for_precision(prec).eps_num {
                (psi2.clone(), None)
            } else {
                let mag = ip.abs(prec);
                let ph = ip.conj().div(&mag);
                let rotated = StateVector::from_amplitudes(psi2.amps.iter().map(|a| a.mul(&ph)).collect());
                (rotated, Some(ph.conj()))
            }
        }
    };
    let u: Vec<Scalar> = psi1.amps.iter().zip(&target.amps).map(|(a, b)| a.sub(b)).collect();
    let uu = u.iter().fold(Scalar::zero(), |acc, x| acc.add(&x.abs2()));
    let mut m = Matrix::identity(d);
    if !uu.is_exact_zero() {
        let f = Scalar::int(2).div(&uu);
        for r in 0..d {
            for c in 0..d {
                let t = u[r].mul(&u[c].conj()).mul(&f);
                m.data[r * d + c] = m.data[r * d + c].sub(&t);
            }
        }
        m.class = class_of(&m.data);
    }
    if let Some(ph) = phase {
        m = m.scale(&ph);
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(a: i64, b: i64, d: i64) -> Scalar {
        Scalar::gaussian(Q::frac(a, d), Q::frac(b, d))
    }

    #[test]
    fn dft2_exact() {
        let f = dft_matrix(2).unwrap();
        let h = Scalar::Exact(QE::surd(Q::frac(1, 2), 2));
        assert_eq!(f, Matrix::from_rows(vec![vec![h.clone(), h.clone()], vec![h.clone(), h.neg()]]));
        assert!(f.is_unitary(&Tolerance::default()));
    }

    #[test]
    fn dft_first_row_uniform() {
        for d in 2..=4 {
            let f = dft_matrix(d).unwrap();
            let expect = Scalar::sqrt_rational(&Q::frac(1, d as i64), DEFAULT_PRECISION);
            for v in 0..d {
                assert!(f.get(0, v).approx_eq(&expect, &Tolerance::default()));
            }
        }
    }

    #[test]
    fn diag_square_exact() {
        let m = Matrix::diag(vec![g(3, 4, 5), Scalar::one()]);
        let sq = m.mul(&m).unwrap();
        assert_eq!(sq, Matrix::diag(vec![g(-7, 24, 25), Scalar::one()]));
    }

    #[test]
    fn permutation_examples() {
        assert_eq!(permutation_matrix(2, 1).unwrap(), Matrix::identity(2));
        let swap = permutation_matrix(2, 2).unwrap();
        assert_eq!(swap.get(0, 1), &Scalar::one());
        assert_eq!(swap.get(1, 0), &Scalar::one());
        let p = permutation_matrix(4, 3).unwrap();
        let e = p.apply(&StateVector::basis(4, 2)).unwrap();
        assert_eq!(e, StateVector::basis(4, 0));
    }

    #[test]
    fn measure_after_dft() {
        let psi = StateVector::uniform(2);
        let m = dft_matrix(2).unwrap().mul(&Matrix::diag(vec![g(3, 4, 5), Scalar::one()])).unwrap();
        let out = measure(&m.apply(&psi).unwrap(), &Partition::new(2, vec![vec![0], vec![1]]).unwrap()).unwrap();
        assert_eq!(out[0].probability, Scalar::frac(4, 5));
        assert_eq!(out[1].probability, Scalar::frac(1, 5));
    }

    #[test]
    fn transfer_maps_states() {
        let tol = Tolerance::default();
        for d in [2usize, 4, 5, 8] {
            let t = transfer_unitary(&StateVector::basis(d, 0), &StateVector::uniform(d)).unwrap();
            assert!(t.is_unitary(&tol));
            assert!(t.apply(&StateVector::basis(d, 0)).unwrap().approx_eq(&StateVector::uniform(d), &tol));
        }
        let swap = transfer_unitary(&StateVector::basis(3, 1), &StateVector::basis(3, 0)).unwrap();
        assert_eq!(swap.apply(&StateVector::basis(3, 1)).unwrap(), StateVector::basis(3, 0));
        let ph = StateVector::from_amplitudes(vec![g(0, 1, 1).mul(&Scalar::Exact(QE::surd(Q::frac(1, 2), 2))), Scalar::Exact(QE::surd(Q::frac(1, 2), 2))]);
        let t = transfer_unitary(&StateVector::basis(2, 0), &ph).unwrap();
        assert!(t.is_unitary(&tol));
        assert!(t.apply(&StateVector::basis(2, 0)).unwrap().approx_eq(&ph, &tol));
    }
}
