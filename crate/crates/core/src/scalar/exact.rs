//! Exact arithmetic in the number field Q(i, √2, √5).
//!
//! An element is stored as eight rational coordinates over the basis
//! `{1, √2, √5, √10} × {1, i}`. Coordinate index is `4 * part + radical` where
//! `part` is 0 (real) or 1 (imaginary) and the two low bits of `radical` say whether
//! √2 (bit 0) and √5 (bit 1) appear.

use std::cmp::Ordering;
use std::fmt;

use super::rational::Q;

pub const RADICALS: [i64; 4] = [1, 2, 5, 10];

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QE {
    c: [Q; 8],
}

fn basis_factor(a: usize, b: usize) -> i64 {
    let both = a & b;
    let mut f = 1;
    if both & 1 != 0 {
        f *= 2;
    }
    if both & 2 != 0 {
        f *= 5;
    }
    f
}

impl QE {
    pub fn zero() -> QE {
        QE { c: Default::default() }
    }

    pub fn one() -> QE {
        QE::rational(Q::one())
    }

    pub fn i() -> QE {
        let mut e = QE::zero();
        e.c[4] = Q::one();
        e
    }

    pub fn rational(q: Q) -> QE {
        let mut e = QE::zero();
        e.c[0] = q;
        e
    }

    pub fn int(n: i64) -> QE {
        QE::rational(Q::int(n))
    }

    pub fn frac(n: i64, d: i64) -> QE {
        QE::rational(Q::frac(n, d))
    }

    /// Gaussian rational `re + im i`.
    pub fn gaussian(re: Q, im: Q) -> QE {
        let mut e = QE::zero();
        e.c[0] = re;
        e.c[4] = im;
        e
    }

    /// `q * √radical` for radical in {1, 2, 5, 10}.
    pub fn surd(q: Q, radical: i64) -> QE {
        let idx = RADICALS.iter().position(|&r| r == radical).expect("radical outside Q(√2,√5)");
        let mut e = QE::zero();
        e.c[idx] = q;
        e
    }

    pub fn from_coords(c: [Q; 8]) -> QE {
        QE { c }
    }

    pub fn coords(&self) -> &[Q; 8] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Q::is_zero)
    }

    pub fn is_real(&self) -> bool {
        self.c[4..].iter().all(Q::is_zero)
    }

    pub fn is_rational(&self) -> bool {
        self.c[1..].iter().all(Q::is_zero)
    }

    pub fn as_rational(&self) -> Option<Q> {
        if self.is_rational() {
            Some(self.c[0].clone())
        } else {
            None
        }
    }

    pub fn add(&self, o: &QE) -> QE {
        let mut c: [Q; 8] = Default::default();
        for (k, slot) in c.iter_mut().enumerate() {
            *slot = self.c[k].add(&o.c[k]);
        }
        QE { c }
    }

    pub fn sub(&self, o: &QE) -> QE {
        let mut c: [Q; 8] = Default::default();
        for (k, slot) in c.iter_mut().enumerate() {
            *slot = self.c[k].sub(&o.c[k]);
        }
        QE { c }
    }

    pub fn neg(&self) -> QE {
        let mut c: [Q; 8] = Default::default();
        for (k, slot) in c.iter_mut().enumerate() {
            if !self.c[k].is_zero() {
                *slot = self.c[k].neg();
            }
        }
        QE { c }
    }

    pub fn mul(&self, o: &QE) -> QE {
        let mut c: [Q; 8] = Default::default();
        for a in 0..8 {
            if self.c[a].is_zero() {
                continue;
            }
            for b in 0..8 {
                if o.c[b].is_zero() {
                    continue;
                }
                let (pa, ra) = (a >> 2, a & 3);
                let (pb, rb) = (b >> 2, b & 3);
                let mut f = basis_factor(ra, rb);
                if pa == 1 && pb == 1 {
                    f = -f;
                }
                let idx = ((pa ^ pb) << 2) | (ra ^ rb);
                let term = self.c[a].mul(&o.c[b]);
                let term = if f == 1 { term } else { term.mul_int(f) };
                c[idx] = c[idx].add(&term);
            }
        }
        QE { c }
    }

    pub fn scale(&self, q: &Q) -> QE {
        let mut c: [Q; 8] = Default::default();
        for (k, slot) in c.iter_mut().enumerate() {
            *slot = self.c[k].mul(q);
        }
        QE { c }
    }

    pub fn conj(&self) -> QE {
        let mut e = self.clone();
        for k in 4..8 {
            if !e.c[k].is_zero() {
                e.c[k] = e.c[k].neg();
            }
        }
        e
    }

    /// Field automorphism flipping the sign of the radicals selected by `mask`
    /// (bit 0: √2, bit 1: √5).
    fn galois(&self, mask: usize) -> QE {
        let mut e = self.clone();
        for k in 0..8 {
            if (k & 3 & mask).count_ones() % 2 == 1 && !e.c[k].is_zero() {
                e.c[k] = e.c[k].neg();
            }
        }
        e
    }

    pub fn inv(&self) -> QE {
        assert!(!self.is_zero(), "inverse of zero in Q(i,√2,√5)");
        let others = self.galois(1).mul(&self.galois(2)).mul(&self.galois(3));
        let norm = self.mul(&others);
        // norm lies in Q(i)
        let (a, b) = (norm.c[0].clone(), norm.c[4].clone());
        let den = a.mul(&a).add(&b.mul(&b));
        let ninv = QE::gaussian(a.div(&den), b.neg().div(&den));
        others.mul(&ninv)
    }

    pub fn div(&self, o: &QE) -> QE {
        self.mul(&o.inv())
    }

    /// `|z|^2`, a real element.
    pub fn abs2(&self) -> QE {
        self.mul(&self.conj())
    }

    pub fn re(&self) -> QE {
        let mut e = self.clone();
        for k in 4..8 {
            e.c[k] = Q::zero();
        }
        e
    }

    pub fn im(&self) -> QE {
        let mut e = QE::zero();
        for k in 0..4 {
            e.c[k] = self.c[k + 4].clone();
        }
        e
    }

    /// Exact sign of the real part.
    pub fn sign_re(&self) -> Ordering {
        let c = &self.c;
        // X + √5 Y with X = c0 + c1√2, Y = c2 + c3√2
        let x = (c[0].clone(), c[1].clone());
        let y = (c[2].clone(), c[3].clone());
        let sx = sign_q2(&x);
        let sy = sign_q2(&y);
        if sy == Ordering::Equal {
            return sx;
        }
        if sx == Ordering::Equal || sx == sy {
            return sy;
        }
        // opposite signs: compare X^2 and 5 Y^2
        let x2 = sq_q2(&x);
        let y2 = sq_q2(&y);
        let diff = (x2.0.sub(&y2.0.mul_int(5)), x2.1.sub(&y2.1.mul_int(5)));
        let sd = sign_q2(&diff);
        match sd {
            Ordering::Equal => Ordering::Equal,
            Ordering::Greater => sx,
            Ordering::Less => sy,
        }
    }

    /// Exact comparison of real parts.
    pub fn cmp_re(&self, o: &QE) -> Ordering {
        self.sub(o).sign_re()
    }

    /// Square root of a non-negative rational, when it lies in the field.
    pub fn sqrt_rational(q: &Q) -> Option<QE> {
        let (t, f) = q.sqrt_radical(&RADICALS)?;
        Some(QE::surd(t, f))
    }

    /// Square root of `self` if `self` is a non-negative rational with a root in the field.
    pub fn sqrt(&self) -> Option<QE> {
        QE::sqrt_rational(&self.as_rational()?)
    }

    pub fn pow(&self, e: u32) -> QE {
        let mut acc = QE::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Primitive m-th root of unity `e^{2πi/m}`, available for m in {1, 2, 4, 8}.
    pub fn root_of_unity(m: u64) -> Option<QE> {
        match m {
            1 => Some(QE::one()),
            2 => Some(QE::int(-1)),
            4 => Some(QE::i()),
            8 => {
                let mut e = QE::zero();
                e.c[1] = Q::frac(1, 2);
                e.c[5] = Q::frac(1, 2);
                Some(e)
            }
            _ => None,
        }
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        let s = [1.0, 2f64.sqrt(), 5f64.sqrt(), 10f64.sqrt()];
        let mut re = 0.0;
        let mut im = 0.0;
        for k in 0..4 {
            re += self.c[k].to_f64() * s[k];
            im += self.c[k + 4].to_f64() * s[k];
        }
        (re, im)
    }
}

fn sign_q(q: &Q) -> Ordering {
    q.signum().cmp(&0)
}

/// Sign of `a + b√2`.
fn sign_q2(v: &(Q, Q)) -> Ordering {
    let sa = sign_q(&v.0);
    let sb = sign_q(&v.1);
    if sb == Ordering::Equal {
        return sa;
    }
    if sa == Ordering::Equal || sa == sb {
        return sb;
    }
    let d = v.0.mul(&v.0).sub(&v.1.mul(&v.1).mul_int(2));
    match sign_q(&d) {
        Ordering::Equal => Ordering::Equal,
        Ordering::Greater => sa,
        Ordering::Less => sb,
    }
}

fn sq_q2(v: &(Q, Q)) -> (Q, Q) {
    (
        v.0.mul(&v.0).add(&v.1.mul(&v.1).mul_int(2)),
        v.0.mul(&v.1).mul_int(2),
    )
}

impl fmt::Display for QE {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const NAMES: [&str; 4] = ["", "√2", "√5", "√10"];
        let mut parts = Vec::new();
        for k in 0..8 {
            if self.c[k].is_zero() {
                continue;
            }
            let mut s = self.c[k].to_string();
            if !NAMES[k & 3].is_empty() {
                s = format!("({s}){}", NAMES[k & 3]);
            }
            if k >= 4 {
                s = format!("{s}i");
            }
            parts.push(s);
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(re: (i64, i64), im: (i64, i64)) -> QE {
        QE::gaussian(Q::frac(re.0, re.1), Q::frac(im.0, im.1))
    }

    #[test]
    fn radicals_multiply() {
        let r2 = QE::surd(Q::one(), 2);
        let r5 = QE::surd(Q::one(), 5);
        assert_eq!(r2.mul(&r2), QE::int(2));
        assert_eq!(r2.mul(&r5), QE::surd(Q::one(), 10));
        assert_eq!(QE::surd(Q::one(), 10).mul(&r5), QE::surd(Q::int(5), 2));
        assert_eq!(QE::i().mul(&QE::i()), QE::int(-1));
    }

    #[test]
    fn square_of_pythagorean_phase() {
        let z = g((3, 5), (4, 5));
        assert_eq!(z.mul(&z), g((-7, 25), (24, 25)));
        assert_eq!(z.abs2(), QE::one());
    }

    #[test]
    fn inverse_roundtrip() {
        let x = QE::from_coords([
            Q::frac(1, 3),
            Q::int(2),
            Q::frac(-1, 7),
            Q::int(1),
            Q::int(0),
            Q::frac(5, 2),
            Q::int(-3),
            Q::frac(1, 11),
        ]);
        assert_eq!(x.mul(&x.inv()), QE::one());
    }

    #[test]
    fn exact_sign() {
        // 3 - 2√2 > 0 but small
        let v = QE::from_coords([Q::int(3), Q::int(-2), Q::zero(), Q::zero(), Q::zero(), Q::zero(), Q::zero(), Q::zero()]);
        assert_eq!(v.sign_re(), Ordering::Greater);
        // √10 - √2·√5 = 0
        let z = QE::surd(Q::one(), 10).sub(&QE::surd(Q::one(), 2).mul(&QE::surd(Q::one(), 5)));
        assert_eq!(z.sign_re(), Ordering::Equal);
        // 9 - 4√5 ≈ 0.0557
        let w = QE::int(9).sub(&QE::surd(Q::int(4), 5));
        assert_eq!(w.sign_re(), Ordering::Greater);
        // √2 + √5 - √10·(0.8) ≈ 1.1126
        let u = QE::surd(Q::one(), 2).add(&QE::surd(Q::one(), 5)).sub(&QE::surd(Q::frac(4, 5), 10));
        assert_eq!(u.sign_re(), Ordering::Greater);
        assert_eq!(u.neg().sign_re(), Ordering::Less);
    }

    #[test]
    fn eighth_root() {
        let w = QE::root_of_unity(8).unwrap();
        assert_eq!(w.pow(8), QE::one());
        assert_eq!(w.pow(2), QE::i());
    }
}
