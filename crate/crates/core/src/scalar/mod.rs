//! Complex scalars with two backends: exact elements of Q(i, √2, √5) and
//! arbitrary-precision floats.

pub mod exact;
pub mod float;
pub mod rational;

use std::cmp::Ordering;
use std::fmt;

use astro_float::BigFloat;
use serde::{Deserialize, Serialize};

pub use exact::QE;
pub use float::{CF, DEFAULT_PRECISION, MIN_PRECISION};
pub use rational::Q;

use float::*;

/// Where the transition amplitudes of a matrix live. Ordered so that `max` is the join.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AmplitudeClass {
    AlgebraicExact,
    AlgebraicNumeric,
    CTildeNumeric,
    GenericNumeric,
}

impl AmplitudeClass {
    pub fn join(self, o: AmplitudeClass) -> AmplitudeClass {
        self.max(o)
    }
}

/// Equality tolerance for the float backend.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub precision: usize,
    pub eps_num: f64,
}

impl Tolerance {
    pub fn for_precision(precision: usize) -> Tolerance {
        Tolerance { precision, eps_num: 2f64.powi(-(precision as i32) / 2) }
    }

    pub fn with_eps(mut self, eps: f64) -> Tolerance {
        self.eps_num = eps;
        self
    }
}

impl Default for Tolerance {
    fn default() -> Tolerance {
        Tolerance::for_precision(DEFAULT_PRECISION)
    }
}

#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(QE),
    Float(CF),
}

impl Scalar {
    pub fn zero() -> Scalar {
        Scalar::Exact(QE::zero())
    }

    pub fn one() -> Scalar {
        Scalar::Exact(QE::one())
    }

    pub fn int(n: i64) -> Scalar {
        Scalar::Exact(QE::int(n))
    }

    pub fn frac(n: i64, d: i64) -> Scalar {
        Scalar::Exact(QE::frac(n, d))
    }

    pub fn rational(q: Q) -> Scalar {
        Scalar::Exact(QE::rational(q))
    }

    pub fn gaussian(re: Q, im: Q) -> Scalar {
        Scalar::Exact(QE::gaussian(re, im))
    }

    pub fn i() -> Scalar {
        Scalar::Exact(QE::i())
    }

    pub fn float(re: BigFloat, im: BigFloat, p: usize) -> Scalar {
        Scalar::Float(CF::new(re, im, p))
    }

    pub fn from_f64(re: f64, im: f64, p: usize) -> Scalar {
        Scalar::Float(CF::from_f64(re, im, p))
    }

    /// `√q` for rational `q ≥ 0`: exact when the root lies in the field, otherwise a float.
    pub fn sqrt_rational(q: &Q, p: usize) -> Scalar {
        match QE::sqrt_rational(q) {
            Some(e) => Scalar::Exact(e),
            None => Scalar::float(bf_sqrt(&bf_rational(q, p), p), BigFloat::from_u64(0, p), p),
        }
    }

    /// `e^{2πi r}` for rational `r = num/den`: exact for denominators dividing 8.
    pub fn root_of_unity(num: i64, den: i64, p: usize) -> Scalar {
        let g = num_integer::gcd(num.rem_euclid(den), den);
        let (n, d) = (num.rem_euclid(den) / g.max(1), den / g.max(1));
        if let Some(w) = QE::root_of_unity(d as u64) {
            return Scalar::Exact(w.pow(n as u32));
        }
        let two_pi = bf_mul(&bf_pi(p + 32), &BigFloat::from_u64(2, p + 32), p + 32);
        let theta = bf_div(&bf_mul(&two_pi, &BigFloat::from_i64(n, p + 32), p + 32), &BigFloat::from_i64(d, p + 32), p + 32);
        Scalar::Float(CF::expi(&theta, p + 32).with_precision(p))
    }

    /// `e^{iθ}` for a float angle.
    pub fn expi(theta: &BigFloat, p: usize) -> Scalar {
        Scalar::Float(CF::expi(theta, p))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn precision(&self) -> Option<usize> {
        match self {
            Scalar::Exact(_) => None,
            Scalar::Float(c) => Some(c.prec),
        }
    }

    pub fn as_exact(&self) -> Option<&QE> {
        match self {
            Scalar::Exact(e) => Some(e),
            Scalar::Float(_) => None,
        }
    }

    pub fn to_cf(&self, p: usize) -> CF {
        match self {
            Scalar::Float(c) => {
                if c.prec == p {
                    c.clone()
                } else {
                    c.with_precision(p)
                }
            }
            Scalar::Exact(e) => {
                let wp = p + 16;
                let roots = [
                    BigFloat::from_u64(1, wp),
                    bf_sqrt(&BigFloat::from_u64(2, wp), wp),
                    bf_sqrt(&BigFloat::from_u64(5, wp), wp),
                    bf_sqrt(&BigFloat::from_u64(10, wp), wp),
                ];
                let mut re = BigFloat::from_u64(0, wp);
                let mut im = BigFloat::from_u64(0, wp);
                let c = e.coords();
                for k in 0..4 {
                    if !c[k].is_zero() {
                        re = bf_add(&re, &bf_mul(&bf_rational(&c[k], wp), &roots[k], wp), wp);
                    }
                    if !c[k + 4].is_zero() {
                        im = bf_add(&im, &bf_mul(&bf_rational(&c[k + 4], wp), &roots[k], wp), wp);
                    }
                }
                CF::new(re, im, wp).with_precision(p)
            }
        }
    }

    fn pair<'a>(&'a self, o: &'a Scalar) -> Result<(&'a QE, &'a QE), (CF, CF)> {
        match (self, o) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Ok((a, b)),
            _ => {
                let p = self.precision().unwrap_or(0).max(o.precision().unwrap_or(0));
                Err((self.to_cf(p), o.to_cf(p)))
            }
        }
    }

    pub fn add(&self, o: &Scalar) -> Scalar {
        match self.pair(o) {
            Ok((a, b)) => Scalar::Exact(a.add(b)),
            Err((a, b)) => Scalar::Float(a.add(&b)),
        }
    }

    pub fn sub(&self, o: &Scalar) -> Scalar {
        match self.pair(o) {
            Ok((a, b)) => Scalar::Exact(a.sub(b)),
            Err((a, b)) => Scalar::Float(a.sub(&b)),
        }
    }

    pub fn mul(&self, o: &Scalar) -> Scalar {
        if let Scalar::Exact(a) = self {
            if a.is_zero() {
                return Scalar::zero();
            }
        }
        if let Scalar::Exact(b) = o {
            if b.is_zero() {
                return Scalar::zero();
            }
        }
        match self.pair(o) {
            Ok((a, b)) => Scalar::Exact(a.mul(b)),
            Err((a, b)) => Scalar::Float(a.mul(&b)),
        }
    }

    pub fn div(&self, o: &Scalar) -> Scalar {
        self.mul(&o.inv())
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Exact(a) => Scalar::Exact(a.neg()),
            Scalar::Float(a) => Scalar::Float(a.neg()),
        }
    }

    pub fn conj(&self) -> Scalar {
        match self {
            Scalar::Exact(a) => Scalar::Exact(a.conj()),
            Scalar::Float(a) => Scalar::Float(a.conj()),
        }
    }

    pub fn inv(&self) -> Scalar {
        match self {
            Scalar::Exact(a) => Scalar::Exact(a.inv()),
            Scalar::Float(a) => Scalar::Float(a.inv()),
        }
    }

    /// `|z|^2` as a real scalar.
    pub fn abs2(&self) -> Scalar {
        match self {
            Scalar::Exact(a) => Scalar::Exact(a.abs2()),
            Scalar::Float(a) => Scalar::Float(CF::real(a.abs2(), a.prec)),
        }
    }

    /// `|z|` as a real scalar; exact only when the root lies in the field.
    pub fn abs(&self, p: usize) -> Scalar {
        match self {
            Scalar::Exact(a) => {
                let n = a.abs2();
                if let Some(r) = n.sqrt() {
                    return Scalar::Exact(r);
                }
                let c = Scalar::Exact(n).to_cf(p);
                Scalar::Float(CF::real(bf_sqrt(&c.re, p), p))
            }
            Scalar::Float(a) => Scalar::Float(CF::real(a.abs(), a.prec)),
        }
    }

    /// Square root of a non-negative real scalar.
    pub fn sqrt_real(&self, p: usize) -> Scalar {
        match self {
            Scalar::Exact(a) => match a.sqrt() {
                Some(r) => Scalar::Exact(r),
                None => {
                    let c = self.to_cf(p);
                    Scalar::Float(CF::real(bf_sqrt(&c.re, p), p))
                }
            },
            Scalar::Float(a) => Scalar::Float(CF::real(bf_sqrt(&a.re, a.prec), a.prec)),
        }
    }

    pub fn re(&self) -> Scalar {
        match self {
            Scalar::Exact(a) => Scalar::Exact(a.re()),
            Scalar::Float(a) => Scalar::Float(CF::real(a.re.clone(), a.prec)),
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        match self {
            Scalar::Exact(a) => a.is_zero(),
            Scalar::Float(a) => a.is_zero(),
        }
    }

    pub fn is_exact_one(&self) -> bool {
        match self {
            Scalar::Exact(a) => *a == QE::one(),
            Scalar::Float(_) => false,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.to_f64_pair().0
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        match self {
            Scalar::Exact(a) => a.to_f64_pair(),
            Scalar::Float(a) => a.to_f64_pair(),
        }
    }

    /// Real part as a BigFloat.
    pub fn re_bf(&self, p: usize) -> BigFloat {
        self.to_cf(p).re
    }

    /// Compare real parts. Exact operands compare exactly; otherwise at the working precision.
    pub fn cmp_re(&self, o: &Scalar) -> Ordering {
        match self.pair(o) {
            Ok((a, b)) => a.cmp_re(b),
            Err((a, b)) => bf_cmp(&a.re, &b.re),
        }
    }

    /// Sign of the real part.
    pub fn sign_re(&self) -> Ordering {
        self.cmp_re(&Scalar::zero())
    }

    /// Distance `|self − o|` is at most `tol.eps_num` (exact pairs compare exactly).
    pub fn approx_eq(&self, o: &Scalar, tol: &Tolerance) -> bool {
        match self.pair(o) {
            Ok((a, b)) => a == b,
            Err((a, b)) => {
                let d = a.sub(&b);
                let (re, im) = d.to_f64_pair();
                re.hypot(im) <= tol.eps_num
            }
        }
    }

    /// Real part `≥ o` up to `tol` when floats are involved; exact otherwise.
    pub fn ge_re(&self, o: &Scalar, tol: &Tolerance) -> bool {
        match self.pair(o) {
            Ok((a, b)) => a.cmp_re(b) != Ordering::Less,
            Err((a, b)) => bf_to_f64(&bf_sub(&a.re, &b.re, a.prec)) >= -tol.eps_num,
        }
    }

    pub fn max_re(a: &Scalar, b: &Scalar) -> Scalar {
        if a.cmp_re(b) == Ordering::Less {
            b.clone()
        } else {
            a.clone()
        }
    }

    pub fn pow(&self, e: u32) -> Scalar {
        let mut acc = Scalar::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
}

impl PartialEq for Scalar {
    /// Exact structural equality for exact scalars; bitwise for floats.
    fn eq(&self, o: &Scalar) -> bool {
        match (self, o) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            (Scalar::Float(a), Scalar::Float(b)) => {
                a.prec == b.prec && bf_cmp(&a.re, &b.re) == Ordering::Equal && bf_cmp(&a.im, &b.im) == Ordering::Equal
            }
            _ => false,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(a) => write!(f, "{a}"),
            Scalar::Float(a) => write!(f, "{a}"),
        }
    }
}

impl From<QE> for Scalar {
    fn from(e: QE) -> Scalar {
        Scalar::Exact(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_backend_coerces() {
        let a = Scalar::frac(1, 2);
        let b = Scalar::from_f64(0.25, 0.0, 128);
        let c = a.add(&b);
        assert!(!c.is_exact());
        assert!((c.to_f64() - 0.75).abs() < 1e-30);
    }

    #[test]
    fn root_of_unity_backends() {
        assert!(Scalar::root_of_unity(1, 4, 256).is_exact());
        assert!(Scalar::root_of_unity(3, 8, 256).is_exact());
        let w3 = Scalar::root_of_unity(1, 3, 256);
        assert!(!w3.is_exact());
        let cube = w3.pow(3);
        assert!(cube.approx_eq(&Scalar::one(), &Tolerance::default()));
    }

    #[test]
    fn sqrt_exact_when_possible() {
        assert!(Scalar::sqrt_rational(&Q::frac(4, 5), 128).is_exact());
        assert!(!Scalar::sqrt_rational(&Q::frac(3, 4), 128).is_exact());
    }

    #[test]
    fn default_tolerance_small() {
        let t = Tolerance::default();
        assert!(t.eps_num > 0.0 && t.eps_num < 1e-9);
    }
}
