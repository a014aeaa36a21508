//! Arbitrary-precision complex numbers on top of `astro_float`.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::BigInt;

use super::rational::Q;

pub const DEFAULT_PRECISION: usize = 256;
pub const MIN_PRECISION: usize = 64;
const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constants cache"));
}

pub fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

pub fn bf_int(n: &BigInt, p: usize) -> BigFloat {
    let (sign, digits) = n.to_u64_digits();
    if digits.is_empty() {
        return BigFloat::from_u64(0, p);
    }
    let s = if sign == num_bigint::Sign::Minus { Sign::Neg } else { Sign::Pos };
    let e = 64 * digits.len() as i32;
    let mut v = BigFloat::from_words(&digits, s, e);
    v.set_precision(p, RM).expect("precision");
    v
}

pub fn bf_rational(q: &Q, p: usize) -> BigFloat {
    match q {
        Q::S(r) => {
            let n = BigFloat::from_i128(*r.numer(), p);
            if *r.denom() == 1 {
                n
            } else {
                n.div(&BigFloat::from_i128(*r.denom(), p), p, RM)
            }
        }
        Q::B(_) => bf_int(&q.numer(), p).div(&bf_int(&q.denom(), p), p, RM),
    }
}

pub fn bf_to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    match x.as_raw_parts() {
        Some((m, _, s, e, _)) => {
            let top = *m.last().unwrap_or(&0) as f64;
            let v = top * 2f64.powi(e - 64);
            if s == Sign::Neg {
                -v
            } else {
                v
            }
        }
        None => f64::NAN,
    }
}

pub fn bf_sqrt(x: &BigFloat, p: usize) -> BigFloat {
    x.sqrt(p, RM)
}

pub fn bf_pi(p: usize) -> BigFloat {
    with_consts(|cc| cc.pi(p, RM))
}

pub fn bf_cos(x: &BigFloat, p: usize) -> BigFloat {
    with_consts(|cc| x.cos(p, RM, cc))
}

pub fn bf_sin(x: &BigFloat, p: usize) -> BigFloat {
    with_consts(|cc| x.sin(p, RM, cc))
}

pub fn bf_acos(x: &BigFloat, p: usize) -> BigFloat {
    with_consts(|cc| x.acos(p, RM, cc))
}

pub fn bf_add(a: &BigFloat, b: &BigFloat, p: usize) -> BigFloat {
    a.add(b, p, RM)
}

pub fn bf_sub(a: &BigFloat, b: &BigFloat, p: usize) -> BigFloat {
    a.sub(b, p, RM)
}

pub fn bf_mul(a: &BigFloat, b: &BigFloat, p: usize) -> BigFloat {
    a.mul(b, p, RM)
}

pub fn bf_div(a: &BigFloat, b: &BigFloat, p: usize) -> BigFloat {
    a.div(b, p, RM)
}

pub fn bf_floor(a: &BigFloat) -> BigFloat {
    a.floor()
}

pub fn bf_cmp(a: &BigFloat, b: &BigFloat) -> Ordering {
    match a.cmp(b) {
        Some(x) if x < 0 => Ordering::Less,
        Some(0) => Ordering::Equal,
        Some(_) => Ordering::Greater,
        None => panic!("NaN in BigFloat comparison"),
    }
}

pub fn bf_abs(a: &BigFloat) -> BigFloat {
    a.abs()
}

pub fn bf_to_hex(x: &BigFloat) -> String {
    with_consts(|cc| x.format(Radix::Hex, RM, cc)).expect("format")
}

pub fn bf_from_hex(s: &str, p: usize) -> Option<BigFloat> {
    let v = with_consts(|cc| BigFloat::parse(s, Radix::Hex, p, RM, cc));
    if v.is_nan() {
        None
    } else {
        Some(v)
    }
}

pub fn bf_to_dec(x: &BigFloat) -> String {
    with_consts(|cc| x.format(Radix::Dec, RM, cc)).expect("format")
}

/// `2^{-k}` at precision `p`.
pub fn bf_pow2_neg(k: usize, p: usize) -> BigFloat {
    let half = BigFloat::from_f64(0.5, p);
    half.powi(k, p, RM)
}

/// Complex number with arbitrary-precision parts.
#[derive(Clone, Debug)]
pub struct CF {
    pub re: BigFloat,
    pub im: BigFloat,
    pub prec: usize,
}

impl CF {
    pub fn new(re: BigFloat, im: BigFloat, prec: usize) -> CF {
        CF { re, im, prec }
    }

    pub fn zero(p: usize) -> CF {
        CF::new(BigFloat::from_u64(0, p), BigFloat::from_u64(0, p), p)
    }

    pub fn from_f64(re: f64, im: f64, p: usize) -> CF {
        CF::new(BigFloat::from_f64(re, p), BigFloat::from_f64(im, p), p)
    }

    pub fn real(re: BigFloat, p: usize) -> CF {
        CF::new(re, BigFloat::from_u64(0, p), p)
    }

    /// `e^{iθ}`.
    pub fn expi(theta: &BigFloat, p: usize) -> CF {
        CF::new(bf_cos(theta, p), bf_sin(theta, p), p)
    }

    fn p2(&self, o: &CF) -> usize {
        self.prec.max(o.prec)
    }

    pub fn add(&self, o: &CF) -> CF {
        let p = self.p2(o);
        CF::new(self.re.add(&o.re, p, RM), self.im.add(&o.im, p, RM), p)
    }

    pub fn sub(&self, o: &CF) -> CF {
        let p = self.p2(o);
        CF::new(self.re.sub(&o.re, p, RM), self.im.sub(&o.im, p, RM), p)
    }

    pub fn mul(&self, o: &CF) -> CF {
        let p = self.p2(o);
        if o.im.is_zero() {
            return CF::new(self.re.mul(&o.re, p, RM), self.im.mul(&o.re, p, RM), p);
        }
        if self.im.is_zero() {
            return CF::new(o.re.mul(&self.re, p, RM), o.im.mul(&self.re, p, RM), p);
        }
        let re = self.re.mul(&o.re, p, RM).sub(&self.im.mul(&o.im, p, RM), p, RM);
        let im = self.re.mul(&o.im, p, RM).add(&self.im.mul(&o.re, p, RM), p, RM);
        CF::new(re, im, p)
    }

    pub fn neg(&self) -> CF {
        CF::new(self.re.neg(), self.im.neg(), self.prec)
    }

    pub fn conj(&self) -> CF {
        CF::new(self.re.clone(), self.im.neg(), self.prec)
    }

    pub fn abs2(&self) -> BigFloat {
        let p = self.prec;
        self.re.mul(&self.re, p, RM).add(&self.im.mul(&self.im, p, RM), p, RM)
    }

    pub fn abs(&self) -> BigFloat {
        self.abs2().sqrt(self.prec, RM)
    }

    pub fn inv(&self) -> CF {
        let p = self.prec;
        let n = self.abs2();
        CF::new(self.re.div(&n, p, RM), self.im.neg().div(&n, p, RM), p)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (bf_to_f64(&self.re), bf_to_f64(&self.im))
    }

    pub fn with_precision(&self, p: usize) -> CF {
        let mut re = self.re.clone();
        let mut im = self.im.clone();
        re.set_precision(p, RM).expect("precision");
        im.set_precision(p, RM).expect("precision");
        CF::new(re, im, p)
    }
}

impl fmt::Display for CF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im) = self.to_f64_pair();
        write!(f, "{re:.17e}{im:+.17e}i")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bigint_conversion() {
        let n: BigInt = "-123456789012345678901234567890".parse().unwrap();
        let v = bf_int(&n, 256);
        let back = bf_to_dec(&v);
        assert!(back.starts_with("-1.2345678901234567890123456789"), "{back}");
    }

    #[test]
    fn rational_conversion() {
        let q = Q::frac(-3, 8);
        assert_eq!(bf_to_f64(&bf_rational(&q, 128)), -0.375);
    }

    #[test]
    fn hex_roundtrip() {
        let x = bf_div(&BigFloat::from_u64(1, 256), &BigFloat::from_u64(3, 256), 256);
        let h = bf_to_hex(&x);
        assert_eq!(bf_cmp(&bf_from_hex(&h, 256).unwrap(), &x), Ordering::Equal);
    }

    #[test]
    fn complex_mul() {
        let p = 128;
        let a = CF::from_f64(0.6, 0.8, p);
        let b = a.mul(&a.conj());
        assert!((bf_to_f64(&b.re) - 1.0).abs() < 1e-15);
        assert!(bf_to_f64(&b.im).abs() < 1e-15);
    }
}
