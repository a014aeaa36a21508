//! Rationals with an `i128` fast path that promotes to `BigRational` on overflow.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};

type Small = Ratio<i128>;

/// A rational number. Values that fit in `i128` are always stored in the small form,
/// so structural equality is value equality.
#[derive(Clone, Debug)]
pub enum Q {
    S(Small),
    B(BigRational),
}

fn demote(r: BigRational) -> Q {
    match (r.numer().to_i128(), r.denom().to_i128()) {
        (Some(n), Some(d)) => Q::S(Small::new_raw(n, d)),
        _ => Q::B(r),
    }
}

impl Q {
    pub fn zero() -> Q {
        Q::S(Small::zero())
    }

    pub fn one() -> Q {
        Q::S(Small::one())
    }

    pub fn int(n: i64) -> Q {
        Q::S(Small::from_integer(n as i128))
    }

    pub fn frac(n: i64, d: i64) -> Q {
        assert!(d != 0, "zero denominator");
        Q::S(Small::new(n as i128, d as i128))
    }

    pub fn from_big(n: BigInt, d: BigInt) -> Q {
        demote(BigRational::new(n, d))
    }

    pub fn big(&self) -> BigRational {
        match self {
            Q::S(r) => BigRational::new_raw(BigInt::from(*r.numer()), BigInt::from(*r.denom())),
            Q::B(r) => r.clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match self {
            Q::S(r) => BigInt::from(*r.numer()),
            Q::B(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match self {
            Q::S(r) => BigInt::from(*r.denom()),
            Q::B(r) => r.denom().clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Q::S(r) => r.is_zero(),
            Q::B(r) => r.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Q::S(r) => r.is_one(),
            Q::B(_) => false,
        }
    }

    pub fn signum(&self) -> i32 {
        match self {
            Q::S(r) => r.numer().signum() as i32,
            Q::B(r) => {
                if r.is_positive() {
                    1
                } else if r.is_negative() {
                    -1
                } else {
                    0
                }
            }
        }
    }

    pub fn add(&self, o: &Q) -> Q {
        if o.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return o.clone();
        }
        if let (Q::S(a), Q::S(b)) = (self, o) {
            if let Some(c) = a.checked_add(b) {
                return Q::S(c);
            }
        }
        demote(self.big() + o.big())
    }

    pub fn sub(&self, o: &Q) -> Q {
        if o.is_zero() {
            return self.clone();
        }
        if let (Q::S(a), Q::S(b)) = (self, o) {
            if let Some(c) = a.checked_sub(b) {
                return Q::S(c);
            }
        }
        demote(self.big() - o.big())
    }

    pub fn mul(&self, o: &Q) -> Q {
        if self.is_zero() || o.is_zero() {
            return Q::zero();
        }
        if let (Q::S(a), Q::S(b)) = (self, o) {
            if let Some(c) = a.checked_mul(b) {
                return Q::S(c);
            }
        }
        demote(self.big() * o.big())
    }

    pub fn mul_int(&self, k: i64) -> Q {
        self.mul(&Q::int(k))
    }

    pub fn neg(&self) -> Q {
        match self {
            Q::S(r) => match r.numer().checked_neg() {
                Some(n) => Q::S(Small::new_raw(n, *r.denom())),
                None => demote(-self.big()),
            },
            Q::B(r) => demote(-r.clone()),
        }
    }

    pub fn inv(&self) -> Q {
        assert!(!self.is_zero(), "inverse of zero");
        match self {
            Q::S(r) if *r.numer() != i128::MIN => Q::S(r.recip()),
            _ => demote(self.big().recip()),
        }
    }

    pub fn div(&self, o: &Q) -> Q {
        self.mul(&o.inv())
    }

    pub fn abs(&self) -> Q {
        if self.signum() < 0 {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Q::S(r) => *r.numer() as f64 / *r.denom() as f64,
            Q::B(r) => r.to_f64().unwrap_or(f64::NAN),
        }
    }

    /// Writes `self = t^2 * f` with `f` in `allowed` (squarefree radicands) and returns `(t, f)`.
    pub fn sqrt_radical(&self, allowed: &[i64]) -> Option<(Q, i64)> {
        if self.signum() < 0 {
            return None;
        }
        if self.is_zero() {
            return Some((Q::zero(), 1));
        }
        let n = self.numer();
        let d = self.denom();
        let nd = &n * &d;
        for &f in allowed {
            let fb = BigInt::from(f);
            if (&nd % &fb).is_zero() {
                let rest = &nd / &fb;
                let s = rest.sqrt();
                if &s * &s == rest {
                    return Some((Q::from_big(s, d.clone()), f));
                }
            }
        }
        None
    }

    pub fn pow(&self, e: u32) -> Q {
        let mut acc = Q::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
}

impl Default for Q {
    fn default() -> Q {
        Q::zero()
    }
}

impl PartialEq for Q {
    fn eq(&self, o: &Q) -> bool {
        match (self, o) {
            (Q::S(a), Q::S(b)) => a == b,
            (Q::B(a), Q::B(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Q {}

impl Hash for Q {
    fn hash<H: Hasher>(&self, h: &mut H) {
        match self {
            Q::S(r) => {
                r.numer().hash(h);
                r.denom().hash(h);
            }
            Q::B(r) => {
                r.numer().hash(h);
                r.denom().hash(h);
            }
        }
    }
}

impl PartialOrd for Q {
    fn partial_cmp(&self, o: &Q) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Q {
    fn cmp(&self, o: &Q) -> Ordering {
        match (self, o) {
            (Q::S(a), Q::S(b)) => a.cmp(b),
            _ => self.big().cmp(&o.big()),
        }
    }
}

impl fmt::Display for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.denom();
        if d.is_one() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), d)
        }
    }
}

impl FromStr for Q {
    type Err = String;
    fn from_str(s: &str) -> Result<Q, String> {
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| format!("bad rational numerator in {s:?}"))?;
        let d: BigInt = d.parse().map_err(|_| format!("bad rational denominator in {s:?}"))?;
        if d.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        Ok(Q::from_big(n, d))
    }
}

impl From<i64> for Q {
    fn from(n: i64) -> Q {
        Q::int(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overflow_promotes_and_demotes() {
        let big = Q::int(i64::MAX);
        let sq = big.mul(&big).mul(&big);
        assert!(matches!(sq, Q::B(_)));
        let back = sq.div(&big).div(&big);
        assert_eq!(back, big);
        assert!(matches!(back, Q::S(_)));
    }

    #[test]
    fn parse_print() {
        let q: Q = "-6/8".parse().unwrap();
        assert_eq!(q, Q::frac(-3, 4));
        assert_eq!(q.to_string(), "-3/4");
        assert_eq!("7".parse::<Q>().unwrap().to_string(), "7");
    }

    #[test]
    fn radicals() {
        assert_eq!(Q::frac(1, 2).sqrt_radical(&[1, 2, 5, 10]), Some((Q::frac(1, 2), 2)));
        assert_eq!(Q::frac(4, 9).sqrt_radical(&[1, 2, 5, 10]), Some((Q::frac(2, 3), 1)));
        assert_eq!(Q::frac(1, 3).sqrt_radical(&[1, 2, 5, 10]), None);
    }
}
