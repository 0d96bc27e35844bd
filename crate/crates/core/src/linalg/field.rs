use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The base field: a prime field `F_p` or the rationals.
///
/// `p = 0` denotes the rationals in every external format.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Field {
    Prime(u32),
    Rational,
}

/// A field element. Prime-field values are kept as canonical residues in
/// `0..p`; rationals are always reduced with a positive denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Fp(u32),
    Q(BigRational),
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p as u64 {
        if p as u64 % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn inv_mod(a: u32, p: u32) -> u32 {
    debug_assert!(a % p != 0);
    let (mut t, mut new_t) = (0i64, 1i64);
    let (mut r, mut new_r) = (p as i64, a as i64);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    if t < 0 {
        t += p as i64;
    }
    t as u32
}

impl Field {
    /// Build `F_p` (or the rationals when `p == 0`).
    pub fn new(p: u32) -> Result<Field> {
        if p == 0 {
            Ok(Field::Rational)
        } else if is_prime(p) && p < (1 << 31) {
            Ok(Field::Prime(p))
        } else {
            Err(Error::Input(format!("{p} is not a supported prime")))
        }
    }

    pub fn prime(p: u32) -> Field {
        Field::new(p).expect("prime modulus")
    }

    pub fn characteristic(&self) -> u32 {
        match self {
            Field::Prime(p) => *p,
            Field::Rational => 0,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Field::Prime(_))
    }

    /// Number of elements, `None` for the rationals.
    pub fn size(&self) -> Option<u64> {
        match self {
            Field::Prime(p) => Some(*p as u64),
            Field::Rational => None,
        }
    }

    pub fn zero(&self) -> Scalar {
        match self {
            Field::Prime(_) => Scalar::Fp(0),
            Field::Rational => Scalar::Q(BigRational::zero()),
        }
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        match self {
            Field::Prime(p) => Scalar::Fp(v.rem_euclid(*p as i64) as u32),
            Field::Rational => Scalar::Q(BigRational::from_integer(BigInt::from(v))),
        }
    }

    pub fn from_ratio(&self, num: i64, den: i64) -> Result<Scalar> {
        if den == 0 {
            return Err(Error::Input("zero denominator".into()));
        }
        let n = self.from_i64(num);
        let d = self.from_i64(den);
        if d.is_zero() {
            return Err(Error::Input(format!("denominator {den} vanishes in {self}")));
        }
        Ok(self.div(&n, &d))
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (Field::Prime(p), Scalar::Fp(x), Scalar::Fp(y)) => Scalar::Fp(((*x as u64 + *y as u64) % *p as u64) as u32),
            (Field::Rational, Scalar::Q(x), Scalar::Q(y)) => Scalar::Q(x + y),
            _ => panic!("scalar does not belong to {self}"),
        }
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match (self, a) {
            (Field::Prime(p), Scalar::Fp(x)) => Scalar::Fp(if *x == 0 { 0 } else { p - x }),
            (Field::Rational, Scalar::Q(x)) => Scalar::Q(-x),
            _ => panic!("scalar does not belong to {self}"),
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (Field::Prime(p), Scalar::Fp(x), Scalar::Fp(y)) => Scalar::Fp(((*x as u64 * *y as u64) % *p as u64) as u32),
            (Field::Rational, Scalar::Q(x), Scalar::Q(y)) => Scalar::Q(x * y),
            _ => panic!("scalar does not belong to {self}"),
        }
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self, a: &Scalar) -> Scalar {
        assert!(!a.is_zero(), "inverse of zero");
        match (self, a) {
            (Field::Prime(p), Scalar::Fp(x)) => Scalar::Fp(inv_mod(*x, *p)),
            (Field::Rational, Scalar::Q(x)) => Scalar::Q(x.recip()),
            _ => panic!("scalar does not belong to {self}"),
        }
    }

    pub fn div(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.mul(a, &self.inv(b))
    }

    pub fn pow(&self, a: &Scalar, mut e: u64) -> Scalar {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Uniform element of `F_p`; over the rationals a small integer in `-4..=4`.
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Scalar {
        match self {
            Field::Prime(p) => Scalar::Fp(rng.gen_range(0..*p)),
            Field::Rational => self.from_i64(rng.gen_range(-4..=4)),
        }
    }

    /// All elements of a prime field in canonical order.
    pub fn elements(&self) -> Option<Vec<Scalar>> {
        match self {
            Field::Prime(p) => Some((0..*p).map(Scalar::Fp).collect()),
            Field::Rational => None,
        }
    }

    /// Parse `"3"`, `"-1"`, `"1/2"`.
    pub fn parse(&self, s: &str) -> Result<Scalar> {
        let s = s.trim();
        let bad = || Error::Input(format!("cannot parse scalar `{s}`"));
        if let Some((n, d)) = s.split_once('/') {
            match self {
                Field::Rational => {
                    let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                    let d: BigInt = d.trim().parse().map_err(|_| bad())?;
                    if d.is_zero() {
                        return Err(bad());
                    }
                    Ok(Scalar::Q(BigRational::new(n, d)))
                }
                Field::Prime(_) => {
                    let n: i64 = n.trim().parse().map_err(|_| bad())?;
                    let d: i64 = d.trim().parse().map_err(|_| bad())?;
                    self.from_ratio(n, d)
                }
            }
        } else {
            match self {
                Field::Rational => {
                    let n: BigInt = s.parse().map_err(|_| bad())?;
                    Ok(Scalar::Q(BigRational::from_integer(n)))
                }
                Field::Prime(p) => {
                    let n: BigInt = s.parse().map_err(|_| bad())?;
                    let r = ((n % BigInt::from(*p)) + BigInt::from(*p)) % BigInt::from(*p);
                    Ok(Scalar::Fp(r.to_string().parse().unwrap()))
                }
            }
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Prime(p) => write!(f, "F_{p}"),
            Field::Rational => write!(f, "Q"),
        }
    }
}

impl Scalar {
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Fp(x) => *x == 0,
            Scalar::Q(q) => q.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Fp(x) => *x == 1,
            Scalar::Q(q) => q.is_one(),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Fp(x) => write!(f, "{x}"),
            Scalar::Q(q) => {
                if q.is_integer() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_arithmetic() {
        let f = Field::prime(5);
        let a = f.from_i64(3);
        let b = f.from_i64(4);
        assert_eq!(f.add(&a, &b), Scalar::Fp(2));
        assert_eq!(f.mul(&a, &b), Scalar::Fp(2));
        assert_eq!(f.mul(&a, &f.inv(&a)), f.one());
        assert_eq!(f.neg(&f.one()), Scalar::Fp(4));
        assert_eq!(f.from_i64(-1), Scalar::Fp(4));
    }

    #[test]
    fn rationals_stay_reduced() {
        let q = Field::Rational;
        let a = q.parse("2/4").unwrap();
        assert_eq!(a.to_string(), "1/2");
        let b = q.parse("-3/-6").unwrap();
        assert_eq!(b, a);
        assert_eq!(q.parse("5/-7").unwrap().to_string(), "-5/7");
        assert_eq!(q.div(&q.one(), &q.from_i64(2)), a);
    }

    #[test]
    fn rejects_composite_modulus() {
        assert!(Field::new(4).is_err());
        assert!(Field::new(1).is_err());
        assert_eq!(Field::new(0).unwrap(), Field::Rational);
    }

    #[test]
    fn parse_in_prime_field() {
        let f = Field::prime(3);
        assert_eq!(f.parse("-1").unwrap(), Scalar::Fp(2));
        assert_eq!(f.parse("1/2").unwrap(), Scalar::Fp(2));
        assert!(f.parse("1/3").is_err());
    }
}
