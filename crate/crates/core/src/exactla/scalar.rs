use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::LinAlgError;

/// The coefficient field of a matrix: the rationals or a prime field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ring {
    Rational,
    Prime(u64),
}

impl Ring {
    /// Prime field with modulus `p`. The modulus must be a prime below 2^32.
    pub fn prime(p: u64) -> Result<Ring, LinAlgError> {
        if !(2..1 << 32).contains(&p) || !is_prime(p) {
            return Err(LinAlgError::BadModulus(p));
        }
        Ok(Ring::Prime(p))
    }

    pub fn zero(self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(self, v: i64) -> Scalar {
        match self {
            Ring::Rational => Scalar::Rational(BigRational::from_integer(BigInt::from(v))),
            Ring::Prime(p) => Scalar::Prime {
                value: v.rem_euclid(p as i64) as u64,
                modulus: p,
            },
        }
    }

    /// Parses a scalar in this ring. Rationals accept `a/b` or `a`; prime
    /// field elements accept `x mod p` (with matching `p`) or a bare integer.
    pub fn parse_scalar(self, text: &str) -> Result<Scalar, LinAlgError> {
        let bad = || LinAlgError::BadScalar(text.to_string());
        let text = text.trim();
        match self {
            Ring::Rational => {
                let (num, den) = match text.split_once('/') {
                    Some((n, d)) => (n.trim(), d.trim()),
                    None => (text, "1"),
                };
                let num = BigInt::from_str(num).map_err(|_| bad())?;
                let den = BigInt::from_str(den).map_err(|_| bad())?;
                if den.is_zero() {
                    return Err(bad());
                }
                Ok(Scalar::Rational(BigRational::new(num, den)))
            }
            Ring::Prime(p) => {
                let (value, modulus) = match text.split_once("mod") {
                    Some((v, m)) => (v.trim(), Some(m.trim())),
                    None => (text, None),
                };
                if let Some(m) = modulus {
                    if m.parse::<u64>().map_err(|_| bad())? != p {
                        return Err(bad());
                    }
                }
                let v = value.parse::<i64>().map_err(|_| bad())?;
                Ok(self.from_i64(v))
            }
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Rational => write!(f, "Q"),
            Ring::Prime(p) => write!(f, "Fp:{p}"),
        }
    }
}

impl FromStr for Ring {
    type Err = LinAlgError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "Q" | "q" => Ok(Ring::Rational),
            other => {
                let p = other
                    .strip_prefix("Fp:")
                    .and_then(|p| p.parse::<u64>().ok())
                    .ok_or_else(|| LinAlgError::BadRing(other.to_string()))?;
                Ring::prime(p)
            }
        }
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// An exact field element. Rationals are kept reduced with positive
/// denominator; prime field elements are kept in `0..modulus`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Prime { value: u64, modulus: u64 },
}

impl Scalar {
    pub fn ring(&self) -> Ring {
        match self {
            Scalar::Rational(_) => Ring::Rational,
            Scalar::Prime { modulus, .. } => Ring::Prime(*modulus),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_zero(),
            Scalar::Prime { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_one(),
            Scalar::Prime { value, .. } => *value == 1,
        }
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Scalar::Rational(q) => Scalar::Rational(q.recip()),
            Scalar::Prime { value, modulus } => Scalar::Prime {
                value: pow_mod(*value, modulus - 2, *modulus),
                modulus: *modulus,
            },
        })
    }

    fn mismatch(a: &Scalar, b: &Scalar) -> ! {
        panic!("ring mismatch: {} vs {}", a.ring(), b.ring())
    }
}

fn pow_mod(base: u64, mut exp: u64, modulus: u64) -> u64 {
    let m = modulus as u128;
    let mut acc: u128 = 1;
    let mut b = base as u128 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(q) => {
                let den = if q.denom().is_negative() {
                    -q.denom()
                } else {
                    q.denom().clone()
                };
                write!(f, "{}/{}", q.numer(), den)
            }
            Scalar::Prime { value, modulus } => write!(f, "{value} mod {modulus}"),
        }
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;

    fn add(self, rhs: &'a Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            (Scalar::Prime { value: a, modulus: p }, Scalar::Prime { value: b, modulus: q })
                if p == q =>
            {
                Scalar::Prime {
                    value: ((*a as u128 + *b as u128) % *p as u128) as u64,
                    modulus: *p,
                }
            }
            _ => Scalar::mismatch(self, rhs),
        }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;

    fn sub(self, rhs: &'a Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;

    fn mul(self, rhs: &'a Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (Scalar::Prime { value: a, modulus: p }, Scalar::Prime { value: b, modulus: q })
                if p == q =>
            {
                Scalar::Prime {
                    value: ((*a as u128 * *b as u128) % *p as u128) as u64,
                    modulus: *p,
                }
            }
            _ => Scalar::mismatch(self, rhs),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;

    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::Prime { value, modulus } => Scalar::Prime {
                value: (modulus - value) % modulus,
                modulus: *modulus,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_strings_are_reduced() {
        let q = Ring::Rational.parse_scalar("6/-4").unwrap();
        assert_eq!(q.to_string(), "-3/2");
        assert_eq!(Ring::Rational.from_i64(0).to_string(), "0/1");
        assert_eq!(Ring::Rational.parse_scalar("7").unwrap().to_string(), "7/1");
        assert!(Ring::Rational.parse_scalar("1/0").is_err());
    }

    #[test]
    fn prime_field_arithmetic() {
        let f5 = Ring::prime(5).unwrap();
        let a = f5.from_i64(3);
        let b = f5.from_i64(4);
        assert_eq!((&a + &b).to_string(), "2 mod 5");
        assert_eq!((&a * &b).to_string(), "2 mod 5");
        assert_eq!(a.inv().unwrap(), f5.from_i64(2));
        assert_eq!(f5.from_i64(-1), f5.from_i64(4));
        assert_eq!(f5.parse_scalar("3 mod 5").unwrap(), a);
        assert!(f5.parse_scalar("3 mod 7").is_err());
        // 2 == 0 over F_2
        assert!(Ring::prime(2).unwrap().from_i64(2).is_zero());
    }

    #[test]
    fn ring_parsing() {
        assert_eq!("Q".parse::<Ring>().unwrap(), Ring::Rational);
        assert_eq!("Fp:7".parse::<Ring>().unwrap(), Ring::Prime(7));
        assert!("Fp:8".parse::<Ring>().is_err());
        assert!("R".parse::<Ring>().is_err());
        assert_eq!(Ring::Prime(7).to_string(), "Fp:7");
    }
}
