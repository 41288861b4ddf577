//! Exact dyadic rationals `man * 2^exp`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::mag::{ldexp, Mag};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    man: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn zero() -> Dyadic {
        Dyadic { man: BigInt::zero(), exp: 0 }
    }

    pub fn new(man: BigInt, exp: i64) -> Dyadic {
        Dyadic { man, exp }.canonical()
    }

    pub fn from_int<T: Into<BigInt>>(v: T) -> Dyadic {
        Dyadic::new(v.into(), 0)
    }

    /// Strips trailing zero bits so equal values compare equal structurally.
    fn canonical(mut self) -> Dyadic {
        if self.man.is_zero() {
            self.exp = 0;
            return self;
        }
        if let Some(tz) = self.man.trailing_zeros() {
            if tz > 0 {
                self.man >>= tz;
                self.exp += tz as i64;
            }
        }
        self
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.man
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.man.is_zero()
    }

    pub fn sign(&self) -> Sign {
        self.man.sign()
    }

    /// Bit length of the mantissa.
    pub fn bits(&self) -> u64 {
        self.man.bits()
    }

    /// Smallest `e` with `|self| < 2^e`; `i64::MIN` for zero.
    pub fn top_exp(&self) -> i64 {
        if self.is_zero() {
            i64::MIN
        } else {
            self.exp + self.man.bits() as i64
        }
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic { man: -&self.man, exp: self.exp }
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic { man: self.man.abs(), exp: self.exp }
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let a = &self.man << (self.exp - e) as usize;
        let b = &other.man << (other.exp - e) as usize;
        Dyadic::new(a + b, e)
    }

    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        Dyadic::new(&self.man * &other.man, self.exp + other.exp)
    }

    pub fn mul_2exp(&self, e: i64) -> Dyadic {
        if self.is_zero() {
            return self.clone();
        }
        Dyadic { man: self.man.clone(), exp: self.exp + e }
    }

    /// Truncates the mantissa to at most `prec` bits (toward negative
    /// infinity). Returns the rounded value and an upper bound on the error.
    pub fn round(&self, prec: u32) -> (Dyadic, Mag) {
        let bits = self.man.bits();
        if prec == 0 || bits <= prec as u64 {
            return (self.clone(), Mag::ZERO);
        }
        let shift = bits - prec as u64;
        let man = &self.man >> shift as usize;
        let exp = self.exp + shift as i64;
        let rounded = Dyadic::new(man, exp);
        let err = if rounded == *self { Mag::ZERO } else { Mag::pow2(exp) };
        (rounded, err)
    }

    /// `floor(self)` as an integer.
    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.man << self.exp as usize
        } else {
            // arithmetic shift on BigInt rounds toward negative infinity
            &self.man >> (-self.exp) as usize
        }
    }

    /// Upper bound on `|self|`.
    pub fn mag_up(&self) -> Mag {
        Mag::from_bigint_scaled(&self.man, self.exp)
    }

    /// Exact dyadic value of a magnitude bound.
    pub fn from_mag(m: &Mag) -> Dyadic {
        Dyadic::new(BigInt::from(m.mantissa()), m.exponent())
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.man << self.exp as usize)
        } else {
            BigRational::new(self.man.clone(), BigInt::one() << (-self.exp) as usize)
        }
    }

    /// Floor of `r * 2^k` as a dyadic with exponent `-k`, and whether the
    /// division was exact.
    pub fn from_rational_floor(r: &BigRational, k: i64) -> (Dyadic, bool) {
        let (num, den) = (r.numer(), r.denom());
        let scaled = if k >= 0 { num << k as usize } else { num >> (-k) as usize };
        let q = scaled.div_floor(den);
        let d = Dyadic::new(q, -k);
        let exact = d.to_rational() == *r;
        (d, exact)
    }

    /// Nearest `f64` (mantissa truncated to 64 bits first, so the result is
    /// within two ulps).
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.man.bits();
        let (m, e) = if bits > 64 {
            let shift = bits - 64;
            (&self.man >> shift as usize, self.exp + shift as i64)
        } else {
            (self.man.clone(), self.exp)
        };
        ldexp(m.to_f64().unwrap_or(0.0), e)
    }

    pub fn cmp_value(&self, other: &Dyadic) -> Ordering {
        self.sub(other).man.sign().cmp_zero()
    }
}

trait SignOrd {
    fn cmp_zero(self) -> Ordering;
}

impl SignOrd for Sign {
    fn cmp_zero(self) -> Ordering {
        match self {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp_value(other))
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.man, self.exp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_error_bound_holds() {
        let d = Dyadic::new(BigInt::from(0b1011_0111u32), -3);
        let (r, err) = d.round(4);
        let diff = d.sub(&r).abs();
        assert!(diff.to_rational() <= Dyadic::from_mag(&err).to_rational());
        assert!(r.bits() <= 4);
    }

    #[test]
    fn floor_negative() {
        let d = Dyadic::new(BigInt::from(-5), -1); // -2.5
        assert_eq!(d.floor(), BigInt::from(-3));
        let d = Dyadic::new(BigInt::from(7), -1); // 3.5
        assert_eq!(d.floor(), BigInt::from(3));
    }

    #[test]
    fn rational_floor() {
        let r = BigRational::new(BigInt::from(7), BigInt::from(3));
        let (d, exact) = Dyadic::from_rational_floor(&r, 10);
        assert!(!exact);
        assert_eq!(d.to_rational(), BigRational::new(BigInt::from(2389), BigInt::from(1024)));
        let (d, exact) = Dyadic::from_rational_floor(&BigRational::new(3.into(), 4.into()), 10);
        assert!(exact);
        assert_eq!(d.to_f64(), 0.75);
    }
}
