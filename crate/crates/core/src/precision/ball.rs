//! Midpoint-radius enclosures of real numbers.
//!
//! A [`Ball`] holds an exact dyadic midpoint, an upper-bounded radius and a
//! working precision. Every arithmetic operation returns a ball that contains
//! all results of applying the operation to points of the input balls.
//! Precision 0 means "exact": no rounding is applied.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::dyadic::Dyadic;
use super::mag::Mag;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq)]
pub struct Ball {
    mid: Dyadic,
    rad: Mag,
    prec: u32,
}

fn join_prec(a: u32, b: u32) -> u32 {
    match (a, b) {
        (0, p) | (p, 0) => p,
        (p, q) => p.max(q),
    }
}

impl Ball {
    pub fn new(mid: Dyadic, rad: Mag, prec: u32) -> Ball {
        Ball { mid, rad, prec }
    }

    pub fn exact(mid: Dyadic) -> Ball {
        Ball { mid, rad: Mag::ZERO, prec: 0 }
    }

    pub fn from_int<T: Into<BigInt>>(v: T) -> Ball {
        Ball::exact(Dyadic::from_int(v))
    }

    pub fn zero() -> Ball {
        Ball::exact(Dyadic::zero())
    }

    pub fn one() -> Ball {
        Ball::from_int(1)
    }

    /// Encloses `r` with radius at most `2^-k` (radius 0 when `r` is dyadic
    /// with denominator dividing `2^k`).
    pub fn from_rational(r: &BigRational, k: u32, prec: u32) -> Ball {
        let (mid, exact) = Dyadic::from_rational_floor(r, k as i64);
        let rad = if exact { Mag::ZERO } else { Mag::pow2(-(k as i64)) };
        Ball { mid, rad, prec }
    }

    pub fn mid(&self) -> &Dyadic {
        &self.mid
    }

    pub fn rad(&self) -> Mag {
        self.rad
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn with_prec(mut self, prec: u32) -> Ball {
        self.prec = prec;
        self.round_mid()
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    pub fn lower(&self) -> Dyadic {
        self.mid.sub(&Dyadic::from_mag(&self.rad))
    }

    pub fn upper(&self) -> Dyadic {
        self.mid.add(&Dyadic::from_mag(&self.rad))
    }

    /// Upper bound on `max |v|` over the ball.
    pub fn mag_up(&self) -> Mag {
        self.mid.mag_up().add(&self.rad)
    }

    /// Widens the radius by `err`.
    pub fn add_error(mut self, err: &Mag) -> Ball {
        self.rad = self.rad.add(err);
        self
    }

    fn round_mid(mut self) -> Ball {
        let (mid, err) = self.mid.round(self.prec);
        self.mid = mid;
        self.rad = self.rad.add(&err);
        self
    }

    pub fn contains_rational(&self, r: &BigRational) -> bool {
        let lo = self.lower().to_rational();
        let hi = self.upper().to_rational();
        &lo <= r && r <= &hi
    }

    pub fn contains_dyadic(&self, d: &Dyadic) -> bool {
        self.lower().cmp_value(d) != Ordering::Greater && self.upper().cmp_value(d) != Ordering::Less
    }

    /// True if the two enclosures share at least one point.
    pub fn overlaps(&self, other: &Ball) -> bool {
        self.lower().cmp_value(&other.upper()) != Ordering::Greater
            && other.lower().cmp_value(&self.upper()) != Ordering::Greater
    }

    /// `Some(sign)` when every point of the ball has that sign.
    pub fn sign(&self) -> Option<Sign> {
        let lo = self.lower();
        let hi = self.upper();
        if lo.sign() == Sign::Plus {
            Some(Sign::Plus)
        } else if hi.sign() == Sign::Minus {
            Some(Sign::Minus)
        } else if self.is_exact() && self.mid.is_zero() {
            Some(Sign::NoSign)
        } else {
            None
        }
    }

    /// True if every point of the ball is strictly greater than `t`.
    pub fn gt_int(&self, t: i64) -> bool {
        self.lower().cmp_value(&Dyadic::from_int(t)) == Ordering::Greater
    }

    pub fn neg(&self) -> Ball {
        Ball { mid: self.mid.neg(), rad: self.rad, prec: self.prec }
    }

    pub fn add(&self, other: &Ball) -> Ball {
        let prec = join_prec(self.prec, other.prec);
        let rad = self.rad.add(&other.rad);
        if prec == 0 {
            return Ball { mid: self.mid.add(&other.mid), rad, prec };
        }
        // operands far below the last kept bit go straight into the radius
        let top = self.mid.top_exp().max(other.mid.top_exp());
        let cutoff = top.saturating_sub(prec as i64 + 8);
        let negligible = |d: &Dyadic| !d.is_zero() && d.top_exp() < cutoff;
        let (mid, extra) = if negligible(&other.mid) {
            (self.mid.clone(), other.mid.mag_up())
        } else if negligible(&self.mid) {
            (other.mid.clone(), self.mid.mag_up())
        } else {
            (self.mid.add(&other.mid), Mag::ZERO)
        };
        Ball { mid, rad: rad.add(&extra), prec }.round_mid()
    }

    pub fn sub(&self, other: &Ball) -> Ball {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Ball) -> Ball {
        let prec = join_prec(self.prec, other.prec);
        let a = self.mid.mag_up();
        let b = other.mid.mag_up();
        let rad = a
            .mul(&other.rad)
            .add(&b.mul(&self.rad))
            .add(&self.rad.mul(&other.rad));
        Ball { mid: self.mid.mul(&other.mid), rad, prec }.round_mid()
    }

    pub fn mul_int(&self, k: i64) -> Ball {
        self.mul(&Ball::from_int(k))
    }

    pub fn mul_2exp(&self, e: i64) -> Ball {
        Ball { mid: self.mid.mul_2exp(e), rad: self.rad.mul_2exp(e), prec: self.prec }
    }

    /// Division by a positive integer; needs a non-zero working precision
    /// unless the quotient is exact.
    pub fn div_u64(&self, d: u64) -> Ball {
        assert!(d > 0, "division by zero");
        let prec = if self.prec == 0 { 128 } else { self.prec };
        let shift = (prec as i64 + 2 + 64 - self.mid.bits() as i64).max(0);
        let scaled = self.mid.mantissa() << shift as usize;
        let dd = BigInt::from(d);
        let q = num_integer::Integer::div_floor(&scaled, &dd);
        let exact = &q * &dd == scaled;
        let exp = self.mid.exponent() - shift;
        let mid = Dyadic::new(q, exp);
        let mut rad = self.rad.div_u64(d);
        if !exact {
            rad = rad.add(&Mag::pow2(exp));
        }
        Ball { mid, rad, prec: self.prec }.round_mid()
    }

    /// `self^n` by binary exponentiation with outward rounding at every step.
    pub fn pow(&self, n: u64) -> Ball {
        let mut result = Ball { mid: Dyadic::from_int(1), rad: Mag::ZERO, prec: self.prec };
        if n == 0 {
            return result;
        }
        let mut base = self.clone();
        let mut e = n;
        loop {
            if e & 1 == 1 {
                result = Ball::mul(&result, &base);
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = Ball::mul(&base, &base);
        }
        result
    }

    /// `floor(v)` when it is the same integer for every point of the ball.
    pub fn floor_if_determined(&self) -> Option<BigInt> {
        let lo = self.lower().floor();
        let hi = self.upper().floor();
        (lo == hi).then_some(lo)
    }

    /// Exponential of a ball whose points are all non-negative. Uses a
    /// Taylor series on the fractional part with a Lagrange remainder and
    /// multiplies back by `e^k` for the integer part `k`.
    pub fn exp(&self) -> Result<Ball> {
        if self.lower().sign() == Sign::Minus {
            return Err(Error::Domain("exp is evaluated only on non-negative arguments".into()));
        }
        if self.rad > Mag::pow2(-1) {
            return Err(Error::Domain("exp argument enclosure too wide".into()));
        }
        let prec = if self.prec == 0 { 128 } else { self.prec };
        let k = self.mid.floor();
        let k: u64 = u64::try_from(&k)
            .ok()
            .filter(|&k| k < (1 << 32))
            .ok_or_else(|| Error::Domain("exp argument too large".into()))?;
        let frac = Ball::exact(self.mid.sub(&Dyadic::from_int(k))).with_prec(prec + 16);
        let mut value = exp_series(&frac, prec + 16);
        if k > 0 {
            let e = exp_series(&Ball::one().with_prec(prec + 32), prec + 32);
            value = Ball::mul(&value, &e.pow(k));
        }
        if !self.rad.is_zero() {
            // |e^(m+t) - e^m| <= e^m * |t| * e^|t| <= e^m * r * 2 for r <= 1/2
            let widen = value.mag_up().mul(&self.rad).mul_u64(2);
            value = value.add_error(&widen);
        }
        Ok(value.with_prec(prec))
    }

    pub fn to_f64(&self) -> f64 {
        self.mid.to_f64()
    }

    pub fn to_rational_mid(&self) -> BigRational {
        self.mid.to_rational()
    }
}

/// `e^x` for an exact `0 <= x <= 1`.
fn exp_series(x: &Ball, prec: u32) -> Ball {
    let mut sum = Ball::one().with_prec(prec);
    let mut term = Ball::one().with_prec(prec);
    let eps = Mag::pow2(-(prec as i64) - 4);
    let mut j = 1u64;
    loop {
        term = Ball::mul(&term, x).div_u64(j);
        sum = Ball::add(&sum, &term);
        j += 1;
        if term.mag_up() < eps && j > 2 {
            break;
        }
    }
    // next omitted term times e^x (< 3) bounds the Lagrange remainder
    let tail = Ball::mul(&term, x).div_u64(j).mag_up().mul_u64(3);
    sum.add_error(&tail)
}

/// Enclosure of `sqrt(n)` with radius at most `2^-k`.
pub fn sqrt_int(n: &BigInt, k: u32, prec: u32) -> Ball {
    assert!(!n.is_negative(), "square root of a negative integer");
    let scaled = n << (2 * k as usize);
    let root = scaled.sqrt();
    let exact = &root * &root == scaled;
    let mid = Dyadic::new(root, -(k as i64));
    let rad = if exact { Mag::ZERO } else { Mag::pow2(-(k as i64)) };
    Ball { mid, rad, prec }
}

impl fmt::Debug for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e} +/- {} @{}]", self.mid.to_f64(), self.rad, self.prec)
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} +/- {}]", self.mid.to_f64(), self.rad)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<Ball> for Ball {
            type Output = Ball;
            fn $method(self, rhs: Ball) -> Ball {
                Ball::$method(&self, &rhs)
            }
        }
        impl<'a> $trait<&'a Ball> for &'a Ball {
            type Output = Ball;
            fn $method(self, rhs: &'a Ball) -> Ball {
                Ball::$method(self, rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for Ball {
    type Output = Ball;
    fn neg(self) -> Ball {
        Ball::neg(&self)
    }
}

impl Zero for Ball {
    fn zero() -> Ball {
        Ball::zero()
    }
    fn is_zero(&self) -> bool {
        self.mid.is_zero() && self.rad.is_zero()
    }
}

impl One for Ball {
    fn one() -> Ball {
        Ball::one()
    }
}
