//! Exact real numbers in a multi-quadratic field.
//!
//! An [`ExactReal`] is a finite sum `sum_s r_s * sqrt(s)` with rational
//! coefficients `r_s` and distinct square-free radicands `s` (radicand 1 is
//! the rational part). Plain rationals and quadratic surds `a + b*sqrt(d)`
//! are the common cases. The set is closed under `+`, `-` and `*`, and square
//! roots of distinct square-free integers are linearly independent over the
//! rationals, so zero testing is exact.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::ball::{sqrt_int, Ball};
use super::dyadic::Dyadic;
#[cfg(test)]
use super::mag::Mag;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactReal {
    // radicand -> coefficient; zero coefficients are never stored
    terms: BTreeMap<BigUint, BigRational>,
}

/// Splits `n` into `(k, s)` with `n = k^2 * s` and `s` square-free.
fn square_free_split(n: u64) -> (u64, u64) {
    let mut k = 1u64;
    let mut s = 1u64;
    let mut m = n;
    let mut p = 2u64;
    while p.saturating_mul(p) <= m {
        let mut e = 0;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        for _ in 0..e / 2 {
            k *= p;
        }
        if e % 2 == 1 {
            s *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    (k, s * m)
}

impl ExactReal {
    pub fn zero() -> ExactReal {
        ExactReal { terms: BTreeMap::new() }
    }

    pub fn from_rational(r: BigRational) -> ExactReal {
        let mut x = ExactReal::zero();
        x.push_term(BigUint::one(), r);
        x
    }

    pub fn from_ratio(p: i64, q: i64) -> ExactReal {
        ExactReal::from_rational(BigRational::new(p.into(), q.into()))
    }

    pub fn from_integer<T: Into<BigInt>>(v: T) -> ExactReal {
        ExactReal::from_rational(BigRational::from_integer(v.into()))
    }

    /// `sqrt(n)`, with square factors pulled out of the radical.
    pub fn sqrt(n: u64) -> ExactReal {
        let (k, s) = square_free_split(n);
        let mut x = ExactReal::zero();
        if n == 0 {
            return x;
        }
        x.push_term(BigUint::from(s), BigRational::from_integer(BigInt::from(k)));
        x
    }

    /// `a + b*sqrt(d)`.
    pub fn quadratic(a: BigRational, b: BigRational, d: u64) -> ExactReal {
        ExactReal::from_rational(a) + ExactReal::from_rational(b) * ExactReal::sqrt(d)
    }

    /// The golden ratio `(1 + sqrt(5)) / 2`.
    pub fn golden_ratio() -> ExactReal {
        let half = BigRational::new(1.into(), 2.into());
        ExactReal::quadratic(half.clone(), half, 5)
    }

    fn push_term(&mut self, radicand: BigUint, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(radicand.clone()).or_insert_with(BigRational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&radicand);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_rational(&self) -> bool {
        self.terms.keys().all(|k| k.is_one())
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if !self.is_rational() {
            return None;
        }
        Some(self.terms.get(&BigUint::one()).cloned().unwrap_or_else(BigRational::zero))
    }

    /// True for rationals whose denominator is a power of two.
    pub fn is_dyadic(&self) -> bool {
        self.as_rational().is_some_and(|r| {
            let d = r.denom();
            d.is_positive() && (d & (d - BigInt::one())).is_zero()
        })
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BigUint, &BigRational)> {
        self.terms.iter()
    }

    /// Division by a non-zero rational.
    pub fn div_rational(&self, q: &BigRational) -> Result<ExactReal> {
        if q.is_zero() {
            return Err(Error::Parse("division by zero".into()));
        }
        Ok(ExactReal {
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v / q)).collect(),
        })
    }

    /// Enclosure with radius at most `2^(1-bits) * max(1, |x|)`.
    pub fn refine(&self, bits: u32) -> Ball {
        assert!(bits >= 2, "refine needs at least 2 bits");
        if self.is_zero() {
            return Ball::zero().with_prec(bits);
        }
        let mag_bits = self.magnitude_bits();
        let mut guard = 8 + 2 * (self.terms.len() as u32);
        loop {
            let k = bits + guard;
            let prec = k + mag_bits.max(0) as u32 + 8;
            let mut acc = Ball::zero().with_prec(prec);
            for (radicand, coeff) in &self.terms {
                let c = Ball::from_rational(coeff, k + 8 + coeff_bits(coeff), prec);
                let term = if radicand.is_one() {
                    c
                } else {
                    let s = BigInt::from_biguint(Sign::Plus, radicand.clone());
                    let root_k = k + 8 + coeff_bits(coeff);
                    Ball::mul(&c, &sqrt_int(&s, root_k, prec))
                };
                acc = Ball::add(&acc, &term);
            }
            // lower bound of max(1, |x|)
            let lo = acc.lower();
            let hi = acc.upper();
            let abs_lower = if lo.sign() == Sign::Plus {
                lo
            } else if hi.sign() == Sign::Minus {
                hi.neg()
            } else {
                Dyadic::zero()
            };
            let one = Dyadic::from_int(1);
            let scale = if abs_lower.cmp_value(&one) == std::cmp::Ordering::Greater { abs_lower } else { one };
            let scaled_rad = Dyadic::from_mag(&acc.rad()).mul_2exp(bits as i64 - 1);
            if scaled_rad.cmp_value(&scale) != std::cmp::Ordering::Greater {
                return acc;
            }
            guard += 32;
        }
    }

    /// Upper estimate of `log2 |x|` (rough, used to size precisions).
    pub fn magnitude_bits(&self) -> i64 {
        let mut total = 0.0f64;
        for (radicand, coeff) in &self.terms {
            let c = coeff.abs().to_f64().unwrap_or(f64::MAX);
            let s = radicand.to_f64().unwrap_or(f64::MAX).sqrt();
            total += c * s;
        }
        if total <= 0.0 {
            0
        } else {
            total.log2().ceil() as i64 + 1
        }
    }

    /// Approximate value as `f64`.
    pub fn to_f64(&self) -> f64 {
        self.refine(64).to_f64()
    }

    /// Exact sign (-1, 0 or 1); refines until the enclosure excludes zero.
    pub fn signum(&self) -> i32 {
        if self.is_zero() {
            return 0;
        }
        if let Some(r) = self.as_rational() {
            return if r.is_positive() { 1 } else { -1 };
        }
        let mut bits = 64;
        loop {
            match self.refine(bits).sign() {
                Some(Sign::Plus) => return 1,
                Some(Sign::Minus) => return -1,
                _ => bits *= 2,
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn gt(&self, other: &ExactReal) -> bool {
        (self.clone() - other.clone()).signum() > 0
    }

    pub fn mul_int(&self, k: &BigInt) -> ExactReal {
        self.clone() * ExactReal::from_integer(k.clone())
    }
}

fn coeff_bits(c: &BigRational) -> u32 {
    let n = c.numer().bits() as i64;
    let d = c.denom().bits() as i64;
    (n - d + 2).max(0) as u32
}

impl Zero for ExactReal {
    fn zero() -> ExactReal {
        ExactReal::zero()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for ExactReal {
    fn one() -> ExactReal {
        ExactReal::from_integer(1)
    }
}

impl Add for ExactReal {
    type Output = ExactReal;
    fn add(mut self, rhs: ExactReal) -> ExactReal {
        for (k, v) in rhs.terms {
            self.push_term(k, v);
        }
        self
    }
}

impl Neg for ExactReal {
    type Output = ExactReal;
    fn neg(self) -> ExactReal {
        ExactReal { terms: self.terms.into_iter().map(|(k, v)| (k, -v)).collect() }
    }
}

impl Sub for ExactReal {
    type Output = ExactReal;
    fn sub(self, rhs: ExactReal) -> ExactReal {
        self + (-rhs)
    }
}

impl Mul for ExactReal {
    type Output = ExactReal;
    fn mul(self, rhs: ExactReal) -> ExactReal {
        let mut out = ExactReal::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                // sqrt(a)*sqrt(b) = g*sqrt((a/g)*(b/g)) for square-free a, b
                let g = a.gcd(b);
                let radicand = (a / &g) * (b / &g);
                let coeff = ca * cb * BigRational::from_integer(BigInt::from_biguint(Sign::Plus, g));
                out.push_term(radicand, coeff);
            }
        }
        out
    }
}

impl<'a> Add<&'a ExactReal> for &'a ExactReal {
    type Output = ExactReal;
    fn add(self, rhs: &'a ExactReal) -> ExactReal {
        self.clone() + rhs.clone()
    }
}

impl<'a> Mul<&'a ExactReal> for &'a ExactReal {
    type Output = ExactReal;
    fn mul(self, rhs: &'a ExactReal) -> ExactReal {
        self.clone() * rhs.clone()
    }
}

impl From<BigRational> for ExactReal {
    fn from(r: BigRational) -> ExactReal {
        ExactReal::from_rational(r)
    }
}

impl From<i64> for ExactReal {
    fn from(v: i64) -> ExactReal {
        ExactReal::from_integer(v)
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for ExactReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (radicand, coeff)) in self.terms.iter().enumerate() {
            let neg = coeff.is_negative();
            let abs = coeff.abs();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if radicand.is_one() {
                write!(f, "{}", fmt_rational(&abs))?;
            } else if abs.is_one() {
                write!(f, "sqrt({radicand})")?;
            } else {
                write!(f, "{}*sqrt({radicand})", fmt_rational(&abs))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ExactReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExactReal({self})")
    }
}

impl FromStr for ExactReal {
    type Err = Error;

    /// Accepts sums, differences and products of integers, exact decimals
    /// (`1.25`, `3e-2`), `sqrt(n)`, `phi` and parenthesised groups; division
    /// is allowed only by rational values.
    fn from_str(s: &str) -> Result<ExactReal> {
        let mut p = Parser { src: s.as_bytes(), pos: 0 };
        let v = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(Error::Parse(format!("unexpected input at offset {} in {s:?}", p.pos)));
        }
        Ok(v)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(Error::Parse(format!("expected '{}' at offset {}", c as char, self.pos)))
        }
    }

    fn expr(&mut self) -> Result<ExactReal> {
        let mut v = self.term()?;
        loop {
            if self.eat(b'+') {
                v = v + self.term()?;
            } else if self.eat(b'-') {
                v = v - self.term()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn term(&mut self) -> Result<ExactReal> {
        let mut v = self.factor()?;
        loop {
            if self.eat(b'*') {
                v = v * self.factor()?;
            } else if self.eat(b'/') {
                let d = self.factor()?;
                let q = d
                    .as_rational()
                    .ok_or_else(|| Error::Parse("division only by rational values".into()))?;
                v = v.div_rational(&q)?;
            } else {
                return Ok(v);
            }
        }
    }

    fn factor(&mut self) -> Result<ExactReal> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.factor()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.factor()
            }
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                self.expect(b')')?;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let word = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
                match word {
                    "phi" => Ok(ExactReal::golden_ratio()),
                    "sqrt" => {
                        self.expect(b'(')?;
                        let arg = self.expr()?;
                        self.expect(b')')?;
                        let n = arg
                            .as_rational()
                            .filter(|r| r.is_integer() && !r.is_negative())
                            .and_then(|r| r.numer().to_u64())
                            .ok_or_else(|| Error::Parse("sqrt takes a non-negative integer".into()))?;
                        Ok(ExactReal::sqrt(n))
                    }
                    other => Err(Error::Parse(format!("unknown identifier {other:?}"))),
                }
            }
            _ => Err(Error::Parse(format!("unexpected end or character at offset {}", self.pos))),
        }
    }

    fn number(&mut self) -> Result<ExactReal> {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.') {
            self.pos += 1;
        }
        let body = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        let mut exp10: i64 = 0;
        if self.pos < self.src.len() && (self.src[self.pos] == b'e' || self.src[self.pos] == b'E') {
            let save = self.pos;
            self.pos += 1;
            let sign_start = self.pos;
            if self.pos < self.src.len() && (self.src[self.pos] == b'-' || self.src[self.pos] == b'+') {
                self.pos += 1;
            }
            let digits_start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if self.pos == digits_start {
                self.pos = save;
            } else {
                let txt = std::str::from_utf8(&self.src[sign_start..self.pos]).unwrap_or("0");
                exp10 = txt.parse().map_err(|_| Error::Parse(format!("bad exponent {txt:?}")))?;
            }
        }
        let (int_part, frac_part) = match body.split_once('.') {
            Some((a, b)) => (a, b),
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(Error::Parse("empty number".into()));
        }
        let digits = format!("{int_part}{frac_part}");
        let mantissa: BigInt = digits.parse().map_err(|_| Error::Parse(format!("bad number {body:?}")))?;
        let scale = exp10 - frac_part.len() as i64;
        if scale.abs() > 10_000 {
            return Err(Error::Parse("decimal exponent out of range".into()));
        }
        let ten = BigInt::from(10);
        let r = if scale >= 0 {
            BigRational::from_integer(mantissa * num_traits::pow(ten, scale as usize))
        } else {
            BigRational::new(mantissa, num_traits::pow(ten, (-scale) as usize))
        };
        Ok(ExactReal::from_rational(r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        let x: ExactReal = "3/2".parse().unwrap();
        assert_eq!(x.as_rational(), Some(BigRational::new(3.into(), 2.into())));
        let d: ExactReal = "1.6".parse().unwrap();
        assert_eq!(d.as_rational(), Some(BigRational::new(8.into(), 5.into())));
        let e: ExactReal = "25e-2".parse().unwrap();
        assert_eq!(e, ExactReal::from_ratio(1, 4));
        let phi: ExactReal = "(1+sqrt(5))/2".parse().unwrap();
        assert_eq!(phi, ExactReal::golden_ratio());
        let s: ExactReal = "sqrt(12)".parse().unwrap();
        assert_eq!(s, ExactReal::from_integer(2) * ExactReal::sqrt(3));
        assert!("sqrt(2)/sqrt(3)".parse::<ExactReal>().is_err());
        assert!("2 +".parse::<ExactReal>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for s in ["0", "-7/3", "1/2 + 1/2*sqrt(5)", "sqrt(2) - 1", "-sqrt(10)/10 + 3"] {
            let x: ExactReal = s.parse().unwrap();
            let back: ExactReal = x.to_string().parse().unwrap();
            assert_eq!(x, back, "{s}");
        }
    }

    #[test]
    fn field_identities() {
        let phi = ExactReal::golden_ratio();
        // phi^2 = phi + 1
        assert_eq!(phi.clone() * phi.clone(), phi.clone() + ExactReal::from_integer(1));
        let r2 = ExactReal::sqrt(2);
        let r3 = ExactReal::sqrt(3);
        assert_eq!(r2.clone() * r3.clone(), ExactReal::sqrt(6));
        assert_eq!((r2.clone() * r3.clone()) * r2.clone(), ExactReal::from_integer(2) * r3);
        assert_eq!(ExactReal::sqrt(8), ExactReal::from_integer(2) * r2);
    }

    #[test]
    fn signs() {
        let x: ExactReal = "sqrt(2) - 1".parse().unwrap();
        assert_eq!(x.signum(), 1);
        let y: ExactReal = "sqrt(2) - 3/2".parse().unwrap();
        assert_eq!(y.signum(), -1);
        // 140/99 < sqrt(2) < 99/70
        let z: ExactReal = "sqrt(2) - 140/99".parse().unwrap();
        assert_eq!(z.signum(), 1);
        let w: ExactReal = "sqrt(2) - 99/70".parse().unwrap();
        assert_eq!(w.signum(), -1);
        assert_eq!(ExactReal::zero().signum(), 0);
    }

    #[test]
    fn refine_radius_contract() {
        let x = ExactReal::from_ratio(7, 3);
        let b = x.refine(64);
        assert!(b.contains_rational(&BigRational::new(7.into(), 3.into())));
        assert!(b.rad() <= Mag::pow2(-63).mul_u64(3));
        let two = ExactReal::from_integer(2);
        for k in [2, 10, 300] {
            let b = two.refine(k);
            assert!(b.is_exact());
            assert_eq!(b.mid().to_rational(), BigRational::from_integer(2.into()));
        }
    }

    #[test]
    fn square_free_split_cases() {
        assert_eq!(square_free_split(12), (2, 3));
        assert_eq!(square_free_split(49), (7, 1));
        assert_eq!(square_free_split(30), (1, 30));
        assert_eq!(square_free_split(1), (1, 1));
    }
}
