//! Expressions for the amplitude function `g`.
//!
//! The grammar only builds functions that are positive with non-negative
//! first and second derivatives on `(1, ∞)`: positive constants, `x`,
//! `x^h - 1`, and sums, products and exponentials of those. Each of these
//! operations preserves the property, so no runtime proof is needed.
//!
//! Text form: `1`, `3/2`, `x`, `pow1m(x,h)`, `a + b`, `a * b`, `exp(a)`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::ball::Ball;
use super::jet::Jet2;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GExpr {
    /// Positive rational constant.
    Const(BigRational),
    X,
    /// `x^h - 1`.
    Pow1m(u32),
    Sum(Box<GExpr>, Box<GExpr>),
    Product(Box<GExpr>, Box<GExpr>),
    Exp(Box<GExpr>),
}

impl GExpr {
    pub fn one() -> GExpr {
        GExpr::Const(BigRational::one())
    }

    pub fn constant(r: BigRational) -> Result<GExpr> {
        if !r.is_positive() {
            return Err(Error::Parse(format!("g constants must be positive, got {r}")));
        }
        Ok(GExpr::Const(r))
    }

    pub fn pow1m(h: u32) -> Result<GExpr> {
        if h == 0 {
            return Err(Error::Parse("pow1m needs a positive exponent".into()));
        }
        Ok(GExpr::Pow1m(h))
    }

    pub fn sum(a: GExpr, b: GExpr) -> GExpr {
        GExpr::Sum(Box::new(a), Box::new(b))
    }

    pub fn product(a: GExpr, b: GExpr) -> GExpr {
        GExpr::Product(Box::new(a), Box::new(b))
    }

    pub fn exp(a: GExpr) -> GExpr {
        GExpr::Exp(Box::new(a))
    }

    fn uses_x(&self) -> bool {
        match self {
            GExpr::Const(_) => false,
            GExpr::X | GExpr::Pow1m(_) => true,
            GExpr::Sum(a, b) | GExpr::Product(a, b) => a.uses_x() || b.uses_x(),
            GExpr::Exp(a) => a.uses_x(),
        }
    }

    fn uses_pow1m(&self) -> bool {
        match self {
            GExpr::Const(_) | GExpr::X => false,
            GExpr::Pow1m(_) => true,
            GExpr::Sum(a, b) | GExpr::Product(a, b) => a.uses_pow1m() || b.uses_pow1m(),
            GExpr::Exp(a) => a.uses_pow1m(),
        }
    }

    /// Value and first two derivatives at `x` as enclosures.
    ///
    /// `x` must be positive when the expression mentions `x`, and greater
    /// than 1 when it contains an `x^h - 1` atom.
    pub fn eval_jet(&self, x: &Ball) -> Result<Jet2<Ball>> {
        if self.uses_pow1m() && !x.gt_int(1) {
            return Err(Error::Domain(format!("x^h - 1 atoms need x > 1, got {x}")));
        }
        if self.uses_x() && !x.gt_int(0) {
            return Err(Error::Domain(format!("x must be positive, got {x}")));
        }
        let prec = if x.prec() == 0 { 128 } else { x.prec() };
        self.jet_ball(x, prec)
    }

    pub fn eval(&self, x: &Ball) -> Result<Ball> {
        Ok(self.eval_jet(x)?.value)
    }

    fn jet_ball(&self, x: &Ball, prec: u32) -> Result<Jet2<Ball>> {
        Ok(match self {
            GExpr::Const(c) => {
                let bits = prec + 8 + c.numer().bits() as u32;
                Jet2::new(Ball::from_rational(c, bits, prec), Ball::zero(), Ball::zero())
            }
            GExpr::X => Jet2::new(x.clone(), Ball::one(), Ball::zero()),
            GExpr::Pow1m(h) => {
                let h = *h as u64;
                let value = x.pow(h).sub(&Ball::one());
                let d1 = x.pow(h - 1).mul_int(h as i64);
                let d2 = if h >= 2 { x.pow(h - 2).mul_int((h * (h - 1)) as i64) } else { Ball::zero() };
                Jet2::new(value, d1, d2)
            }
            GExpr::Sum(a, b) => a.jet_ball(x, prec)? + b.jet_ball(x, prec)?,
            GExpr::Product(a, b) => a.jet_ball(x, prec)? * b.jet_ball(x, prec)?,
            GExpr::Exp(a) => {
                let inner = a.jet_ball(x, prec)?;
                let e = inner.value.exp()?;
                inner.compose(e.clone(), e.clone(), e)
            }
        })
    }

    /// Double-precision jet, used for finite-difference cross-checks.
    pub fn eval_jet_f64(&self, x: f64) -> Jet2<f64> {
        match self {
            GExpr::Const(c) => Jet2::new(c.to_f64().unwrap_or(f64::NAN), 0.0, 0.0),
            GExpr::X => Jet2::new(x, 1.0, 0.0),
            GExpr::Pow1m(h) => {
                let h = *h as i32;
                let d2 = if h >= 2 { (h * (h - 1)) as f64 * x.powi(h - 2) } else { 0.0 };
                Jet2::new(x.powi(h) - 1.0, h as f64 * x.powi(h - 1), d2)
            }
            GExpr::Sum(a, b) => a.eval_jet_f64(x) + b.eval_jet_f64(x),
            GExpr::Product(a, b) => a.eval_jet_f64(x) * b.eval_jet_f64(x),
            GExpr::Exp(a) => {
                let inner = a.eval_jet_f64(x);
                let e = inner.value.exp();
                inner.compose(e, e, e)
            }
        }
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.eval_jet_f64(x).value
    }
}

impl fmt::Display for GExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GExpr::Const(c) if c.is_integer() => write!(f, "{}", c.numer()),
            GExpr::Const(c) => write!(f, "{}/{}", c.numer(), c.denom()),
            GExpr::X => write!(f, "x"),
            GExpr::Pow1m(h) => write!(f, "pow1m(x,{h})"),
            GExpr::Sum(a, b) => write!(f, "{a} + {b}"),
            GExpr::Product(a, b) => {
                let wrap = |e: &GExpr| matches!(e, GExpr::Sum(..));
                if wrap(a) {
                    write!(f, "({a})")?;
                } else {
                    write!(f, "{a}")?;
                }
                write!(f, "*")?;
                if wrap(b) {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
            GExpr::Exp(a) => write!(f, "exp({a})"),
        }
    }
}

impl FromStr for GExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<GExpr> {
        let mut p = Parser { src: s.as_bytes(), pos: 0 };
        let e = p.sum()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(Error::Parse(format!("unexpected input at offset {} in g = {s:?}", p.pos)));
        }
        Ok(e)
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

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
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

    fn sum(&mut self) -> Result<GExpr> {
        let mut e = self.product()?;
        while self.eat(b'+') {
            e = GExpr::sum(e, self.product()?);
        }
        Ok(e)
    }

    fn product(&mut self) -> Result<GExpr> {
        let mut e = self.atom()?;
        while self.eat(b'*') {
            e = GExpr::product(e, self.atom()?);
        }
        Ok(e)
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let txt = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        txt.parse().map_err(|_| Error::Parse(format!("expected an integer at offset {start}")))
    }

    fn ident(&mut self) -> &str {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("")
    }

    fn atom(&mut self) -> Result<GExpr> {
        self.skip_ws();
        match self.src.get(self.pos).copied() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.sum()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.integer()?;
                let den = if self.eat(b'/') { self.integer()? } else { BigInt::one() };
                if den.is_zero() {
                    return Err(Error::Parse("zero denominator in g constant".into()));
                }
                GExpr::constant(BigRational::new(num, den))
            }
            Some(c) if c.is_ascii_alphabetic() => match self.ident() {
                "x" => Ok(GExpr::X),
                "exp" => {
                    self.expect(b'(')?;
                    let e = self.sum()?;
                    self.expect(b')')?;
                    Ok(GExpr::exp(e))
                }
                "pow1m" => {
                    self.expect(b'(')?;
                    if self.ident() != "x" {
                        return Err(Error::Parse("pow1m expects x as its first argument".into()));
                    }
                    self.expect(b',')?;
                    let h = self.integer()?;
                    self.expect(b')')?;
                    let h = h.to_u32().ok_or_else(|| Error::Parse("pow1m exponent out of range".into()))?;
                    GExpr::pow1m(h)
                }
                other => Err(Error::Parse(format!("unknown name {other:?} in g expression"))),
            },
            _ => Err(Error::Parse(format!("unexpected character at offset {} in g expression", self.pos))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::ExactReal;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn constant_jet() {
        let g: GExpr = "1".parse().unwrap();
        let j = g.eval_jet(&Ball::from_int(5)).unwrap();
        assert!(j.value.contains_rational(&rat(1, 1)));
        assert!(j.d1.is_exact() && j.d1.mid().is_zero());
        assert!(j.d2.is_exact() && j.d2.mid().is_zero());
    }

    #[test]
    fn pow1m_jet_at_two() {
        let g: GExpr = "pow1m(x,3)".parse().unwrap();
        let j = g.eval_jet(&Ball::from_int(2)).unwrap();
        assert_eq!(j.value.mid().to_rational(), rat(7, 1));
        assert_eq!(j.d1.mid().to_rational(), rat(12, 1));
        assert_eq!(j.d2.mid().to_rational(), rat(12, 1));
        assert!(j.value.is_exact() && j.d1.is_exact() && j.d2.is_exact());
    }

    #[test]
    fn exp_jet_at_one() {
        let g: GExpr = "exp(x)".parse().unwrap();
        let j = g.eval_jet(&Ball::from_int(1).with_prec(128)).unwrap();
        let e = std::f64::consts::E;
        for b in [&j.value, &j.d1, &j.d2] {
            assert!((b.to_f64() - e).abs() < 1e-15);
            assert!(b.rad().to_f64_up() < 1e-30);
        }
    }

    #[test]
    fn domain_errors() {
        let g: GExpr = "pow1m(x,2)".parse().unwrap();
        assert!(matches!(g.eval_jet(&Ball::from_int(1)), Err(Error::Domain(_))));
        let near_one = ExactReal::from_ratio(1025, 1024).refine(64);
        assert!(g.eval_jet(&near_one).is_ok());
        let x: GExpr = "x".parse().unwrap();
        assert!(x.eval_jet(&Ball::from_int(0)).is_err());
        let c: GExpr = "3/2".parse().unwrap();
        assert!(c.eval_jet(&Ball::from_int(-4)).is_ok());
    }

    #[test]
    fn parse_and_display() {
        for s in ["1", "3/2", "x", "pow1m(x,2)", "x*pow1m(x,2) + 1/3", "exp(x + 1)*(x + 2)", "exp(exp(x))"] {
            let g: GExpr = s.parse().unwrap();
            let back: GExpr = g.to_string().parse().unwrap();
            assert_eq!(g, back, "{s}");
        }
        assert!("0".parse::<GExpr>().is_err());
        assert!("x - 1".parse::<GExpr>().is_err());
        assert!("pow1m(x,0)".parse::<GExpr>().is_err());
        assert!("log(x)".parse::<GExpr>().is_err());
    }
}
