//! Parameters of one member of the sequence family
//! `alpha * beta^n * g(beta) * prod_j (beta^h_j - 1) + Q(n)`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::One;
use serde::{Deserialize, Serialize};

use super::poly::Polynomial;
use crate::error::{Error, Result};
use crate::precision::{Ball, ExactReal, GExpr};

#[derive(Clone, Debug, PartialEq)]
pub struct SequenceSpec {
    pub alpha: ExactReal,
    pub beta: ExactReal,
    pub g: GExpr,
    /// `(h_1, ..., h_l)`; empty means the product is 1.
    pub product_exponents: Vec<u32>,
    pub q: Polynomial<ExactReal>,
}

impl SequenceSpec {
    /// `alpha * beta^n` with `g = 1`, no product factors and `Q = 0`.
    pub fn geometric(alpha: ExactReal, beta: ExactReal) -> SequenceSpec {
        SequenceSpec {
            alpha,
            beta,
            g: GExpr::one(),
            product_exponents: Vec::new(),
            q: Polynomial::zero(),
        }
    }

    pub fn with_g(mut self, g: GExpr) -> Self {
        self.g = g;
        self
    }

    pub fn with_exponents(mut self, hs: Vec<u32>) -> Self {
        self.product_exponents = hs;
        self
    }

    pub fn with_q(mut self, q: Polynomial<ExactReal>) -> Self {
        self.q = q;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha.is_zero() {
            return Err(Error::InvalidSpec("alpha must be non-zero".into()));
        }
        if !self.beta.gt(&ExactReal::one()) {
            return Err(Error::InvalidSpec(format!("beta must exceed 1, got {}", self.beta)));
        }
        if self.product_exponents.iter().any(|&h| h == 0) {
            return Err(Error::InvalidSpec("product exponents must be positive".into()));
        }
        Ok(())
    }

    /// The `SequenceSpec` whose n-th term is `x_{n+h} - x_n`: `h` joins the product
    /// exponents and `Q` becomes `Q(n+h) - Q(n)`.
    pub fn differenced(&self, h: u32) -> SequenceSpec {
        let mut hs = self.product_exponents.clone();
        hs.push(h);
        SequenceSpec {
            alpha: self.alpha.clone(),
            beta: self.beta.clone(),
            g: self.g.clone(),
            product_exponents: hs,
            q: self.q.shift_difference(h as u64),
        }
    }

    /// Enclosure of the constant factor `alpha * g(beta) * prod (beta^h - 1)`.
    pub fn prefactor(&self, bits: u32) -> Result<Ball> {
        let beta = self.beta.refine(bits + 8).with_prec(bits);
        let mut c = self.alpha.refine(bits + 8).with_prec(bits);
        c = c.mul(&self.g.eval(&beta)?);
        for &h in &self.product_exponents {
            c = c.mul(&beta.pow(h as u64).sub(&Ball::one()));
        }
        Ok(c)
    }

    /// Exact value of the prefactor when `g` has no exponential.
    pub fn exact_prefactor(&self) -> Option<ExactReal> {
        let mut c = self.alpha.clone() * exact_g(&self.g, &self.beta)?;
        for &h in &self.product_exponents {
            c = c * (exact_pow(&self.beta, h as u64) - ExactReal::one());
        }
        Some(c)
    }

    /// Exact unreduced term `x_n`, when representable.
    pub fn exact_term(&self, n: u64) -> Option<ExactReal> {
        let c = self.exact_prefactor()?;
        let q = self.q.eval_int(n as i64);
        Some(c * exact_pow(&self.beta, n) + q)
    }

    /// Flat `key = value` lines (`alpha`, `beta`, `g`, `hs`, `q_coeffs`).
    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        let hs = self.product_exponents.iter().map(|h| h.to_string()).collect::<Vec<_>>().join(",");
        let _ = writeln!(out, "alpha = {}", self.alpha);
        let _ = writeln!(out, "beta = {}", self.beta);
        let _ = writeln!(out, "g = {}", self.g);
        let _ = writeln!(out, "hs = {hs}");
        let _ = writeln!(out, "q_coeffs = {}", self.q.to_csv_list());
        out
    }

    pub fn from_kv(text: &str) -> Result<SequenceSpec> {
        let map = parse_kv(text)?;
        SequenceSpec::from_map(&map)
    }

    /// Builds a `SequenceSpec` from parsed key-value pairs; `alpha` and `beta` are
    /// required, the rest default to `g = 1`, no exponents, `Q = 0`.
    pub fn from_map(map: &BTreeMap<String, String>) -> Result<SequenceSpec> {
        let get = |k: &str| map.get(k).map(|s| s.as_str());
        let alpha: ExactReal = get("alpha").ok_or_else(|| Error::Config("missing key alpha".into()))?.parse()?;
        let beta: ExactReal = get("beta").ok_or_else(|| Error::Config("missing key beta".into()))?.parse()?;
        let g = match get("g") {
            Some(s) => s.parse()?,
            None => GExpr::one(),
        };
        let hs = match get("hs") {
            Some(s) => parse_exponents(s)?,
            None => Vec::new(),
        };
        let q = match get("q_coeffs").or_else(|| get("q")) {
            Some(s) => Polynomial::parse_list(s)?,
            None => Polynomial::zero(),
        };
        Ok(SequenceSpec { alpha, beta, g, product_exponents: hs, q })
    }

    pub fn describe(&self) -> String {
        format!(
            "alpha={} beta={} g={} hs=[{}] q=[{}]",
            self.alpha,
            self.beta,
            self.g,
            self.product_exponents.iter().map(|h| h.to_string()).collect::<Vec<_>>().join(","),
            self.q.to_csv_list()
        )
    }
}

/// Serialized form used in JSON reports.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpecRecord {
    pub alpha: String,
    pub beta: String,
    pub g: String,
    pub hs: Vec<u32>,
    pub q_coeffs: Polynomial<ExactReal>,
}

impl From<&SequenceSpec> for SpecRecord {
    fn from(s: &SequenceSpec) -> SpecRecord {
        SpecRecord {
            alpha: s.alpha.to_string(),
            beta: s.beta.to_string(),
            g: s.g.to_string(),
            hs: s.product_exponents.clone(),
            q_coeffs: s.q.clone(),
        }
    }
}

pub fn parse_exponents(s: &str) -> Result<Vec<u32>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|h| {
            h.trim()
                .parse::<u32>()
                .ok()
                .filter(|&h| h > 0)
                .ok_or_else(|| Error::Parse(format!("bad product exponent {h:?}")))
        })
        .collect()
}

/// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_kv(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
        map.insert(k.trim().replace('-', "_"), v.trim().to_string());
    }
    Ok(map)
}

fn exact_pow(x: &ExactReal, n: u64) -> ExactReal {
    let mut result = ExactReal::one();
    let mut base = x.clone();
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base.clone();
        }
        e >>= 1;
        if e > 0 {
            base = base.clone() * base;
        }
    }
    result
}

fn exact_g(g: &GExpr, x: &ExactReal) -> Option<ExactReal> {
    Some(match g {
        GExpr::Const(c) => ExactReal::from_rational(c.clone()),
        GExpr::X => x.clone(),
        GExpr::Pow1m(h) => exact_pow(x, *h as u64) - ExactReal::one(),
        GExpr::Sum(a, b) => exact_g(a, x)? + exact_g(b, x)?,
        GExpr::Product(a, b) => exact_g(a, x)? * exact_g(b, x)?,
        GExpr::Exp(_) => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kv_round_trip() {
        let spec = SequenceSpec::geometric(ExactReal::from_ratio(1, 3), "phi".parse().unwrap())
            .with_g("x*pow1m(x,2) + 1/3".parse().unwrap())
            .with_exponents(vec![1, 4])
            .with_q(Polynomial::parse_list("0,1,sqrt(2)").unwrap());
        let back = SequenceSpec::from_kv(&spec.to_kv()).unwrap();
        assert_eq!(spec, back);
    }

    #[test]
    fn validation() {
        let bad = SequenceSpec::geometric(ExactReal::zero(), ExactReal::from_integer(2));
        assert!(matches!(bad.validate(), Err(Error::InvalidSpec(_))));
        let bad = SequenceSpec::geometric(ExactReal::one(), ExactReal::one());
        assert!(bad.validate().is_err());
        let ok = SequenceSpec::geometric(ExactReal::one(), "1 + 1/1000".parse().unwrap());
        assert!(ok.validate().is_ok());
    }

    #[test]
    fn exact_prefactor_matches_ball() {
        let spec = SequenceSpec::geometric(ExactReal::from_ratio(2, 5), ExactReal::from_ratio(3, 2))
            .with_g("x + 1".parse().unwrap())
            .with_exponents(vec![2]);
        // 2/5 * 5/2 * (9/4 - 1) = 5/4
        let exact = spec.exact_prefactor().unwrap();
        assert_eq!(exact, ExactReal::from_ratio(5, 4));
        let ball = spec.prefactor(128).unwrap();
        assert!(ball.contains_rational(&exact.as_rational().unwrap()));
    }
}
