//! Polynomials `t_0 + t_1 n + ... + t_k n^k` over a generic scalar.

use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::precision::{Ball, ExactReal};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Polynomial<T> {
    /// Trailing zero coefficients are dropped; the empty list is the zero
    /// polynomial (degree 0).
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(T::zero());
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial::new(Vec::new())
    }

    /// `t * n^k`.
    pub fn monomial(t: T, k: usize) -> Self {
        let mut coeffs = vec![T::zero(); k + 1];
        coeffs[k] = t;
        Polynomial::new(coeffs)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Horner evaluation.
    pub fn eval(&self, n: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * n.clone() + c.clone())
    }

    pub fn eval_int(&self, n: i64) -> T {
        self.eval(&T::from_bigint(&BigInt::from(n)))
    }

    /// The polynomial `Q(n + h) - Q(n)`, built coefficient-wise as
    /// `T_i = -t_i + sum_{j=i..k} t_j * C(j, i) * h^(j-i)` for `i < k`.
    /// A constant polynomial maps to zero.
    pub fn shift_difference(&self, h: u64) -> Polynomial<T> {
        let k = self.degree();
        if k == 0 {
            return Polynomial::zero();
        }
        let h = BigInt::from(h);
        let mut out = Vec::with_capacity(k);
        for i in 0..k {
            let mut acc = -self.coeffs[i].clone();
            let mut binom = BigInt::one();
            let mut hpow = BigInt::one();
            for j in i..=k {
                if j > i {
                    // C(j, i) = C(j-1, i) * j / (j - i)
                    binom = binom * BigInt::from(j) / BigInt::from(j - i);
                    hpow *= &h;
                }
                let factor = T::from_bigint(&(&binom * &hpow));
                acc = acc + self.coeffs[j].clone() * factor;
            }
            out.push(acc);
        }
        Polynomial::new(out)
    }
}

impl Polynomial<ExactReal> {
    pub fn is_rational(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_rational())
    }

    /// Enclosure of `Q(n)` with each coefficient refined to `bits`.
    pub fn eval_ball(&self, n: u64, bits: u32) -> Ball {
        let nb = Ball::from_int(n);
        let mut acc = Ball::zero().with_prec(bits);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&nb);
            if !c.is_zero() {
                acc = acc.add(&c.refine(bits));
            }
        }
        acc
    }

    /// Rough upper estimate of `log2 max_{n<=N} |Q(n)|`.
    pub fn magnitude_bits(&self, n_max: u64) -> i64 {
        let log_n = (n_max.max(2) as f64).log2();
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| c.magnitude_bits() + (i as f64 * log_n).ceil() as i64)
            .max()
            .unwrap_or(0)
            + self.coeffs.len() as i64
    }

    /// Coefficients rendered for the flat key-value format.
    pub fn to_csv_list(&self) -> String {
        self.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
    }

    pub fn parse_list(s: &str) -> crate::Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Polynomial::zero());
        }
        let coeffs = s
            .split(',')
            .map(|c| c.trim().parse::<ExactReal>())
            .collect::<crate::Result<Vec<_>>>()?;
        Ok(Polynomial::new(coeffs))
    }
}

impl<T: Scalar + fmt::Display> fmt::Display for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() && !(self.coeffs.len() == 1) {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*n")?,
                _ => write!(f, "({c})*n^{i}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for Polynomial<ExactReal> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let list: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        list.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polynomial<ExactReal> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let list = Vec::<String>::deserialize(d)?;
        let coeffs = list
            .iter()
            .map(|c| c.parse::<ExactReal>().map_err(serde::de::Error::custom))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Polynomial::new(coeffs))
    }
}
