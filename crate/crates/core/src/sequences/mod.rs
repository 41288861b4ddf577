//! The sequence family, its samples modulo one and the difference operators.

mod generate;
mod phase;
mod poly;
mod spec;

pub use generate::{
    generate_power_sequence, generate_power_sequence_with, generate_raw, generate_raw_at, initial_working_bits,
    reduce_terms, GenerateOptions, RawSequence,
};
pub use phase::poly_mod_one;
pub use poly::Polynomial;
pub use spec::{parse_exponents, parse_kv, SequenceSpec, SpecRecord};

use std::ops::Sub;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::analysis::unit_phase;
use crate::error::{Error, Result};
use crate::scalar::{AnalysisFloat, Scalar};

/// Where a sample came from and how it was certified.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleMeta {
    pub source: String,
    pub n: usize,
    /// Working precision used (0 when the values are exact rationals).
    pub working_bits: u64,
    pub target_bits: u32,
}

/// `N` fractional parts in `[0, 1)` sharing one certified error bound.
///
/// The bound covers the fractional part itself; storing it as `f64` adds at
/// most half an ulp on top.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModOneSample {
    pub values: Vec<f64>,
    pub certified_error: f64,
    pub meta: SampleMeta,
}

impl ModOneSample {
    /// Wraps already-reduced values with no certificate (`certified_error`
    /// set to 0 means "exact as given").
    pub fn from_values(values: Vec<f64>, source: &str) -> Result<ModOneSample> {
        if let Some(v) = values.iter().find(|v| !(0.0..1.0).contains(*v)) {
            return Err(Error::Argument(format!("value {v} is outside [0, 1)")));
        }
        let n = values.len();
        Ok(ModOneSample {
            values,
            certified_error: 0.0,
            meta: SampleMeta { source: source.to_string(), n, working_bits: 0, target_bits: 0 },
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).unwrap_or_default()
    }

    pub fn truncated(&self, n: usize) -> ModOneSample {
        let mut out = self.clone();
        out.values.truncate(n);
        out.meta.n = out.values.len();
        out
    }
}

/// A finite complex sequence with a modulus bound.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexSequence<F> {
    pub terms: Vec<Complex<F>>,
    /// Upper bound on every `|c_n|`.
    pub bound: F,
    /// Set when every term is `e^{2 pi i x}` for a real `x`.
    pub unit_modulus: bool,
}

impl<F: AnalysisFloat> ComplexSequence<F> {
    pub fn new(terms: Vec<Complex<F>>, bound: F) -> Self {
        ComplexSequence { terms, bound, unit_modulus: false }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `c_n = 1` for every n.
    pub fn ones(n: usize) -> Self {
        ComplexSequence { terms: vec![Complex::new(F::one(), F::zero()); n], bound: F::one(), unit_modulus: true }
    }

    /// `|c_n|`, exactly 1 for unit-modulus sequences.
    pub fn modulus(&self, i: usize) -> F {
        if self.unit_modulus {
            F::one()
        } else {
            self.terms[i].norm()
        }
    }
}

/// `c_n = e^{2 pi i x_n}`.
pub fn to_exponential(x: &ModOneSample) -> ComplexSequence<f64> {
    ComplexSequence { terms: x.values.iter().map(|&v| unit_phase(v)).collect(), bound: 1.0, unit_modulus: true }
}

/// Gap-`h` differences `x_{n+h} - x_n` of an unreduced sequence.
pub fn vdc_difference<T>(x: &[T], h: usize) -> Result<Vec<T>>
where
    T: Clone,
    for<'a> &'a T: Sub<&'a T, Output = T>,
{
    if h == 0 {
        return Err(Error::Argument("gap h must be positive".into()));
    }
    if h >= x.len() {
        return Err(Error::EmptyResult { h, len: x.len() });
    }
    Ok(x.windows(h + 1).map(|w| &w[h] - &w[0]).collect())
}

/// `Q(n + h) - Q(n)` as a polynomial of degree `deg Q - 1`.
pub fn shift_difference_poly<T: Scalar>(q: &Polynomial<T>, h: u64) -> Polynomial<T> {
    q.shift_difference(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn exponential_of_simple_phases() {
        let s = ModOneSample::from_values(vec![0.0, 0.5, 0.0, 0.25], "t").unwrap();
        let c = to_exponential(&s);
        assert_eq!(c.terms[0], Complex::new(1.0, 0.0));
        assert_eq!(c.terms[1], Complex::new(-1.0, 0.0));
        assert_eq!(c.terms[3], Complex::new(0.0, 1.0));
        assert_eq!(c.bound, 1.0);
    }

    #[test]
    fn differences() {
        let x = vec![1.0, 2.0, 3.0, 4.0];
        assert_eq!(vdc_difference(&x, 1).unwrap(), vec![1.0, 1.0, 1.0]);
        let ap: Vec<BigRational> = (0..10).map(|n| BigRational::new((3 + 5 * n).into(), 7.into())).collect();
        let d = vdc_difference(&ap, 3).unwrap();
        assert!(d.iter().all(|v| *v == BigRational::new(15.into(), 7.into())));
        assert!(matches!(vdc_difference(&x, 4), Err(Error::EmptyResult { .. })));
    }

    #[test]
    fn from_values_range_check() {
        assert!(ModOneSample::from_values(vec![1.0], "x").is_err());
        assert!(ModOneSample::from_values(vec![-0.1], "x").is_err());
    }
}
