//! Certified generation of `{c * beta^n + Q(n)}`.

use rayon::prelude::*;

use super::spec::SequenceSpec;
use super::{ModOneSample, SampleMeta};
use crate::error::{Error, Result};
use crate::precision::{frac_mod_one, Ball, Dyadic, ExactReal, UnitValue, BELOW_ONE};

/// Knobs of the precision policy.
#[derive(Clone, Debug)]
pub struct GenerateOptions {
    /// Required certified accuracy of every fractional part, in bits.
    pub target_bits: u32,
    /// Starting working precision; derived from the sequence parameters when `None`.
    pub initial_bits: Option<u64>,
    /// Hard ceiling on the working precision.
    pub max_bits: u64,
    /// Terms per parallel chunk. Part of the numerical result: chunk starts
    /// are recomputed by powering, so it is fixed rather than tied to the
    /// worker count.
    pub chunk: usize,
}

impl Default for GenerateOptions {
    fn default() -> Self {
        GenerateOptions { target_bits: 60, initial_bits: None, max_bits: 1 << 24, chunk: 512 }
    }
}

/// Unreduced terms `x_1..x_N` as enclosures, plus the precision used.
#[derive(Clone, Debug)]
pub struct RawSequence {
    pub terms: Vec<Ball>,
    pub working_bits: u64,
}

/// `ceil(N log2 beta) + 96` plus headroom for the sizes of `c` and `Q`.
pub fn initial_working_bits(spec: &SequenceSpec, n: usize) -> u64 {
    let log_beta = spec.beta.to_f64().log2().max(0.0);
    let c_bits = spec.prefactor(64).map(|c| c.mag_up().log2_ceil().max(0)).unwrap_or(0) as u64;
    let q_bits = spec.q.magnitude_bits(n as u64).max(0) as u64;
    let base = (n as f64 * log_beta).ceil() as u64 + 96;
    base + c_bits + q_bits
}

fn coefficient_balls(spec: &SequenceSpec, bits: u32) -> Vec<Ball> {
    spec.q.coeffs().iter().map(|c| c.refine(bits).with_prec(bits)).collect()
}

fn eval_q(coeffs: &[Ball], n: u64, prec: u32) -> Ball {
    let nb = Ball::from_int(n);
    let mut acc = Ball::zero().with_prec(prec);
    for c in coeffs.iter().rev() {
        acc = acc.mul(&nb).add(c);
    }
    acc
}

/// Unreduced terms at a fixed working precision.
pub fn generate_raw_at(spec: &SequenceSpec, n: usize, bits: u64, chunk: usize) -> Result<RawSequence> {
    spec.validate()?;
    let prec = u32::try_from(bits).map_err(|_| Error::PrecisionExhausted { bits, cap: u32::MAX as u64 })?;
    let guard = prec + 16;
    let beta = spec.beta.refine(guard).with_prec(guard);
    let c = spec.prefactor(guard)?;
    let q = coefficient_balls(spec, guard);
    let q_is_zero = spec.q.is_zero();
    let chunk = chunk.max(1);
    let starts: Vec<usize> = (0..n).step_by(chunk).collect();
    let parts: Vec<Vec<Ball>> = starts
        .par_iter()
        .map(|&s| {
            let first = s as u64 + 1;
            let mut cur = c.mul(&beta.pow(first));
            let end = (s + chunk).min(n);
            let mut out = Vec::with_capacity(end - s);
            for idx in s..end {
                let nn = idx as u64 + 1;
                let term = if q_is_zero { cur.clone() } else { cur.add(&eval_q(&q, nn, guard)) };
                out.push(term);
                if idx + 1 < end {
                    cur = cur.mul(&beta);
                }
            }
            out
        })
        .collect();
    Ok(RawSequence { terms: parts.into_iter().flatten().collect(), working_bits: bits })
}

/// Unreduced terms at the smallest precision (per the doubling policy) at
/// which every term has a certified fractional part.
pub fn generate_raw(spec: &SequenceSpec, n: usize, opts: &GenerateOptions) -> Result<(RawSequence, Vec<UnitValue>)> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::Argument("N must be at least 1".into()));
    }
    let mut bits = opts.initial_bits.unwrap_or_else(|| initial_working_bits(spec, n));
    loop {
        if bits > opts.max_bits {
            return Err(Error::PrecisionExhausted { bits, cap: opts.max_bits });
        }
        let raw = generate_raw_at(spec, n, bits, opts.chunk)?;
        match reduce_with_fallback(spec, &raw.terms, opts.target_bits) {
            Ok(units) => return Ok((raw, units)),
            Err(Error::AmbiguousBoundary { .. }) | Err(Error::InsufficientPrecision { .. }) => bits *= 2,
            Err(e) => return Err(e),
        }
    }
}

/// Certified fractional parts of `x_1..x_N` (default options).
pub fn generate_power_sequence(spec: &SequenceSpec, n: usize) -> Result<ModOneSample> {
    generate_power_sequence_with(spec, n, &GenerateOptions::default())
}

pub fn generate_power_sequence_with(spec: &SequenceSpec, n: usize, opts: &GenerateOptions) -> Result<ModOneSample> {
    let (raw, units) = generate_raw(spec, n, opts)?;
    let certified_error = units.iter().map(|u| u.certified_error).fold(0.0, f64::max);
    Ok(ModOneSample {
        values: units.iter().map(|u| u.value).collect(),
        certified_error,
        meta: SampleMeta {
            source: spec.describe(),
            n,
            working_bits: raw.working_bits,
            target_bits: opts.target_bits,
        },
    })
}

/// Fractional parts of a run of enclosures; fails on the first term that
/// cannot be certified.
pub fn reduce_terms(terms: &[Ball], target_bits: u32) -> Result<Vec<UnitValue>> {
    terms.par_iter().map(|t| frac_mod_one(t, target_bits)).collect()
}

fn reduce_with_fallback(spec: &SequenceSpec, terms: &[Ball], target_bits: u32) -> Result<Vec<UnitValue>> {
    terms
        .par_iter()
        .enumerate()
        .map(|(i, t)| match frac_mod_one(t, target_bits) {
            Err(Error::AmbiguousBoundary { .. }) => exact_fraction(spec, i as u64 + 1, t, target_bits),
            other => other,
        })
        .collect()
}

/// Resolves a term sitting on an integer boundary by exact evaluation. Only
/// rational exact values are settled here; irrational terms can never be
/// integers, so more working precision is the right answer for them.
fn exact_fraction(spec: &SequenceSpec, n: u64, term: &Ball, target_bits: u32) -> Result<UnitValue> {
    let ambiguous = || Error::AmbiguousBoundary { radius_log2: term.rad().log2_ceil() };
    let exact = spec.exact_term(n).ok_or_else(ambiguous)?;
    let r = exact.as_rational().ok_or_else(ambiguous)?;
    let floor = r.floor().to_integer();
    let frac = ExactReal::from_rational(r - num_rational::BigRational::from_integer(floor));
    let ball = frac.refine(target_bits + 8);
    let mut value = ball.to_f64().max(0.0);
    if value >= 1.0 {
        value = BELOW_ONE;
    }
    // the exact fraction may lie just under 0 in the refined midpoint only if it is 0
    let ball = if frac.is_zero() { Ball::exact(Dyadic::zero()) } else { ball };
    Ok(UnitValue { certified_error: ball.rad().to_f64_up(), ball, value })
}
