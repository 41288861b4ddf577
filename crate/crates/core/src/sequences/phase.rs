//! Polynomial phases `{P(n)}` for `n = 1..N`.
//!
//! Rational coefficients are reduced exactly with modular arithmetic over a
//! common denominator. Otherwise each coefficient is replaced by a fixed-point
//! integer `M_i ≈ t_i 2^p` and the phase is `(sum M_i n^i) mod 2^p`, which only
//! needs the low `p` bits of every product. The precision `p` is chosen so the
//! accumulated coefficient error stays below `2^-target_bits`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use super::poly::Polynomial;
use super::{ModOneSample, SampleMeta};
use crate::error::{Error, Result};
use crate::precision::{ExactReal, Mag, BELOW_ONE};

const TARGET_BITS: u32 = 60;

fn clamp_unit(v: f64) -> f64 {
    if v >= 1.0 {
        BELOW_ONE
    } else if v < 0.0 {
        0.0
    } else {
        v
    }
}

/// Certified `{Q(n)}` for `n = 1..=n_max`.
pub fn poly_mod_one(q: &Polynomial<ExactReal>, n_max: usize) -> Result<ModOneSample> {
    if n_max == 0 {
        return Err(Error::Argument("N must be at least 1".into()));
    }
    let (values, certified_error, bits) = if q.is_rational() {
        (rational_phases(q, n_max), 0.0, 0)
    } else {
        fixed_point_phases(q, n_max, TARGET_BITS)?
    };
    Ok(ModOneSample {
        values,
        certified_error,
        meta: SampleMeta { source: format!("poly {}", q.to_csv_list()), n: n_max, working_bits: bits, target_bits: TARGET_BITS },
    })
}

fn rational_phases(q: &Polynomial<ExactReal>, n_max: usize) -> Vec<f64> {
    let coeffs: Vec<_> = q.coeffs().iter().map(|c| c.as_rational().unwrap_or_default()).collect();
    let den = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let nums: Vec<BigInt> = coeffs.iter().map(|c| (c.numer() * (&den / c.denom())).mod_floor(&den)).collect();
    if let Some(d) = den.to_u64().filter(|&d| d < (1 << 63)) {
        let nums: Vec<u128> = nums.iter().map(|a| a.to_u64().unwrap_or(0) as u128).collect();
        let d128 = d as u128;
        let df = d as f64;
        (1..=n_max as u64)
            .into_par_iter()
            .map(|n| {
                let nm = n as u128 % d128;
                let mut pow = 1u128;
                let mut acc = 0u128;
                for a in &nums {
                    acc = (acc + a * pow) % d128;
                    pow = pow * nm % d128;
                }
                clamp_unit(acc as f64 / df)
            })
            .collect()
    } else {
        (1..=n_max as u64)
            .into_par_iter()
            .map(|n| {
                let nb = BigInt::from(n);
                let mut acc = BigInt::zero();
                for a in nums.iter().rev() {
                    acc = (acc * &nb + a).mod_floor(&den);
                }
                clamp_unit(ratio_f64(&acc, &den))
            })
            .collect()
    }
}

fn ratio_f64(num: &BigInt, den: &BigInt) -> f64 {
    let shift = den.bits().saturating_sub(64) as usize;
    let n = (num >> shift).to_f64().unwrap_or(0.0);
    let d = (den >> shift).to_f64().unwrap_or(1.0);
    n / d
}

/// Bits `p` of fixed-point precision needed for the phase error bound.
fn required_bits(degree: usize, n_max: usize, target_bits: u32) -> u32 {
    let log_n = (n_max.max(2) as f64).log2();
    let terms = ((degree + 1) as f64).log2().ceil() as u32;
    target_bits + 4 + terms + (degree as f64 * log_n).ceil() as u32
}

/// Fixed-point representation `M ≈ t 2^p` reduced mod `2^p`, with the bound
/// `|t - M 2^-p| <= err` (the integer part of `t` is irrelevant mod 1).
fn fixed_point(t: &ExactReal, p: u32) -> (BigUint, Mag) {
    let bits = p + 4 + t.magnitude_bits().max(0) as u32;
    let ball = t.refine(bits);
    let scaled = ball.mid().mul_2exp(p as i64);
    let m = scaled.floor();
    let modulus = BigInt::one() << p as usize;
    let reduced = m.mod_floor(&modulus);
    let err = ball.rad().add(&Mag::pow2(-(p as i64)));
    (reduced.to_biguint().unwrap_or_default(), err)
}

fn fixed_point_phases(q: &Polynomial<ExactReal>, n_max: usize, target_bits: u32) -> Result<(Vec<f64>, f64, u64)> {
    let k = q.degree();
    let p_needed = required_bits(k, n_max, target_bits);
    let p = p_needed.max(128);
    let fixed: Vec<(BigUint, Mag)> = q.coeffs().iter().map(|c| fixed_point(c, p)).collect();
    // sum_i err_i n^i <= (sum_i err_i) * N^k
    let mut err = Mag::ZERO;
    for (_, e) in &fixed {
        err = err.add(e);
    }
    for _ in 0..k {
        err = err.mul_u64(n_max as u64);
    }
    if err > Mag::pow2(-(target_bits as i64)) {
        return Err(Error::PrecisionExhausted { bits: p as u64, cap: p as u64 });
    }
    let values: Vec<f64> = if p == 128 {
        let ms: Vec<u128> = fixed.iter().map(|(m, _)| biguint_low_u128(m)).collect();
        (1..=n_max as u64)
            .into_par_iter()
            .map(|n| {
                let mut acc = 0u128;
                for m in ms.iter().rev() {
                    acc = acc.wrapping_mul(n as u128).wrapping_add(*m);
                }
                clamp_unit(u128_unit(acc))
            })
            .collect()
    } else {
        let modulus = BigUint::one() << p as usize;
        let ms: Vec<BigUint> = fixed.into_iter().map(|(m, _)| m).collect();
        (1..=n_max as u64)
            .into_par_iter()
            .map(|n| {
                let nb = BigUint::from(n);
                let mut acc = BigUint::zero();
                for m in ms.iter().rev() {
                    acc = (acc * &nb + m) % &modulus;
                }
                let top = &acc >> (p as usize - 64);
                clamp_unit(top.to_u64().unwrap_or(0) as f64 * 2f64.powi(-64))
            })
            .collect()
    };
    Ok((values, err.to_f64_up(), p as u64))
}

fn biguint_low_u128(m: &BigUint) -> u128 {
    let mut digits = m.iter_u64_digits();
    let lo = digits.next().unwrap_or(0) as u128;
    let hi = digits.next().unwrap_or(0) as u128;
    lo | (hi << 64)
}

fn u128_unit(v: u128) -> f64 {
    // top 64 bits carry far more than f64 precision
    ((v >> 64) as u64) as f64 * 2f64.powi(-64) + ((v as u64) as f64) * 2f64.powi(-128)
}
