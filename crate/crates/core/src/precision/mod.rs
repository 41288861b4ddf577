//! Exact and ball-arithmetic evaluation of reals.

mod ball;
mod dyadic;
mod exact;
mod gexpr;
mod jet;
mod mag;

pub use ball::{sqrt_int, Ball};
pub use dyadic::Dyadic;
pub use exact::ExactReal;
pub use gexpr::GExpr;
pub use jet::Jet2;
pub use mag::Mag;

use num_bigint::Sign;

use crate::error::{Error, Result};

/// Enclosure of `x` with radius at most `2^(1-bits) * max(1, |x|)`.
pub fn refine(x: &ExactReal, bits: u32) -> Ball {
    x.refine(bits)
}

/// Enclosure of `b^n`. The midpoint of `b` must be positive.
pub fn ball_pow(b: &Ball, n: u64) -> Ball {
    debug_assert!(b.mid().sign() == Sign::Plus, "ball_pow expects a positive midpoint");
    b.pow(n)
}

/// `(g(x), g'(x), g''(x))` as enclosures.
pub fn eval_g_jet(g: &GExpr, x: &Ball) -> Result<Jet2<Ball>> {
    g.eval_jet(x)
}

/// A certified fractional part.
#[derive(Clone, Debug)]
pub struct UnitValue {
    /// Enclosure of `{x}`, contained in `[0, 1)` up to its radius.
    pub ball: Ball,
    /// Nearest double in `[0, 1)` to the enclosure midpoint.
    pub value: f64,
    /// Upper bound on `|{x} - ball midpoint|`.
    pub certified_error: f64,
}

/// Largest double below 1.
pub const BELOW_ONE: f64 = 1.0 - f64::EPSILON / 2.0;

/// `{x} = x - floor(x)` with error at most `2^-target_bits`.
///
/// Fails with `AmbiguousBoundary` when the enclosure straddles an integer and
/// with `InsufficientPrecision` when the radius exceeds the target.
pub fn frac_mod_one(x: &Ball, target_bits: u32) -> Result<UnitValue> {
    let floor = x.floor_if_determined().ok_or_else(|| Error::AmbiguousBoundary {
        radius_log2: x.rad().log2_ceil(),
    })?;
    if x.rad() > Mag::pow2(-(target_bits as i64)) {
        return Err(Error::InsufficientPrecision {
            radius_log2: x.rad().log2_ceil(),
            target_bits,
        });
    }
    let ball = x.sub(&Ball::exact(Dyadic::from_int(floor)));
    let mut value = ball.mid().to_f64();
    if value < 0.0 {
        // midpoint sits just below an integer the whole ball stays above
        value = 0.0;
    }
    if value >= 1.0 {
        value = BELOW_ONE;
    }
    Ok(UnitValue { certified_error: ball.rad().to_f64_up(), ball, value })
}
