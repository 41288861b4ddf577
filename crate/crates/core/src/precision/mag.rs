//! Upper bounds for non-negative magnitudes.
//!
//! A [`Mag`] is a small floating value `man * 2^exp` with a 30-bit mantissa.
//! Every operation rounds away from zero, so a `Mag` computed from other
//! upper bounds is itself an upper bound. Ball radii are stored this way.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};

const MAN_BITS: u32 = 30;
const MAN_LIMIT: u64 = 1 << MAN_BITS;

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mag {
    man: u64,
    exp: i64,
}

impl Mag {
    pub const ZERO: Mag = Mag { man: 0, exp: 0 };

    fn normalized(mut man: u64, mut exp: i64) -> Mag {
        if man == 0 {
            return Mag::ZERO;
        }
        while man >= MAN_LIMIT {
            let excess = 64 - man.leading_zeros() - MAN_BITS;
            let dropped = man & ((1u64 << excess) - 1);
            man >>= excess;
            exp += excess as i64;
            if dropped != 0 {
                man += 1;
            }
        }
        Mag { man, exp }
    }

    /// `2^exp`.
    pub fn pow2(exp: i64) -> Mag {
        Mag { man: 1, exp }
    }

    pub fn from_u64(v: u64) -> Mag {
        Mag::normalized(v, 0)
    }

    /// Upper bound for `|v| * 2^exp`.
    pub fn from_bigint_scaled(v: &BigInt, exp: i64) -> Mag {
        if v.sign() == Sign::NoSign {
            return Mag::ZERO;
        }
        let mag = v.magnitude();
        let bits = mag.bits();
        if bits <= 62 {
            let small = mag.iter_u64_digits().next().unwrap_or(0);
            return Mag::normalized(small, exp);
        }
        let shift = bits - 62;
        let top: u64 = (mag >> shift).iter_u64_digits().next().unwrap_or(0);
        // any dropped bit forces a round-up
        let exact = mag.trailing_zeros().map_or(true, |tz| tz >= shift);
        let top = if exact { top } else { top + 1 };
        Mag::normalized(top, exp + shift as i64)
    }

    /// Upper bound for a non-negative finite `f64`.
    pub fn from_f64_up(v: f64) -> Mag {
        assert!(v >= 0.0 && v.is_finite(), "Mag::from_f64_up expects a finite non-negative value");
        if v == 0.0 {
            return Mag::ZERO;
        }
        let bits = v.to_bits();
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (man, exp) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), raw_exp - 1075)
        };
        Mag::normalized(man, exp)
    }

    pub fn is_zero(&self) -> bool {
        self.man == 0
    }

    pub fn mantissa(&self) -> u64 {
        self.man
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    /// Smallest `e` with `self < 2^e` (for zero, `i64::MIN`).
    pub fn log2_ceil(&self) -> i64 {
        if self.is_zero() {
            return i64::MIN;
        }
        self.exp + (64 - self.man.leading_zeros()) as i64
    }

    pub fn add(&self, other: &Mag) -> Mag {
        if self.is_zero() {
            return *other;
        }
        if other.is_zero() {
            return *self;
        }
        let (big, small) = if self.log2_ceil() >= other.log2_ceil() {
            (self, other)
        } else {
            (other, self)
        };
        let shift = big.exp - small.exp;
        if shift >= 34 {
            // small < 2^(big.exp), so one extra unit covers it
            return Mag::normalized(big.man + 1, big.exp);
        }
        if shift >= 0 {
            Mag::normalized((big.man << shift) + small.man, small.exp)
        } else {
            let s = (-shift) as u32;
            if s >= 34 {
                return Mag::normalized(small.man + 1, small.exp);
            }
            Mag::normalized(big.man + (small.man << s), big.exp)
        }
    }

    pub fn mul(&self, other: &Mag) -> Mag {
        if self.is_zero() || other.is_zero() {
            return Mag::ZERO;
        }
        Mag::normalized(self.man * other.man, self.exp + other.exp)
    }

    pub fn mul_u64(&self, v: u64) -> Mag {
        self.mul(&Mag::from_u64(v))
    }

    pub fn mul_2exp(&self, e: i64) -> Mag {
        if self.is_zero() {
            return Mag::ZERO;
        }
        Mag { man: self.man, exp: self.exp + e }
    }

    /// Upper bound for `self / d`.
    pub fn div_u64(&self, d: u64) -> Mag {
        assert!(d > 0, "division by zero");
        if self.is_zero() {
            return Mag::ZERO;
        }
        let num = (self.man as u128) << 64;
        let q = num / d as u128;
        let q = if num % d as u128 != 0 { q + 1 } else { q };
        let lead = 128 - q.leading_zeros();
        if lead <= 62 {
            Mag::normalized(q as u64, self.exp - 64)
        } else {
            let shift = lead - 62;
            let top = (q >> shift) as u64 + 1;
            Mag::normalized(top, self.exp - 64 + shift as i64)
        }
    }

    pub fn max(&self, other: &Mag) -> Mag {
        if self.cmp(other) == Ordering::Less {
            *other
        } else {
            *self
        }
    }

    /// Value rounded up to the next representable `f64`; saturates to
    /// `f64::INFINITY` on overflow and to the smallest subnormal on underflow.
    pub fn to_f64_up(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let top = self.log2_ceil();
        if top > 1024 {
            return f64::INFINITY;
        }
        if top < -1070 {
            return f64::from_bits(1);
        }
        // man < 2^30 so the product is exact unless it underflows
        let v = ldexp(self.man as f64, self.exp);
        if v == 0.0 {
            f64::from_bits(1)
        } else {
            v
        }
    }
}

pub(crate) fn ldexp(x: f64, e: i64) -> f64 {
    let mut v = x;
    let mut e = e;
    while e > 1000 {
        v *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        v *= 2f64.powi(-1000);
        e += 1000;
    }
    v * 2f64.powi(e as i32)
}

impl PartialOrd for Mag {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Mag {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        let ta = self.log2_ceil();
        let tb = other.log2_ceil();
        if ta != tb {
            return ta.cmp(&tb);
        }
        // same top bit position: align mantissas
        let e = self.exp.min(other.exp);
        let a = (self.man as u128) << (self.exp - e);
        let b = (other.man as u128) << (other.exp - e);
        a.cmp(&b)
    }
}

impl fmt::Debug for Mag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.man, self.exp)
    }
}

impl fmt::Display for Mag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64_up())
    }
}
