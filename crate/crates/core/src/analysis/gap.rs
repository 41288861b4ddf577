//! Grid certificate for the derivative-gap hypothesis of the metric theorem.
//!
//! With `y_n(x) = alpha g(x) x^n prod_j (x^{h_j} - 1)` the check evaluates
//! `y'_n - y'_m` and its derivative as ball enclosures on an exact rational
//! grid over `[a, eta]`. The result is a finite certificate on the grid only.

use num_bigint::Sign;
use rayon::prelude::*;
use serde::Serialize;

use super::Tabular;
use crate::error::{Error, Result};
use crate::precision::{Ball, Dyadic, ExactReal, GExpr, Jet2};

#[derive(Clone, Debug)]
pub struct GapParams {
    pub alpha: ExactReal,
    pub g: GExpr,
    pub exponents: Vec<u32>,
    pub a: ExactReal,
    pub eta: ExactReal,
    pub n_max: u32,
    pub m_max: u32,
    pub grid_points: usize,
    pub bits: u32,
}

impl GapParams {
    pub fn new(g: GExpr, a: ExactReal, eta: ExactReal) -> GapParams {
        GapParams {
            alpha: ExactReal::from_integer(1),
            g,
            exponents: Vec::new(),
            a,
            eta,
            n_max: 6,
            m_max: 5,
            grid_points: 64,
            bits: 128,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GapRow {
    pub x: f64,
    pub n: u32,
    pub m: u32,
    /// Midpoint of the enclosure of `y'_n(x) - y'_m(x)`.
    pub gap: f64,
    /// Lower bound of `|y'_n(x) - y'_m(x)|`.
    pub gap_lower: f64,
    /// Midpoint of the enclosure of `y''_n(x) - y''_m(x)`.
    pub slope: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GapReport {
    pub certificate: &'static str,
    pub grid_points: usize,
    pub pairs: usize,
    /// Every pair's gap is non-decreasing along the grid, up to the radii.
    pub monotone_ok: bool,
    /// No second-derivative difference is certifiably negative.
    pub slope_nonneg: bool,
    #[serde(rename = "L_lower")]
    pub l_lower: f64,
    pub rows: Vec<GapRow>,
}

fn power_jet(x: &Ball, n: u64) -> Jet2<Ball> {
    let d1 = if n >= 1 { x.pow(n - 1).mul_int(n as i64) } else { Ball::zero() };
    let d2 = if n >= 2 { x.pow(n - 2).mul_int((n * (n - 1)) as i64) } else { Ball::zero() };
    Jet2::new(x.pow(n), d1, d2)
}

fn abs_lower(b: &Ball) -> Dyadic {
    match b.sign() {
        Some(Sign::Plus) => b.lower(),
        Some(Sign::Minus) => b.upper().neg(),
        _ => Dyadic::zero(),
    }
}

/// A double no larger than the non-negative dyadic `d`.
fn f64_down(d: &Dyadic) -> f64 {
    let v = d.to_f64();
    if v > 0.0 {
        v * (1.0 - f64::EPSILON)
    } else {
        v
    }
}

/// Jets of `y'_n - y'_m` at one grid point, for all pairs.
fn pair_jets(p: &GapParams, alpha: &Ball, x: &Ball) -> Result<Vec<(u32, u32, Jet2<Ball>)>> {
    let mut base = p.g.eval_jet(x)?.scale(alpha);
    for &h in &p.exponents {
        let pj = power_jet(x, h as u64);
        base = base * Jet2::new(pj.value.sub(&Ball::one()), pj.d1, pj.d2);
    }
    let ys: Vec<Jet2<Ball>> = (0..=p.n_max).map(|n| base.clone() * power_jet(x, n as u64)).collect();
    let mut out = Vec::new();
    for m in 1..=p.m_max {
        for n in m + 1..=p.n_max {
            out.push((n, m, ys[n as usize].clone() - ys[m as usize].clone()));
        }
    }
    Ok(out)
}

/// Evaluates `y'_n - y'_m` for `1 <= m <= m_max < n <= n_max` on
/// `grid_points` equally spaced points of `[a, eta]`.
pub fn koksma_gap_check(p: &GapParams) -> Result<GapReport> {
    if !p.a.gt(&ExactReal::from_integer(1)) {
        return Err(Error::Domain(format!("interval start must exceed 1, got {}", p.a)));
    }
    if !p.eta.gt(&p.a) {
        return Err(Error::Argument("interval end must exceed its start".into()));
    }
    if p.m_max < 1 || p.n_max <= p.m_max {
        return Err(Error::Argument("need n_max > m_max >= 1".into()));
    }
    if p.grid_points < 16 {
        return Err(Error::Argument("need at least 16 grid points".into()));
    }
    let bits = p.bits.max(64);
    let alpha = p.alpha.refine(bits);
    let width = p.eta.clone() - p.a.clone();
    let last = (p.grid_points - 1) as i64;
    let per_point: Vec<(f64, Vec<(u32, u32, Jet2<Ball>)>)> = (0..p.grid_points)
        .into_par_iter()
        .map(|i| {
            let xi = p.a.clone() + width.clone() * ExactReal::from_ratio(i as i64, last);
            let x = xi.refine(bits);
            Ok((xi.to_f64(), pair_jets(p, &alpha, &x)?))
        })
        .collect::<Result<_>>()?;

    let pairs = per_point[0].1.len();
    let mut monotone_ok = true;
    let mut slope_nonneg = true;
    let mut l_lower: Option<Dyadic> = None;
    let mut rows = Vec::with_capacity(pairs * per_point.len());
    for k in 0..pairs {
        for (i, (x, jets)) in per_point.iter().enumerate() {
            let (n, m, jet) = &jets[k];
            if i > 0 {
                let prev = &per_point[i - 1].1[k].2.d1;
                if jet.d1.upper().cmp_value(&prev.lower()).is_lt() {
                    monotone_ok = false;
                }
            }
            if jet.d2.sign() == Some(Sign::Minus) {
                slope_nonneg = false;
            }
            let lo = abs_lower(&jet.d1);
            rows.push(GapRow { x: *x, n: *n, m: *m, gap: jet.d1.to_f64(), gap_lower: f64_down(&lo), slope: jet.d2.to_f64() });
            if l_lower.as_ref().map_or(true, |cur| lo.cmp_value(cur).is_lt()) {
                l_lower = Some(lo);
            }
        }
    }
    Ok(GapReport {
        certificate: "grid-verified",
        grid_points: p.grid_points,
        pairs,
        monotone_ok,
        slope_nonneg,
        l_lower: f64_down(&l_lower.unwrap_or_else(Dyadic::zero)),
        rows,
    })
}

/// `y_n(x)` in double precision, for finite-difference cross-checks.
pub fn y_value_f64(alpha: f64, g: &GExpr, exponents: &[u32], n: u32, x: f64) -> f64 {
    let prod: f64 = exponents.iter().map(|&h| x.powi(h as i32) - 1.0).product();
    alpha * g.eval_f64(x) * x.powi(n as i32) * prod
}

impl Tabular for GapReport {
    fn csv_header() -> &'static str {
        "x,n,m,gap,gap_lower,slope"
    }

    fn csv_rows(&self) -> Vec<String> {
        self.rows
            .iter()
            .map(|r| format!("{:e},{},{},{:e},{:e},{:e}", r.x, r.n, r.m, r.gap, r.gap_lower, r.slope))
            .collect()
    }
}
