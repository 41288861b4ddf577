use num_complex::Complex;
use serde::Serialize;

use super::{checkpoint_sums, csv_field, normalize_checkpoints, unit_phase, Tabular};
use crate::error::{Error, Result};
use crate::scalar::AnalysisFloat;
use crate::sequences::ModOneSample;

/// Default verdict threshold is `DEFAULT_THRESHOLD_SCALE / sqrt(N)`.
pub const DEFAULT_THRESHOLD_SCALE: f64 = 5.0;

/// `(1/N) sum_n e^{2 pi i h x_n}` over a slice of reals.
pub fn weyl_sum_slice<F: AnalysisFloat>(x: &[F], h: i64) -> Result<Complex<F>> {
    Ok(weyl_checkpoints(x, h, &[x.len()])?[0])
}

/// Normalized Weyl sum of a sample at frequency `h != 0`.
pub fn weyl_sum(x: &ModOneSample, h: i64) -> Result<Complex<f64>> {
    weyl_sum_slice(&x.values, h)
}

fn weyl_checkpoints<F: AnalysisFloat>(x: &[F], h: i64, checkpoints: &[usize]) -> Result<Vec<Complex<F>>> {
    if h == 0 {
        return Err(Error::Argument("frequency h must be non-zero".into()));
    }
    if x.is_empty() {
        return Err(Error::Argument("empty sample".into()));
    }
    let hf = F::from_i64(h).unwrap();
    let sums = checkpoint_sums(x.len(), checkpoints, |i| {
        let v = hf * x[i];
        unit_phase(v - v.floor())
    });
    Ok(sums
        .into_iter()
        .zip(checkpoints)
        .map(|(s, &n)| s / F::from_usize(n).unwrap())
        .collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct WeylRow {
    pub h: i64,
    pub n: usize,
    pub re: f64,
    pub im: f64,
    pub magnitude: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct WeylReport {
    pub source: String,
    pub max_h: i64,
    pub checkpoints: Vec<usize>,
    pub rows: Vec<WeylRow>,
    pub threshold: f64,
    /// `max_h |S|` at the final checkpoint.
    pub final_max: f64,
    pub consistent_with_ud: bool,
}

impl WeylReport {
    pub fn magnitude(&self, h: i64, n: usize) -> Option<f64> {
        self.rows.iter().find(|r| r.h == h && r.n == n).map(|r| r.magnitude)
    }
}

/// Weyl sums for `h = 1..=max_h` at every checkpoint. The verdict compares
/// the largest magnitude at the last checkpoint with `threshold`
/// (default `5 / sqrt(N)`).
pub fn ud_test(x: &ModOneSample, max_h: i64, checkpoints: &[usize], threshold: Option<f64>) -> Result<WeylReport> {
    if max_h < 1 {
        return Err(Error::Argument("H must be at least 1".into()));
    }
    let cps = normalize_checkpoints(checkpoints, x.len())?;
    let last = *cps.last().unwrap();
    let threshold = threshold.unwrap_or(DEFAULT_THRESHOLD_SCALE / (last as f64).sqrt());
    let mut rows = Vec::new();
    for h in 1..=max_h {
        let sums = weyl_checkpoints(&x.values, h, &cps)?;
        for (s, &n) in sums.iter().zip(&cps) {
            rows.push(WeylRow { h, n, re: s.re, im: s.im, magnitude: s.norm() });
        }
    }
    let final_max = rows.iter().filter(|r| r.n == last).map(|r| r.magnitude).fold(0.0, f64::max);
    Ok(WeylReport {
        source: x.meta.source.clone(),
        max_h,
        checkpoints: cps,
        rows,
        threshold,
        final_max,
        consistent_with_ud: final_max < threshold,
    })
}

impl Tabular for WeylReport {
    fn csv_header() -> &'static str {
        "source,h,n,re,im,magnitude"
    }

    fn csv_rows(&self) -> Vec<String> {
        let src = csv_field(&self.source);
        self.rows
            .iter()
            .map(|r| format!("{src},{},{},{:e},{:e},{:e}", r.h, r.n, r.re, r.im, r.magnitude))
            .collect()
    }
}
