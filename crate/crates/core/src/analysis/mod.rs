//! Measurement engines: Weyl sums, star discrepancy, oscillation averages,
//! the growth condition and the derivative-gap diagnostic.

mod discrepancy;
mod gap;
mod oscillation;
mod sum;
mod weyl;

pub use discrepancy::{star_discrepancy, DiscrepancyReport};
pub use gap::{koksma_gap_check, y_value_f64, GapParams, GapReport, GapRow};
pub use oscillation::{growth_condition, oscillation_avg, oscillation_test, GrowthReport, GrowthRow, OscillationReport, OscillationRow};
pub use sum::{checkpoint_sums, CompensatedSum, ComplexSum, SUM_BLOCK};
pub use weyl::{ud_test, weyl_sum, weyl_sum_slice, WeylReport, WeylRow, DEFAULT_THRESHOLD_SCALE};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::AnalysisFloat;

/// `e^{2 pi i theta}`. The argument is reduced mod 1 and split into a
/// quarter turn plus a remainder in `[0, 1/4)`, so multiples of `1/4` map to
/// exactly `1, i, -1, -i`.
pub fn unit_phase<F: AnalysisFloat>(theta: F) -> Complex<F> {
    let t = theta - theta.floor();
    let four = F::from_f64(4.0).unwrap();
    let mut q = (t * four).floor();
    if q >= four {
        q = F::from_f64(3.0).unwrap();
    }
    let r = t - q / four;
    let (s, c) = (F::TAU() * r).sin_cos();
    match q.to_u8().unwrap_or(0) {
        0 => Complex::new(c, s),
        1 => Complex::new(-s, c),
        2 => Complex::new(-c, -s),
        _ => Complex::new(s, -c),
    }
}

/// Sorted, de-duplicated checkpoints within `1..=n`; empty input means `[n]`.
pub fn normalize_checkpoints(checkpoints: &[usize], n: usize) -> Result<Vec<usize>> {
    if checkpoints.is_empty() {
        return Ok(vec![n]);
    }
    let mut cps = checkpoints.to_vec();
    cps.sort_unstable();
    cps.dedup();
    if cps[0] == 0 || *cps.last().unwrap() > n {
        return Err(Error::Argument(format!("checkpoints must lie in 1..={n}")));
    }
    Ok(cps)
}

/// CSV and JSON renderings of a report.
pub trait Tabular: serde::Serialize {
    fn csv_header() -> &'static str;
    fn csv_rows(&self) -> Vec<String>;

    fn to_csv(&self) -> String {
        let mut out = String::from(Self::csv_header());
        out.push('\n');
        for row in self.csv_rows() {
            out.push_str(&row);
            out.push('\n');
        }
        out
    }

    fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).unwrap_or_else(|e| format!("{{\"error\": \"{e}\"}}"))
    }
}

/// Quotes a CSV field when needed.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
