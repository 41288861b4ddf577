use serde::Serialize;

use super::{csv_field, Tabular};
use crate::scalar::AnalysisFloat;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscrepancyReport {
    pub n: usize,
    pub d_star: f64,
    /// Sorted sample value at which the supremum is attained.
    pub argmax: f64,
}

/// Star discrepancy `D*_N = max_i max(i/N - x_(i), x_(i) - (i-1)/N)` over the
/// sorted sample. `O(N log N)`.
pub fn star_discrepancy<F: AnalysisFloat>(x: &[F]) -> DiscrepancyReport {
    let n = x.len();
    if n == 0 {
        return DiscrepancyReport { n: 0, d_star: 0.0, argmax: 0.0 };
    }
    let mut sorted: Vec<f64> = x.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let nf = n as f64;
    let mut best = f64::NEG_INFINITY;
    let mut argmax = sorted[0];
    for (i, &v) in sorted.iter().enumerate() {
        let above = (i + 1) as f64 / nf - v;
        let below = v - i as f64 / nf;
        let d = above.max(below);
        if d > best {
            best = d;
            argmax = v;
        }
    }
    DiscrepancyReport { n, d_star: best, argmax }
}

impl Tabular for DiscrepancyReport {
    fn csv_header() -> &'static str {
        "n,d_star,argmax"
    }

    fn csv_rows(&self) -> Vec<String> {
        vec![format!("{},{:e},{}", self.n, self.d_star, csv_field(&format!("{:e}", self.argmax)))]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_zeros() {
        for n in [1, 7, 100] {
            assert_eq!(star_discrepancy(&vec![0.0f64; n]).d_star, 1.0);
        }
    }

    #[test]
    fn two_point_support() {
        let x: Vec<f64> = (0..10).map(|i| if i % 2 == 0 { 0.5 } else { 0.0 }).collect();
        assert_eq!(star_discrepancy(&x).d_star, 0.5);
    }

    #[test]
    fn centered_grid_is_optimal() {
        let n = 64;
        let x: Vec<f64> = (1..=n).map(|i| (2 * i - 1) as f64 / (2 * n) as f64).collect();
        let d = star_discrepancy(&x).d_star;
        assert!((d - 1.0 / (2 * n) as f64).abs() < 1e-15);
    }
}
