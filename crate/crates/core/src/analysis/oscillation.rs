use rayon::prelude::*;
use serde::Serialize;

use super::{checkpoint_sums, csv_field, normalize_checkpoints, unit_phase, Tabular};
use crate::error::{Error, Result};
use crate::precision::ExactReal;
use crate::scalar::AnalysisFloat;
use crate::sequences::{poly_mod_one, ComplexSequence, Polynomial};
use num_complex::Complex;

#[derive(Clone, Debug, Serialize)]
pub struct OscillationRow {
    pub phase: String,
    pub n: usize,
    pub re: f64,
    pub im: f64,
    pub magnitude: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthRow {
    pub n: usize,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthReport {
    pub lambda: f64,
    pub rows: Vec<GrowthRow>,
    pub bounded: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct OscillationReport {
    pub bound: f64,
    pub checkpoints: Vec<usize>,
    pub rows: Vec<OscillationRow>,
    pub growth: Vec<GrowthReport>,
}

impl OscillationReport {
    /// Magnitudes for one phase polynomial, in checkpoint order.
    pub fn magnitudes(&self, phase: &str) -> Vec<f64> {
        self.rows.iter().filter(|r| r.phase == phase).map(|r| r.magnitude).collect()
    }

    pub fn final_magnitude(&self, phase: &str) -> Option<f64> {
        self.magnitudes(phase).last().copied()
    }
}

fn phase_rows<F: AnalysisFloat>(
    c: &ComplexSequence<F>,
    p: &Polynomial<ExactReal>,
    cps: &[usize],
) -> Result<Vec<OscillationRow>> {
    let n = c.len();
    let phases = poly_mod_one(p, n)?;
    let sums = checkpoint_sums(n, cps, |i| c.terms[i] * unit_phase(F::from_f64(phases.values[i]).unwrap()));
    let label = p.to_csv_list();
    Ok(sums
        .into_iter()
        .zip(cps)
        .map(|(s, &k)| {
            let avg: Complex<F> = s / F::from_usize(k).unwrap();
            OscillationRow {
                phase: label.clone(),
                n: k,
                re: avg.re.to_f64().unwrap(),
                im: avg.im.to_f64().unwrap(),
                magnitude: avg.norm().to_f64().unwrap(),
            }
        })
        .collect())
}

/// `(1/N) sum_{n<=N} c_n e^{2 pi i P(n)}` at each checkpoint.
pub fn oscillation_avg<F: AnalysisFloat>(
    c: &ComplexSequence<F>,
    p: &Polynomial<ExactReal>,
    checkpoints: &[usize],
) -> Result<OscillationReport> {
    oscillation_test(c, std::slice::from_ref(p), checkpoints, &[])
}

/// Averages against several phase polynomials plus growth diagnostics for
/// each `lambda`.
pub fn oscillation_test<F: AnalysisFloat>(
    c: &ComplexSequence<F>,
    phases: &[Polynomial<ExactReal>],
    checkpoints: &[usize],
    lambdas: &[f64],
) -> Result<OscillationReport> {
    if c.is_empty() {
        return Err(Error::Argument("empty sequence".into()));
    }
    let cps = normalize_checkpoints(checkpoints, c.len())?;
    let per_phase: Vec<Vec<OscillationRow>> =
        phases.par_iter().map(|p| phase_rows(c, p, &cps)).collect::<Result<_>>()?;
    let growth = lambdas.iter().map(|&l| growth_condition(c, l, &cps)).collect::<Result<_>>()?;
    Ok(OscillationReport {
        bound: c.bound.to_f64().unwrap(),
        checkpoints: cps,
        rows: per_phase.into_iter().flatten().collect(),
        growth,
    })
}

/// `(1/N) sum_{n<=N} |c_n|^lambda` at each checkpoint. `bounded` holds when no
/// value exceeds its predecessor by more than 10%.
pub fn growth_condition<F: AnalysisFloat>(
    c: &ComplexSequence<F>,
    lambda: f64,
    checkpoints: &[usize],
) -> Result<GrowthReport> {
    if !(lambda > 1.0) {
        return Err(Error::Argument(format!("lambda must exceed 1, got {lambda}")));
    }
    if c.is_empty() {
        return Err(Error::Argument("empty sequence".into()));
    }
    let cps = normalize_checkpoints(checkpoints, c.len())?;
    let l = F::from_f64(lambda).unwrap();
    let sums = checkpoint_sums(c.len(), &cps, |i| Complex::new(c.modulus(i).powf(l), F::zero()));
    let rows: Vec<GrowthRow> = sums
        .into_iter()
        .zip(&cps)
        .map(|(s, &n)| GrowthRow { n, value: (s.re / F::from_usize(n).unwrap()).to_f64().unwrap() })
        .collect();
    let bounded = rows.windows(2).all(|w| w[1].value <= 1.1 * w[0].value);
    Ok(GrowthReport { lambda, rows, bounded })
}

impl Tabular for OscillationReport {
    fn csv_header() -> &'static str {
        "kind,key,n,re,im,magnitude"
    }

    fn csv_rows(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .rows
            .iter()
            .map(|r| format!("phase,{},{},{:e},{:e},{:e}", csv_field(&r.phase), r.n, r.re, r.im, r.magnitude))
            .collect();
        for g in &self.growth {
            for r in &g.rows {
                out.push(format!("growth,{},{},{:e},0,{:e}", g.lambda, r.n, r.value, r.value));
            }
        }
        out
    }
}

impl Tabular for GrowthReport {
    fn csv_header() -> &'static str {
        "lambda,n,value"
    }

    fn csv_rows(&self) -> Vec<String> {
        self.rows.iter().map(|r| format!("{},{},{:e}", self.lambda, r.n, r.value)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::to_exponential;
    use crate::sequences::ModOneSample;

    fn poly(s: &str) -> Polynomial<ExactReal> {
        Polynomial::parse_list(s).unwrap()
    }

    #[test]
    fn ones_against_zero_phase() {
        let r = oscillation_avg(&ComplexSequence::<f64>::ones(50), &Polynomial::zero(), &[10, 50]).unwrap();
        assert_eq!(r.magnitudes("0"), vec![1.0, 1.0]);
    }

    #[test]
    fn conjugate_phases_cancel() {
        let x = ModOneSample::from_values((1..=40).map(|n| if n % 2 == 1 { 0.5 } else { 0.0 }).collect(), "n/2").unwrap();
        let c = to_exponential(&x);
        let r = oscillation_avg(&c, &poly("0,1/2"), &[]).unwrap();
        assert_eq!(r.rows[0].re, 1.0);
        assert_eq!(r.rows[0].im, 0.0);
    }

    #[test]
    fn growth_of_unit_and_zero_sequences() {
        let g = growth_condition(&ComplexSequence::<f64>::ones(1000), 2.5, &[10, 100, 1000]).unwrap();
        assert!(g.rows.iter().all(|r| r.value == 1.0));
        assert!(g.bounded);
        let z = ComplexSequence::new(vec![Complex::new(0.0, 0.0); 10], 0.0);
        let g = growth_condition(&z, 2.0, &[]).unwrap();
        assert_eq!(g.rows[0].value, 0.0);
    }

    #[test]
    fn lambda_must_exceed_one() {
        let c = ComplexSequence::<f64>::ones(3);
        assert!(matches!(growth_condition(&c, 1.0, &[]), Err(Error::Argument(_))));
        assert!(matches!(growth_condition(&c, f64::NAN, &[]), Err(Error::Argument(_))));
    }

    #[test]
    fn csv_has_row_per_phase_and_checkpoint() {
        let c = ComplexSequence::<f64>::ones(20);
        let r = oscillation_test(&c, &[poly("0,1/3"), poly("0,0,1/5")], &[10, 20], &[2.0]).unwrap();
        assert_eq!(r.to_csv().lines().count(), 1 + 4 + 2);
    }
}
