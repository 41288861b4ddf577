use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, RandBigInt};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{csv_field, star_discrepancy, ud_test, Tabular};
use crate::error::{Error, Result};
use crate::precision::{ExactReal, GExpr};
use crate::sequences::{generate_power_sequence_with, parse_exponents, GenerateOptions, Polynomial, SequenceSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanAxis {
    Beta,
    Alpha,
}

impl fmt::Display for ScanAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScanAxis::Beta => "beta",
            ScanAxis::Alpha => "alpha",
        })
    }
}

/// A one-parameter scan over dyadic `beta` (or `alpha`) values.
#[derive(Clone, Debug)]
pub struct ScanConfig {
    pub axis: ScanAxis,
    /// `alpha` for a beta scan, `beta` for an alpha scan.
    pub fixed: ExactReal,
    pub lo: BigRational,
    pub hi: BigRational,
    pub samples: usize,
    pub seed: u64,
    /// Fractional bits of every sampled value.
    pub bits: u32,
    pub g: GExpr,
    pub hs: Vec<u32>,
    pub q: Polynomial<ExactReal>,
    pub n: usize,
    /// A sample passes when its star discrepancy is below this.
    pub threshold: f64,
    pub weyl_h: i64,
    /// Extra parameter values evaluated ahead of the random samples.
    pub overrides: Vec<ExactReal>,
    pub max_working_bits: u64,
}

fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

impl ScanConfig {
    /// Defaults: `alpha = 1`, `beta` in `(1, 2)`, 100 samples, 128 bits,
    /// `g = 1`, `Q = 0`, `N = 4096`, threshold 0.05.
    pub fn beta_default() -> ScanConfig {
        ScanConfig {
            axis: ScanAxis::Beta,
            fixed: ExactReal::one(),
            lo: ratio(1, 1),
            hi: ratio(2, 1),
            samples: 100,
            seed: 1,
            bits: 128,
            g: GExpr::one(),
            hs: Vec::new(),
            q: Polynomial::zero(),
            n: 4096,
            threshold: 0.05,
            weyl_h: 5,
            overrides: Vec::new(),
            max_working_bits: 1 << 24,
        }
    }

    /// Defaults: `beta = 3/2`, `alpha` in `(0, 1)`, otherwise as
    /// [`ScanConfig::beta_default`].
    pub fn alpha_default() -> ScanConfig {
        ScanConfig {
            axis: ScanAxis::Alpha,
            fixed: ExactReal::from_ratio(3, 2),
            lo: ratio(0, 1),
            hi: ratio(1, 1),
            ..ScanConfig::beta_default()
        }
    }

    /// Applies flat `key = value` settings on top of `self`.
    pub fn apply(mut self, map: &BTreeMap<String, String>) -> Result<ScanConfig> {
        for (key, value) in map {
            let v = value.as_str();
            match key.as_str() {
                "alpha" | "beta" => {
                    if key == &self.axis.to_string() {
                        return Err(Error::Config(format!("{key} is the scanned parameter; use lo/hi")));
                    }
                    self.fixed = v.parse()?;
                }
                "lo" => self.lo = parse_rational(v)?,
                "hi" => self.hi = parse_rational(v)?,
                "samples" => self.samples = parse_num(key, v)?,
                "seed" => self.seed = parse_num(key, v)?,
                "bits" => self.bits = parse_num(key, v)?,
                "g" => self.g = v.parse()?,
                "hs" => self.hs = parse_exponents(v)?,
                "q" | "q_coeffs" => self.q = Polynomial::parse_list(v)?,
                "n" => self.n = parse_num(key, v)?,
                "threshold" => self.threshold = parse_num(key, v)?,
                "h" | "weyl_h" => self.weyl_h = parse_num(key, v)?,
                "max_bits" => self.max_working_bits = parse_num(key, v)?,
                "overrides" => {
                    self.overrides = v
                        .split(';')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(str::parse)
                        .collect::<Result<_>>()?
                }
                "axis" | "format" | "out" => {}
                other => return Err(Error::Config(format!("unknown key {other:?}"))),
            }
        }
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 && self.overrides.is_empty() {
            return Err(Error::Config("sample count must be at least 1".into()));
        }
        if self.lo >= self.hi {
            return Err(Error::Config("scan range needs lo < hi".into()));
        }
        if self.n == 0 {
            return Err(Error::Config("N must be at least 1".into()));
        }
        if self.weyl_h < 1 {
            return Err(Error::Config("h must be at least 1".into()));
        }
        let one = ExactReal::one();
        match self.axis {
            ScanAxis::Beta => {
                if self.lo < BigRational::one() {
                    return Err(Error::Config("beta range must lie in (1, inf)".into()));
                }
                if let Some(b) = self.overrides.iter().find(|b| !b.gt(&one)) {
                    return Err(Error::Config(format!("beta override {b} is not above 1")));
                }
                if self.fixed.is_zero() {
                    return Err(Error::Config("alpha must be non-zero".into()));
                }
            }
            ScanAxis::Alpha => {
                if self.lo < BigRational::zero() && self.hi > BigRational::zero() {
                    return Err(Error::Config("alpha range must exclude 0".into()));
                }
                if self.overrides.iter().any(ExactReal::is_zero) {
                    return Err(Error::Config("alpha override 0 is not allowed".into()));
                }
                if !self.fixed.gt(&one) {
                    return Err(Error::Config(format!("beta must exceed 1, got {}", self.fixed)));
                }
            }
        }
        Ok(())
    }

    /// Parameter values in evaluation order: overrides, then `samples`
    /// dyadic values `k / 2^bits` with `k` uniform strictly inside
    /// `(lo 2^bits, hi 2^bits)`.
    pub fn parameters(&self) -> Result<Vec<ExactReal>> {
        self.validate()?;
        let scale = BigInt::one() << self.bits as usize;
        let k_lo = (&self.lo * BigRational::from_integer(scale.clone())).floor().to_integer() + 1;
        let k_hi = (&self.hi * BigRational::from_integer(scale.clone())).ceil().to_integer();
        if k_lo >= k_hi {
            return Err(Error::Config("scan range is empty at this bit budget".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut out = self.overrides.clone();
        for _ in 0..self.samples {
            let k = rng.gen_bigint_range(&k_lo, &k_hi);
            out.push(ExactReal::from_rational(BigRational::new(k, scale.clone())));
        }
        Ok(out)
    }

    fn spec_for(&self, value: &ExactReal) -> SequenceSpec {
        let (alpha, beta) = match self.axis {
            ScanAxis::Beta => (self.fixed.clone(), value.clone()),
            ScanAxis::Alpha => (value.clone(), self.fixed.clone()),
        };
        SequenceSpec::geometric(alpha, beta).with_g(self.g.clone()).with_exponents(self.hs.clone()).with_q(self.q.clone())
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let x: ExactReal = s.parse()?;
    x.as_rational().ok_or_else(|| Error::Config(format!("scan bound {s:?} must be rational")))
}

fn parse_num<T: std::str::FromStr>(key: &str, s: &str) -> Result<T> {
    s.trim().parse().map_err(|_| Error::Config(format!("bad value {s:?} for {key}")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleStatus {
    Pass,
    Fail,
    Error,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanSample {
    pub index: usize,
    pub value: String,
    pub value_f64: f64,
    pub d_star: Option<f64>,
    pub max_weyl: Option<f64>,
    pub working_bits: Option<u64>,
    pub status: SampleStatus,
    pub message: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanReport {
    pub axis: ScanAxis,
    pub fixed: String,
    pub n: usize,
    pub threshold: f64,
    pub samples: Vec<ScanSample>,
    pub passes: usize,
    pub fails: usize,
    pub errors: usize,
    pub pass_fraction: f64,
    /// Indices of the samples with the largest discrepancy, worst first.
    pub worst: Vec<usize>,
}

impl ScanReport {
    pub fn any_precision_exhausted(&self) -> bool {
        self.samples.iter().any(|s| s.message.as_deref().is_some_and(|m| m.starts_with("precision exhausted")))
    }
}

fn run_sample(cfg: &ScanConfig, index: usize, value: &ExactReal) -> ScanSample {
    let mut sample = ScanSample {
        index,
        value: value.to_string(),
        value_f64: value.to_f64(),
        d_star: None,
        max_weyl: None,
        working_bits: None,
        status: SampleStatus::Error,
        message: None,
    };
    let opts = GenerateOptions { max_bits: cfg.max_working_bits, ..GenerateOptions::default() };
    let result = generate_power_sequence_with(&cfg.spec_for(value), cfg.n, &opts)
        .and_then(|x| Ok((star_discrepancy(&x.values), ud_test(&x, cfg.weyl_h, &[], None)?, x.meta.working_bits)));
    match result {
        Ok((d, w, bits)) => {
            sample.d_star = Some(d.d_star);
            sample.max_weyl = Some(w.final_max);
            sample.working_bits = Some(bits);
            sample.status = if d.d_star < cfg.threshold { SampleStatus::Pass } else { SampleStatus::Fail };
        }
        Err(e) => sample.message = Some(e.to_string()),
    }
    sample
}

fn scan(cfg: &ScanConfig, axis: ScanAxis) -> Result<ScanReport> {
    if cfg.axis != axis {
        return Err(Error::Config(format!("config scans {}, expected {axis}", cfg.axis)));
    }
    let params = cfg.parameters()?;
    let samples: Vec<ScanSample> = params.par_iter().enumerate().map(|(i, v)| run_sample(cfg, i, v)).collect();
    let count = |s: SampleStatus| samples.iter().filter(|x| x.status == s).count();
    let (passes, fails, errors) = (count(SampleStatus::Pass), count(SampleStatus::Fail), count(SampleStatus::Error));
    let mut order: Vec<usize> = (0..samples.len()).filter(|&i| samples[i].d_star.is_some()).collect();
    order.sort_by(|&a, &b| samples[b].d_star.unwrap().total_cmp(&samples[a].d_star.unwrap()).then(a.cmp(&b)));
    order.truncate(5);
    Ok(ScanReport {
        axis,
        fixed: cfg.fixed.to_string(),
        n: cfg.n,
        threshold: cfg.threshold,
        pass_fraction: passes as f64 / samples.len() as f64,
        passes,
        fails,
        errors,
        worst: order,
        samples,
    })
}

/// Samples `beta` over `(lo, hi)` with `alpha` fixed.
pub fn scan_beta(cfg: &ScanConfig) -> Result<ScanReport> {
    scan(cfg, ScanAxis::Beta)
}

/// Samples `alpha` over `(lo, hi)` with `beta` fixed.
pub fn scan_alpha(cfg: &ScanConfig) -> Result<ScanReport> {
    scan(cfg, ScanAxis::Alpha)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

impl Tabular for ScanReport {
    fn csv_header() -> &'static str {
        "index,axis,value,value_f64,d_star,max_weyl,working_bits,status,message"
    }

    fn csv_rows(&self) -> Vec<String> {
        self.samples
            .iter()
            .map(|s| {
                format!(
                    "{},{},{},{:e},{},{},{},{},{}",
                    s.index,
                    self.axis,
                    csv_field(&s.value),
                    s.value_f64,
                    opt(s.d_star),
                    opt(s.max_weyl),
                    s.working_bits.map(|b| b.to_string()).unwrap_or_default(),
                    serde_json::to_value(s.status).unwrap().as_str().unwrap(),
                    csv_field(s.message.as_deref().unwrap_or("")),
                )
            })
            .collect()
    }
}
