//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails or runs over its time budget.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, RandBigInt};
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use equidist::analysis::{star_discrepancy, weyl_sum};
use equidist::harness::{run_experiment, scan_alpha, scan_beta, ScanConfig};
use equidist::precision::ExactReal;
use equidist::sequences::{
    generate_power_sequence, generate_raw, generate_raw_at, poly_mod_one, reduce_terms, GenerateOptions, Polynomial,
    SequenceSpec,
};
use equidist::Error;

type Outcome = Result<String, String>;

fn check(cond: bool, ok: String, bad: String) -> Outcome {
    if cond {
        Ok(ok)
    } else {
        Err(bad)
    }
}

fn brute_discrepancy(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mut best: f64 = 0.0;
    for a in x.iter().copied().chain(std::iter::once(1.0)) {
        let below = x.iter().filter(|&&v| v < a).count() as f64;
        let upto = x.iter().filter(|&&v| v <= a).count() as f64;
        best = best.max((below / n - a).abs()).max((upto / n - a).abs());
    }
    best
}

fn discrepancy_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let n = rng.gen_range(1..=512);
        let x: Vec<f64> = (0..n)
            .map(|_| if rng.gen_bool(0.2) { rng.gen_range(0..16) as f64 / 16.0 } else { rng.gen::<f64>() })
            .collect();
        worst = worst.max((star_discrepancy(&x).d_star - brute_discrepancy(&x)).abs());
    }
    check(worst <= 1e-12, format!("200 samples, max deviation {worst:.1e}"), format!("deviation {worst:e} > 1e-12"))
}

fn weyl_rotation() -> Outcome {
    let n = 100_000;
    let phi = ExactReal::golden_ratio();
    let pf = phi.refine(128).to_f64();
    let x = poly_mod_one(&Polynomial::new(vec![ExactReal::zero(), phi]), n).map_err(|e| e.to_string())?;
    let mut slack = f64::INFINITY;
    for h in 1..=5 {
        let bound = 1.0 / (n as f64 * (std::f64::consts::PI * h as f64 * pf).sin().abs());
        let m = weyl_sum(&x, h).map_err(|e| e.to_string())?.norm();
        if m > bound {
            return Err(format!("h = {h}: |S| = {m:e} exceeds {bound:e}"));
        }
        slack = slack.min(bound / m);
    }
    Ok(format!("h = 1..5 within the geometric bound (min ratio {slack:.3})"))
}

fn exceptional() -> Outcome {
    let two = generate_power_sequence(&SequenceSpec::geometric(ExactReal::one(), ExactReal::from_integer(2)), 512)
        .map_err(|e| e.to_string())?;
    for n in 1..=512 {
        let d = star_discrepancy(&two.values[..n]).d_star;
        if d != 1.0 {
            return Err(format!("beta = 2: D* = {d} at N = {n}"));
        }
    }
    let phi = generate_power_sequence(&SequenceSpec::geometric(ExactReal::one(), ExactReal::golden_ratio()), 200)
        .map_err(|e| e.to_string())?;
    // phi^n + psi^n is the Lucas number L(n) with psi = -1/phi
    let psi = (1.0 - 5f64.sqrt()) / 2.0;
    for (i, v) in phi.values.iter().enumerate() {
        let tail = psi.powi(i as i32 + 1);
        let oracle = if tail > 0.0 { 1.0 - tail } else { -tail };
        if (oracle - v).abs() > 1e-14 && i >= 2 {
            return Err(format!("phi^{}: {v} vs Lucas oracle {oracle}", i + 1));
        }
    }
    let d = star_discrepancy(&phi.values).d_star;
    check(d >= 0.4, format!("beta = 2 gives D* = 1 for N <= 512; golden ratio D*_200 = {d:.4}"), format!("golden ratio D* = {d}"))
}

fn main_theorem_beta() -> Outcome {
    let plain = scan_beta(&ScanConfig::beta_default()).map_err(|e| e.to_string())?;
    let mut cfg = ScanConfig::beta_default();
    cfg.q = Polynomial::parse_list("0,1,sqrt(2)").map_err(|e| e.to_string())?;
    let shifted = scan_beta(&cfg).map_err(|e| e.to_string())?;
    let msg = format!("pass fractions {:.2} (Q = 0) and {:.2} (Q = n + sqrt(2) n^2)", plain.pass_fraction, shifted.pass_fraction);
    check(plain.pass_fraction >= 0.95 && shifted.pass_fraction >= 0.95, msg.clone(), msg)
}

fn main_theorem_alpha() -> Outcome {
    let r = scan_alpha(&ScanConfig::alpha_default()).map_err(|e| e.to_string())?;
    let msg = format!("pass fraction {:.2} at beta = 3/2", r.pass_fraction);
    check(r.pass_fraction >= 0.95, msg.clone(), msg)
}

fn experiment(name: &str) -> Outcome {
    let out = run_experiment(name, &BTreeMap::new()).map_err(|e| e.to_string())?;
    let detail: Vec<String> = out.checks.iter().map(|c| format!("{}: {}", c.name, c.detail)).collect();
    check(out.passed, detail.join("; "), detail.join("; "))
}

fn identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..100 {
        let deg = rng.gen_range(0..=6);
        let coeffs: Vec<BigRational> =
            (0..=deg).map(|_| BigRational::new(rng.gen_range(-999i64..1000).into(), rng.gen_range(1i64..500).into())).collect();
        let q = Polynomial::new(coeffs);
        let h = rng.gen_range(1..=5u64);
        let d = q.shift_difference(h);
        for n in -3i64..=10 {
            if d.eval_int(n) != q.eval_int(n + h as i64) - q.eval_int(n) {
                return Err(format!("shift difference mismatch for h = {h} at n = {n}"));
            }
        }
    }
    experiment("vdc-identity").map(|s| format!("100 random shift differences exact; {s}"))
}

fn mobius() -> Outcome {
    experiment("mobius-oscillation")
}

fn precision_certification() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let scale = BigInt::one() << 300u32;
    let k = rng.gen_bigint_range(&(&scale + 1u32), &(&scale << 1u32));
    let beta = ExactReal::from_rational(BigRational::new(k, scale));
    let spec = SequenceSpec::geometric(ExactReal::one(), beta);
    let n = 10_000;
    let opts = GenerateOptions::default();
    let (raw, units) = generate_raw(&spec, n, &opts).map_err(|e| e.to_string())?;
    let worst = units.iter().map(|u| u.certified_error).fold(0.0, f64::max);
    if worst > 2f64.powi(-60) {
        return Err(format!("certified error {worst:e} above 2^-60"));
    }
    let finer = generate_raw_at(&spec, n, raw.working_bits * 2, opts.chunk).map_err(|e| e.to_string())?;
    let fine_units = reduce_terms(&finer.terms, 60).map_err(|e| e.to_string())?;
    let mut agree: f64 = 0.0;
    for (a, b) in units.iter().zip(&fine_units) {
        let d = (a.value - b.value).abs();
        agree = agree.max(d.min(1.0 - d));
    }
    if agree > 2f64.powi(-53) {
        return Err(format!("runs at {} and {} bits differ by {agree:e}", raw.working_bits, finer.working_bits));
    }
    let starved = GenerateOptions { max_bits: 1 << 12, ..GenerateOptions::default() };
    match equidist::sequences::generate_power_sequence_with(&spec, n, &starved) {
        Err(Error::PrecisionExhausted { .. }) => {}
        other => return Err(format!("capped run returned {:?} instead of PrecisionExhausted", other.map(|s| s.certified_error))),
    }
    Ok(format!(
        "max certified error {:.1e} at {} bits; {}-bit rerun agrees within {agree:.1e}; capped run reports exhaustion",
        worst,
        raw.working_bits,
        finer.working_bits
    ))
}

fn koksma() -> Outcome {
    experiment("koksma-gap")
}

fn main() -> ExitCode {
    let criteria: [(&str, Duration, fn() -> Outcome); 9] = [
        ("discrepancy oracle", Duration::from_secs(10), discrepancy_oracle),
        ("weyl rotation bound", Duration::from_secs(5), weyl_rotation),
        ("exceptional-set probes", Duration::from_secs(5), exceptional),
        ("beta scan", Duration::from_secs(180), main_theorem_beta),
        ("alpha scan", Duration::from_secs(120), main_theorem_alpha),
        ("difference identities", Duration::from_secs(10), identities),
        ("mobius oscillation", Duration::from_secs(120), mobius),
        ("precision certification", Duration::from_secs(120), precision_certification),
        ("koksma gap diagnostic", Duration::from_secs(60), koksma),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let (status, detail) = match result {
            Ok(_) if elapsed > *budget => ("FAIL", format!("took {:.1?}, budget {:?}", elapsed, budget)),
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("{status} [{}] {name} ({:.2?}): {detail}", i + 1, elapsed);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
