//! Worked examples checked against independently computed values.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use equidist::analysis::{star_discrepancy, ud_test, weyl_sum};
use equidist::mobius::mobius_sieve;
use equidist::precision::{ball_pow, frac_mod_one, refine, Ball, ExactReal};
use equidist::sequences::{generate_power_sequence, poly_mod_one, Polynomial, SequenceSpec};

fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

fn fibonacci(k: usize) -> (BigInt, BigInt) {
    let (mut a, mut b) = (BigInt::zero(), BigInt::one());
    for _ in 0..k {
        let c = &a + &b;
        a = b;
        b = c;
    }
    (a, b)
}

fn lucas(n: usize) -> BigInt {
    let (mut a, mut b) = (BigInt::from(2), BigInt::one());
    for _ in 0..n {
        let c = &a + &b;
        a = b;
        b = c;
    }
    a
}

#[test]
fn golden_ratio_between_convergents() {
    let b = refine(&ExactReal::golden_ratio(), 128);
    assert!(b.rad() <= equidist::precision::Mag::pow2(-126));
    // F(k+1)/F(k) and F(k+2)/F(k+1) bracket phi, 2^-140 apart for k = 100
    let (f0, f1) = fibonacci(100);
    let f2 = &f0 + &f1;
    let c1 = BigRational::new(f1.clone(), f0);
    let c2 = BigRational::new(f2, f1);
    let (lo, hi) = if c1 < c2 { (c1, c2) } else { (c2, c1) };
    assert!(b.lower().to_rational() <= hi);
    assert!(b.upper().to_rational() >= lo);
}

#[test]
fn golden_power_fifty_against_lucas() {
    let phi = refine(&ExactReal::golden_ratio(), 256);
    let p = ball_pow(&phi, 50);
    // phi^50 = L(50) - phi^-50 and 2^-35 < phi^-50 < 2^-34
    let l50 = BigRational::from_integer(lucas(50));
    assert_eq!(lucas(50), BigInt::from(28_143_753_123u64));
    let eps_hi = BigRational::new(BigInt::one(), BigInt::one() << 34);
    let eps_lo = BigRational::new(BigInt::one(), BigInt::one() << 35);
    assert!(p.lower().to_rational() > &l50 - eps_hi);
    assert!(p.upper().to_rational() < &l50 - eps_lo);
}

#[test]
fn frac_of_golden_square() {
    let phi = ExactReal::golden_ratio();
    let sq = refine(&(phi.clone() * phi.clone()), 128);
    let u = frac_mod_one(&sq, 100).unwrap();
    let expect = refine(&phi, 128).sub(&Ball::one());
    assert!(u.ball.overlaps(&expect));
    assert!((u.value - 0.6180339887498949).abs() < 1e-15);
}

#[test]
fn exact_fractions_of_rationals() {
    assert_eq!(frac_mod_one(&refine(&ExactReal::from_ratio(7, 3), 80), 60).unwrap().value, 1.0 / 3.0);
    assert_eq!(frac_mod_one(&refine(&ExactReal::from_ratio(-1, 4), 80), 60).unwrap().value, 0.75);
    assert!(refine(&ExactReal::from_ratio(7, 3), 64).contains_rational(&rat(7, 3)));
}

#[test]
fn golden_powers_hug_integers() {
    let x = generate_power_sequence(&SequenceSpec::geometric(ExactReal::one(), ExactReal::golden_ratio()), 20).unwrap();
    let inv_phi = 2.0 / (1.0 + 5f64.sqrt());
    for n in 3..=20usize {
        let v = x.values[n - 1];
        assert!(v.min(1.0 - v) <= 2.0 * inv_phi.powi(n as i32), "n = {n}: {v}");
    }
}

#[test]
fn period_two_orbit_examples() {
    let spec = SequenceSpec::geometric(ExactReal::from_ratio(1, 3), ExactReal::from_integer(2));
    let x = generate_power_sequence(&spec, 4).unwrap();
    assert_eq!(x.values, vec![2.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0]);
    let long = generate_power_sequence(&spec, 1000).unwrap();
    let s3 = weyl_sum(&long, 3).unwrap().norm();
    assert!(s3 > 0.5, "|S(3)| = {s3}");
    let ones = generate_power_sequence(&SequenceSpec::geometric(ExactReal::one(), ExactReal::from_integer(2)), 5).unwrap();
    assert_eq!(ones.values, vec![0.0; 5]);
}

#[test]
fn rotation_by_golden_ratio_geometric_bound() {
    let n = 100_000;
    let phi = ExactReal::golden_ratio();
    let x = poly_mod_one(&Polynomial::new(vec![ExactReal::zero(), phi.clone()]), n).unwrap();
    let pf = phi.to_f64();
    // |sum_{k<=N} e(k h phi)| = |sin(pi h N phi)| / |sin(pi h phi)|
    let bound = |h: i64| 1.0 / (n as f64 * (std::f64::consts::PI * h as f64 * pf).sin().abs());
    let r = ud_test(&x, 5, &[], None).unwrap();
    let overall = (1..=5).map(bound).fold(0.0, f64::max) * n as f64 * 1e-4;
    for h in 1..=5 {
        let m = r.magnitude(h, n).unwrap();
        assert!(m <= bound(h), "h = {h}");
        assert!(m <= overall);
    }
}

/// Supremum of |#{x_i < a}/N - a| and its right limits over all sample points.
fn brute_discrepancy(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mut best: f64 = 0.0;
    let mut cands: Vec<f64> = x.to_vec();
    cands.push(1.0);
    for &a in &cands {
        let below = x.iter().filter(|&&v| v < a).count() as f64;
        let upto = x.iter().filter(|&&v| v <= a).count() as f64;
        best = best.max((below / n - a).abs()).max((upto / n - a).abs());
    }
    best
}

#[test]
fn two_point_measure_discrepancy() {
    let x: Vec<f64> = (0..64).map(|i| if i % 2 == 0 { 0.5 } else { 0.0 }).collect();
    assert_eq!(brute_discrepancy(&x), 0.5);
    assert_eq!(star_discrepancy(&x).d_star, 0.5);
}

#[test]
fn mobius_table_examples() {
    let t = mobius_sieve(100).unwrap();
    assert_eq!((t.mu(1), t.mu(2), t.mu(3), t.mu(6), t.mu(12)), (1, -1, -1, 1, 0));
    let s: i32 = (1..=12).filter(|d| 12 % d == 0).map(|d| t.mu(d) as i32).sum();
    assert_eq!(s, 0);
}
