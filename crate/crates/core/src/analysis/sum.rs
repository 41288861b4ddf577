//! Compensated summation with a fixed reduction order.

use num_complex::Complex;
use rayon::prelude::*;

use crate::scalar::AnalysisFloat;

/// Neumaier's variant of Kahan summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum<F> {
    sum: F,
    compensation: F,
}

impl<F: AnalysisFloat> CompensatedSum<F> {
    pub fn new() -> Self {
        CompensatedSum { sum: F::zero(), compensation: F::zero() }
    }

    pub fn add(&mut self, x: F) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation = self.compensation + ((self.sum - t) + x);
        } else {
            self.compensation = self.compensation + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn value(&self) -> F {
        self.sum + self.compensation
    }

    /// Folds another partial sum in, keeping both compensation terms.
    pub fn merge(&mut self, other: &CompensatedSum<F>) {
        self.add(other.sum);
        self.add(other.compensation);
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ComplexSum<F> {
    re: CompensatedSum<F>,
    im: CompensatedSum<F>,
}

impl<F: AnalysisFloat> ComplexSum<F> {
    pub fn new() -> Self {
        ComplexSum { re: CompensatedSum::new(), im: CompensatedSum::new() }
    }

    pub fn add(&mut self, z: Complex<F>) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn merge(&mut self, other: &ComplexSum<F>) {
        self.re.merge(&other.re);
        self.im.merge(&other.im);
    }

    pub fn value(&self) -> Complex<F> {
        Complex::new(self.re.value(), self.im.value())
    }
}

/// Block length of the fixed summation grid.
pub const SUM_BLOCK: usize = 4096;

/// Sums `f(0..n)` and reports the running total after each checkpoint
/// (checkpoints are counts of terms, sorted, each in `1..=n`).
///
/// Terms are grouped into blocks on a fixed grid refined by the checkpoints;
/// blocks are summed in parallel and merged left to right, so the result
/// does not depend on the number of worker threads.
pub fn checkpoint_sums<F, G>(n: usize, checkpoints: &[usize], f: G) -> Vec<Complex<F>>
where
    F: AnalysisFloat,
    G: Fn(usize) -> Complex<F> + Sync,
{
    let mut cuts: Vec<usize> = (SUM_BLOCK..n).step_by(SUM_BLOCK).collect();
    cuts.extend(checkpoints.iter().copied().filter(|&c| c > 0 && c < n));
    cuts.push(n);
    cuts.sort_unstable();
    cuts.dedup();
    let mut bounds = Vec::with_capacity(cuts.len());
    let mut start = 0;
    for c in cuts {
        bounds.push((start, c));
        start = c;
    }
    let partials: Vec<ComplexSum<F>> = bounds
        .par_iter()
        .map(|&(a, b)| {
            let mut s = ComplexSum::new();
            for i in a..b {
                s.add(f(i));
            }
            s
        })
        .collect();
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut total = ComplexSum::new();
    let mut next = checkpoints.iter().peekable();
    for (&(_, end), part) in bounds.iter().zip(&partials) {
        total.merge(part);
        while let Some(&&c) = next.peek() {
            if c == end {
                out.push(total.value());
                next.next();
            } else {
                break;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_beats_naive() {
        let mut s = CompensatedSum::<f64>::new();
        let mut naive = 0.0f64;
        s.add(1.0);
        naive += 1.0;
        for _ in 0..10_000 {
            s.add(1e-16);
            naive += 1e-16;
        }
        assert_eq!(naive, 1.0);
        assert!((s.value() - (1.0 + 1e-12)).abs() < 1e-25);
    }

    #[test]
    fn checkpoints_match_prefix_sums() {
        let f = |i: usize| Complex::new(i as f64, 1.0);
        let out = checkpoint_sums(10_000, &[1, 5000, 9999, 10_000], f);
        assert_eq!(out[0], Complex::new(0.0, 1.0));
        assert_eq!(out[1], Complex::new((4999.0 * 5000.0) / 2.0, 5000.0));
        assert_eq!(out[3], Complex::new((9999.0 * 10_000.0) / 2.0, 10_000.0));
    }

    #[test]
    fn worker_count_does_not_matter() {
        let f = |i: usize| Complex::new(((i as f64) * 0.7548776662466927).fract() - 0.5, (i as f64).sqrt().fract());
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| checkpoint_sums(100_000, &[25_000, 100_000], f))
        };
        let a = run(1);
        let b = run(5);
        assert_eq!(a, b);
    }
}
