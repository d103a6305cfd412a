//! Deterministic summation.
//!
//! Long sums are cut into fixed-size blocks. Each block is summed with
//! Neumaier compensation, blocks may be evaluated in parallel, and the block
//! partials are always reduced left to right. The result is therefore
//! bit-identical for every thread count.

use num_complex::Complex64;
use rayon::prelude::*;

/// Number of indices per block.
pub const BLOCK: u64 = 1 << 16;

/// Neumaier (improved Kahan) compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated complex accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: Neumaier,
    im: Neumaier,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

impl Extend<Complex64> for ComplexSum {
    fn extend<I: IntoIterator<Item = Complex64>>(&mut self, iter: I) {
        for z in iter {
            self.add(z);
        }
    }
}

fn blocks(lo: u64, hi: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut start = lo;
    while start <= hi {
        let end = hi.min(start.saturating_add(BLOCK - 1));
        out.push((start, end));
        if end == u64::MAX {
            break;
        }
        start = end + 1;
    }
    out
}

/// Σ_{n=lo}^{hi} f(n) with block-wise compensation (empty range → 0).
pub fn sum_range<F>(lo: u64, hi: u64, f: F) -> Complex64
where
    F: Fn(u64) -> Complex64 + Sync,
{
    if lo > hi {
        return Complex64::new(0.0, 0.0);
    }
    let partials: Vec<Complex64> = blocks(lo, hi)
        .into_par_iter()
        .map(|(a, b)| {
            let mut acc = ComplexSum::new();
            for n in a..=b {
                acc.add(f(n));
            }
            acc.value()
        })
        .collect();
    let mut total = ComplexSum::new();
    total.extend(partials);
    total.value()
}

/// Real-valued variant of [`sum_range`].
pub fn sum_range_real<F>(lo: u64, hi: u64, f: F) -> f64
where
    F: Fn(u64) -> f64 + Sync,
{
    if lo > hi {
        return 0.0;
    }
    let partials: Vec<f64> = blocks(lo, hi)
        .into_par_iter()
        .map(|(a, b)| {
            let mut acc = Neumaier::new();
            for n in a..=b {
                acc.add(f(n));
            }
            acc.value()
        })
        .collect();
    let mut total = Neumaier::new();
    for p in partials {
        total.add(p);
    }
    total.value()
}

/// 𝔼_{n∈[N]} f(n) = (1/N) Σ_{n=1}^{N} f(n).
pub fn mean<F>(n_max: u64, f: F) -> Complex64
where
    F: Fn(u64) -> Complex64 + Sync,
{
    if n_max == 0 {
        return Complex64::new(0.0, 0.0);
    }
    sum_range(1, n_max, f) / n_max as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_recovers_small_terms() {
        let mut acc = Neumaier::new();
        acc.add(1.0);
        for _ in 0..10_000 {
            acc.add(1e-16);
        }
        acc.add(-1.0);
        assert!((acc.value() - 1e-12).abs() < 1e-20);
    }

    #[test]
    fn block_sums_match_closed_form() {
        let s = sum_range_real(1, 1_000_000, |n| n as f64);
        assert_eq!(s, 500_000_500_000.0);
        let z = sum_range(1, 3 * BLOCK + 17, |_| Complex64::new(1.0, -2.0));
        assert_eq!(z, Complex64::new((3 * BLOCK + 17) as f64, -2.0 * (3 * BLOCK + 17) as f64));
    }

    #[test]
    fn thread_count_does_not_change_bits() {
        let f = |n: u64| crate::e((n as f64) * crate::SQRT2_MINUS_1) / (n as f64).sqrt();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| sum_range(1, 500_000, f));
        let b = four.install(|| sum_range(1, 500_000, f));
        assert_eq!(a.re.to_bits(), b.re.to_bits());
        assert_eq!(a.im.to_bits(), b.im.to_bits());
    }
}
