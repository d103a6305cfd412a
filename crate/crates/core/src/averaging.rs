//! Cesàro and logarithmic averages, the coprimality pairing
//! Φ(m, n) = gcd(m, n) − 1 and the discrepancies built from it.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, Ordering};

use num_complex::Complex64;

use crate::sum::{self, ComplexSum, Neumaier};
use crate::{Error, Result};

/// How elements of a [`WeightedSet`] are weighted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weighting {
    /// Every element has weight 1 (Cesàro).
    Uniform,
    /// Element n has weight 1/n (logarithmic).
    Reciprocal,
}

/// A finite nonempty set of distinct positive integers with a weighting.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSet {
    elements: Vec<u64>,
    weighting: Weighting,
}

impl WeightedSet {
    pub fn new(mut elements: Vec<u64>, weighting: Weighting) -> Result<Self> {
        validate_set(&elements)?;
        elements.sort_unstable();
        Ok(Self { elements, weighting })
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn weighting(&self) -> Weighting {
        self.weighting
    }

    fn weight(&self, n: u64) -> f64 {
        match self.weighting {
            Weighting::Uniform => 1.0,
            Weighting::Reciprocal => 1.0 / n as f64,
        }
    }

    /// Weighted average of `a` over the set.
    pub fn average<F: Fn(u64) -> Complex64>(&self, a: F) -> Complex64 {
        let mut num = ComplexSum::new();
        let mut den = Neumaier::new();
        for &n in &self.elements {
            let w = self.weight(n);
            num.add(a(n) * w);
            den.add(w);
        }
        num.value() / den.value()
    }
}

fn validate_set(b: &[u64]) -> Result<()> {
    if b.is_empty() {
        return Err(Error::invalid("set must be nonempty"));
    }
    if b.contains(&0) {
        return Err(Error::invalid("set elements must be positive"));
    }
    let mut sorted = b.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::invalid("set elements must be distinct"));
    }
    Ok(())
}

/// (1/N) Σ a(n) over a materialized sequence.
pub fn cesaro_average(values: &[Complex64]) -> Result<Complex64> {
    if values.is_empty() {
        return Err(Error::invalid("Cesàro average of an empty sequence"));
    }
    let mut acc = ComplexSum::new();
    acc.extend(values.iter().copied());
    Ok(acc.value() / values.len() as f64)
}

/// (Σ_{n∈B} a(n)/n) / (Σ_{n∈B} 1/n).
pub fn log_average<F: Fn(u64) -> Complex64>(b: &[u64], a: F) -> Result<Complex64> {
    Ok(WeightedSet::new(b.to_vec(), Weighting::Reciprocal)?.average(a))
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Φ(m, n) = gcd(m, n) − 1.
pub fn phi_pairing(m: u64, n: u64) -> u64 {
    gcd(m, n).saturating_sub(1)
}

/// Divisors of n with their Euler totients, from trial-division factoring.
fn divisors_with_totient(n: u64) -> Vec<(u64, u64)> {
    let mut out = vec![(1u64, 1u64)];
    let mut rest = n;
    let mut p = 2u64;
    while p * p <= rest {
        if rest % p == 0 {
            let mut e = 0;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            out = extend_divisors(out, p, e);
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        out = extend_divisors(out, rest, 1);
    }
    out
}

fn extend_divisors(base: Vec<(u64, u64)>, p: u64, e: u32) -> Vec<(u64, u64)> {
    let mut out = Vec::with_capacity(base.len() * (e as usize + 1));
    for &(d, phi) in &base {
        out.push((d, phi));
        let mut pk = 1u64;
        for k in 1..=e {
            pk *= p;
            let phi_pk = if k == 1 { p - 1 } else { pk - pk / p };
            out.push((d * pk, phi * phi_pk));
        }
    }
    out
}

/// 𝔼^log_{m∈B} 𝔼^log_{n∈B} Φ(m, n).
///
/// Uses gcd(m, n) = Σ_{d | gcd(m,n)} φ(d), which turns the double sum into
/// Σ_{d>1} φ(d)·(Σ_{m∈B, d|m} 1/m)² / (Σ_{m∈B} 1/m)² and avoids the
/// quadratic pair loop.
pub fn coprimality_measure(b: &[u64]) -> Result<f64> {
    validate_set(b)?;
    let mut sorted = b.to_vec();
    sorted.sort_unstable();
    let mut total = Neumaier::new();
    let mut by_divisor: BTreeMap<u64, (u64, Neumaier)> = BTreeMap::new();
    for &m in &sorted {
        let w = 1.0 / m as f64;
        total.add(w);
        for (d, phi) in divisors_with_totient(m) {
            if d > 1 {
                by_divisor.entry(d).or_insert((phi, Neumaier::new())).1.add(w);
            }
        }
    }
    let mut num = Neumaier::new();
    for (phi, w) in by_divisor.values() {
        let w = w.value();
        num.add(*phi as f64 * w * w);
    }
    let s = total.value();
    Ok(num.value() / (s * s))
}

/// Histogram of d_B(n) = #{m ∈ B : m | n} over n ∈ [N].
fn divisor_count_histogram(b: &[u64], n_max: u64) -> Vec<u64> {
    let mut hist = vec![0u64; b.len() + 1];
    let block = sum::BLOCK;
    let mut counts = vec![0u16; block as usize];
    let mut lo = 1u64;
    while lo <= n_max {
        let hi = n_max.min(lo + block - 1);
        counts[..(hi - lo + 1) as usize].iter_mut().for_each(|c| *c = 0);
        for &m in b {
            let mut k = lo.div_ceil(m) * m;
            while k <= hi {
                counts[(k - lo) as usize] += 1;
                k += m;
            }
        }
        for &c in &counts[..(hi - lo + 1) as usize] {
            hist[c as usize] += 1;
        }
        lo = hi + 1;
    }
    hist
}

fn tk_setup(b: &[u64], n_max: u64) -> Result<(Vec<u64>, f64)> {
    validate_set(b)?;
    let max = *b.iter().max().unwrap();
    if n_max < max {
        return Err(Error::invalid(format!("N = {n_max} is below max(B) = {max}")));
    }
    if b.len() > u16::MAX as usize {
        return Err(Error::invalid("set too large for divisor counting"));
    }
    let mut s = Neumaier::new();
    let mut sorted = b.to_vec();
    sorted.sort_unstable();
    for &m in &sorted {
        s.add(1.0 / m as f64);
    }
    Ok((divisor_count_histogram(&sorted, n_max), s.value()))
}

/// 𝔼_{n∈[N]} |𝔼^log_{m∈B} (1 − m·1_{m|n})|².
///
/// The inner average equals 1 − d_B(n)/S with S = Σ_{m∈B} 1/m, so only the
/// histogram of d_B over [N] is needed.
pub fn tk_l2_discrepancy(b: &[u64], n_max: u64) -> Result<f64> {
    let (hist, s) = tk_setup(b, n_max)?;
    let mut acc = Neumaier::new();
    for (c, &count) in hist.iter().enumerate() {
        let v = 1.0 - c as f64 / s;
        acc.add(count as f64 * v * v);
    }
    Ok(acc.value() / n_max as f64)
}

/// 𝔼_{n∈[N]} |𝔼^log_{m∈B} (1 − m·1_{m|n})|.
pub fn tk_l1_discrepancy(b: &[u64], n_max: u64) -> Result<f64> {
    let (hist, s) = tk_setup(b, n_max)?;
    let mut acc = Neumaier::new();
    for (c, &count) in hist.iter().enumerate() {
        acc.add(count as f64 * (1.0 - c as f64 / s).abs());
    }
    Ok(acc.value() / n_max as f64)
}

/// Modulus tolerance for sequences that must be bounded by 1.
pub const BOUND_TOL: f64 = 1.0 + 1e-9;

/// |𝔼_{n∈[N]} a(n) − 𝔼^log_{m∈B} 𝔼_{n∈[N/m]} a(mn)|.
pub fn dilation_defect<F>(a: F, b: &[u64], n_max: u64) -> Result<f64>
where
    F: Fn(u64) -> Complex64 + Sync,
{
    validate_set(b)?;
    let max = *b.iter().max().unwrap();
    if n_max < max {
        return Err(Error::invalid(format!("N = {n_max} is below max(B) = {max}")));
    }
    let unbounded = AtomicBool::new(false);
    let checked = |n: u64| {
        let v = a(n);
        if v.norm() > BOUND_TOL {
            unbounded.store(true, Ordering::Relaxed);
        }
        v
    };
    let full = sum::mean(n_max, checked);
    let dilated = log_average(b, |m| sum::mean(n_max / m, |n| checked(m * n)))?;
    if unbounded.load(Ordering::Relaxed) {
        return Err(Error::invalid("sequence is not bounded by 1 in modulus"));
    }
    Ok((full - dilated).norm())
}

/// Riemann ζ(k) for integer k ≥ 2, absolute error below 1e−12.
///
/// Direct sum to M − 1 plus the Euler–Maclaurin tail
/// M^{1−k}/(k−1) + M^{−k}/2 + k·M^{−k−1}/12 − k(k+1)(k+2)·M^{−k−3}/720;
/// with M = 1000 the next correction is below 1e−18.
pub fn zeta(k: u32) -> Result<f64> {
    if k < 2 {
        return Err(Error::invalid(format!("zeta needs k >= 2, got {k}")));
    }
    const M: u32 = 1000;
    let kf = k as f64;
    let m = M as f64;
    let mut acc = Neumaier::new();
    let tail = m.powf(1.0 - kf) / (kf - 1.0) + 0.5 * m.powf(-kf) + kf * m.powf(-kf - 1.0) / 12.0
        - kf * (kf + 1.0) * (kf + 2.0) * m.powf(-kf - 3.0) / 720.0;
    acc.add(tail);
    for n in (2..M).rev() {
        acc.add((n as f64).powi(-(k as i32)));
    }
    acc.add(1.0);
    Ok(acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    /// Pairwise double log-average of Φ in exact rational arithmetic.
    fn measure_rational(b: &[u64]) -> (u128, u128) {
        // Σ (gcd−1)/(mn) over pairs, as num/den with den = (Π m)²
        let prod: u128 = b.iter().map(|&m| m as u128).product();
        let mut num: u128 = 0;
        for &m in b {
            for &n in b {
                num += (gcd(m, n) - 1) as u128 * (prod / m as u128) * (prod / n as u128);
            }
        }
        let s: u128 = b.iter().map(|&m| prod / m as u128).sum();
        (num, s * s)
    }

    /// Pairwise f64 oracle.
    fn measure_pairwise(b: &[u64]) -> f64 {
        let s: f64 = b.iter().map(|&m| 1.0 / m as f64).sum();
        let mut num = 0.0;
        for &m in b {
            for &n in b {
                num += phi_pairing(m, n) as f64 / (m as f64 * n as f64);
            }
        }
        num / (s * s)
    }

    #[test]
    fn cesaro_examples() {
        assert_eq!(cesaro_average(&[c(3.5); 7]).unwrap(), c(3.5));
        let v: Vec<_> = (1..=4).map(|n| c(n as f64)).collect();
        assert_eq!(cesaro_average(&v).unwrap(), c(2.5));
        assert_eq!(cesaro_average(&[c(-1.0), c(1.0)]).unwrap(), c(0.0));
        assert!(cesaro_average(&[]).is_err());
    }

    #[test]
    fn log_average_examples() {
        assert_eq!(log_average(&[1], |_| c(7.0)).unwrap(), c(7.0));
        assert!((log_average(&[3, 17, 100], |_| c(1.0)).unwrap() - c(1.0)).norm() < 1e-15);
        let v = log_average(&[2, 4], |n| if n == 4 { c(1.0) } else { c(0.0) }).unwrap();
        assert!((v.re - 1.0 / 3.0).abs() < 1e-15);
        assert!(log_average(&[], |_| c(1.0)).is_err());
        assert!(log_average(&[2, 2], |_| c(1.0)).is_err());
        let a = |n: u64| c((n as f64).sin());
        let x = log_average(&[5, 3, 11, 2], a).unwrap();
        let y = log_average(&[11, 2, 5, 3], a).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi_pairing(2, 3), 0);
        assert_eq!(phi_pairing(6, 4), 1);
        assert_eq!(phi_pairing(37, 37), 36);
    }

    #[test]
    fn measure_two_three_is_17_over_25() {
        assert_eq!(measure_rational(&[2, 3]), (17, 25));
        assert!((coprimality_measure(&[2, 3]).unwrap() - 0.68).abs() < 1e-15);
    }

    #[test]
    fn measure_pairwise_coprime_keeps_diagonal_only() {
        let b = [4u64, 9, 25, 7, 11];
        let s: f64 = b.iter().map(|&m| 1.0 / m as f64).sum();
        let diag: f64 = b.iter().map(|&m| (m as f64 - 1.0) / (m * m) as f64).sum();
        assert!((coprimality_measure(&b).unwrap() - diag / (s * s)).abs() < 1e-14);
    }

    #[test]
    fn measure_matches_pairwise_oracle() {
        let sets: [&[u64]; 4] = [&[6, 10, 15, 21, 35], &[12, 18, 30, 45, 1], &[1], &[64, 32, 48, 81, 100, 7]];
        for b in sets {
            let fast = coprimality_measure(b).unwrap();
            let slow = measure_pairwise(b);
            assert!((fast - slow).abs() < 1e-13, "{b:?}: {fast} vs {slow}");
        }
        let (num, den) = measure_rational(&[6, 10, 15]);
        assert!((coprimality_measure(&[6, 10, 15]).unwrap() - num as f64 / den as f64).abs() < 1e-14);
    }

    #[test]
    fn measure_of_primes_obeys_reciprocal_bound() {
        let primes: Vec<u64> = (2..2000u64).filter(|&n| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)).collect();
        let s: f64 = primes.iter().map(|&p| 1.0 / p as f64).sum();
        assert!(coprimality_measure(&primes).unwrap() <= 1.0 / s);
        assert!(coprimality_measure(&[]).is_err());
    }

    /// Direct evaluation through log_average at every n.
    fn tk_oracle(b: &[u64], n_max: u64) -> (f64, f64) {
        let mut l1 = 0.0;
        let mut l2 = 0.0;
        for n in 1..=n_max {
            let v = log_average(b, |m| c(1.0 - if n % m == 0 { m as f64 } else { 0.0 })).unwrap();
            l1 += v.norm();
            l2 += v.norm_sqr();
        }
        (l1 / n_max as f64, l2 / n_max as f64)
    }

    #[test]
    fn tk_matches_direct_oracle() {
        for b in [&[2u64, 3, 5][..], &[4, 6, 9, 10], &[1], &[7]] {
            let (l1, l2) = tk_oracle(b, 20_000);
            assert!((tk_l1_discrepancy(b, 20_000).unwrap() - l1).abs() < 1e-12);
            assert!((tk_l2_discrepancy(b, 20_000).unwrap() - l2).abs() < 1e-12);
        }
        assert_eq!(tk_l2_discrepancy(&[1], 12345).unwrap(), 0.0);
        assert_eq!(tk_l1_discrepancy(&[1], 12345).unwrap(), 0.0);
        assert!(tk_l2_discrepancy(&[2, 50], 49).is_err());
    }

    #[test]
    fn tk_converges_to_measure() {
        let l2 = tk_l2_discrepancy(&[2], 1_000_000).unwrap();
        assert!((l2 - 1.0).abs() < 0.01);
        let b = [2, 3, 5];
        let l2 = tk_l2_discrepancy(&b, 1_000_000).unwrap();
        assert!((l2 - coprimality_measure(&b).unwrap()).abs() < 0.01);
        let l1 = tk_l1_discrepancy(&b, 1_000_000).unwrap();
        assert!(l1 <= l2.sqrt());
    }

    #[test]
    fn dilation_defect_examples() {
        let b = [2u64, 3, 5];
        let d = dilation_defect(|_| c(1.0), &b, 10_000).unwrap();
        assert!(d <= 5.0 / 10_000.0);
        let alpha = std::f64::consts::SQRT_2;
        let d = dilation_defect(|n| crate::e(n as f64 * alpha), &[2], 1_000_000).unwrap();
        assert!(d <= 0.01);
        assert!(dilation_defect(|_| c(1.5), &b, 100).is_err());
        assert!(dilation_defect(|_| c(1.0), &b, 4).is_err());
    }

    #[test]
    fn zeta_values() {
        let pi = std::f64::consts::PI;
        assert!((zeta(2).unwrap() - pi * pi / 6.0).abs() < 1e-12);
        assert!((zeta(3).unwrap() - 1.202_056_903_159_594_3).abs() < 1e-12);
        assert!((zeta(4).unwrap() - pi.powi(4) / 90.0).abs() < 1e-12);
        let mut prev = zeta(2).unwrap();
        for k in 3..40 {
            let z = zeta(k).unwrap();
            assert!(z < prev && z > 1.0);
            prev = z;
        }
        assert!(zeta(1).is_err());
    }
}
