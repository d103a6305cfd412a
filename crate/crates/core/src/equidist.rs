//! Equidistribution metrics: Weyl sums, star discrepancy, class densities
//! and the joint Weyl test on the two-torus.

use rayon::prelude::*;

use crate::arith::{digit_sum, FactorSieve};
use crate::averaging::gcd;
use crate::dynsys::{polynomial_orbit_system, State};
use crate::sum::ComplexSum;
use crate::{e, frac, small_denominator, Complex64, Error, Result};

/// 𝔼_{n∈[N]} e(h·xₙ) over the given samples.
pub fn weyl_sum(seq: &[f64], h: i64) -> Result<Complex64> {
    if h == 0 {
        return Err(Error::invalid("h = 0 gives the trivial Weyl sum"));
    }
    if seq.is_empty() {
        return Err(Error::invalid("Weyl sum over an empty sequence"));
    }
    let mut acc = ComplexSum::new();
    for &x in seq {
        acc.add(e(frac(h as f64 * frac(x))));
    }
    Ok(acc.value() / seq.len() as f64)
}

/// D*_M = max_i max(i/M − u₍ᵢ₎, u₍ᵢ₎ − (i−1)/M) over the sorted samples.
pub fn star_discrepancy(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::invalid("star discrepancy of an empty sample"));
    }
    if let Some(bad) = samples.iter().find(|&&u| !(0.0..1.0).contains(&u)) {
        return Err(Error::invalid(format!("sample {bad} lies outside [0,1)")));
    }
    let mut u = samples.to_vec();
    u.sort_unstable_by(f64::total_cmp);
    let m = u.len() as f64;
    Ok(u.iter()
        .enumerate()
        .map(|(i, &x)| {
            let i = i as f64;
            ((i + 1.0) / m - x).max(x - i / m)
        })
        .fold(0.0, f64::max))
}

/// [`star_discrepancy`] of a multiset given as (value, multiplicity) pairs.
/// Equal values may appear in several pairs.
pub fn star_discrepancy_counts(samples: &[(f64, u64)]) -> Result<f64> {
    let total: u64 = samples.iter().map(|&(_, c)| c).sum();
    if total == 0 {
        return Err(Error::invalid("star discrepancy of an empty sample"));
    }
    if let Some((bad, _)) = samples.iter().find(|&&(u, _)| !(0.0..1.0).contains(&u)) {
        return Err(Error::invalid(format!("sample {bad} lies outside [0,1)")));
    }
    let mut u = samples.to_vec();
    u.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
    let m = total as f64;
    let mut below = 0u64;
    let mut worst = 0.0f64;
    let mut i = 0;
    while i < u.len() {
        let x = u[i].0;
        let mut here = 0;
        while i < u.len() && u[i].0 == x {
            here += u[i].1;
            i += 1;
        }
        worst = worst.max(x - below as f64 / m).max((below + here) as f64 / m - x);
        below += here;
    }
    Ok(worst)
}

/// Counts of a sequence over residue classes, with the derived densities.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityProfile {
    pub class_counts: Vec<u64>,
    pub total: u64,
    /// Set when the parameters fall outside the hypothesis of the
    /// corresponding density theorem.
    pub outside_hypothesis: bool,
}

impl DensityProfile {
    pub fn densities(&self) -> Vec<f64> {
        self.class_counts.iter().map(|&c| c as f64 / self.total as f64).collect()
    }

    /// max_r |density(r) − 1/m|.
    pub fn max_deviation_from_uniform(&self) -> f64 {
        let target = 1.0 / self.class_counts.len() as f64;
        self.densities().iter().map(|d| (d - target).abs()).fold(0.0, f64::max)
    }
}

fn class_profile<F>(n_max: u64, m: u64, class: F) -> Result<DensityProfile>
where
    F: Fn(u64) -> u64 + Sync,
{
    if m < 1 {
        return Err(Error::invalid("modulus m must be at least 1"));
    }
    if n_max < 1 {
        return Err(Error::invalid("N must be at least 1"));
    }
    let chunk = 1u64 << 16;
    let class_counts = (0..n_max.div_ceil(chunk))
        .into_par_iter()
        .map(|b| {
            let mut counts = vec![0u64; m as usize];
            for n in (b * chunk + 1)..=((b + 1) * chunk).min(n_max) {
                counts[(class(n) % m) as usize] += 1;
            }
            counts
        })
        .reduce(
            || vec![0u64; m as usize],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(DensityProfile { class_counts, total: n_max, outside_hypothesis: false })
}

/// Densities of {n ≤ N : seq(n) ≡ r mod m}, r = 0..m−1.
pub fn residue_density<F>(seq: F, n_max: u64, m: u64) -> Result<DensityProfile>
where
    F: Fn(u64) -> u64 + Sync,
{
    class_profile(n_max, m, seq)
}

/// Densities of s_q(seq(n)) mod m. `outside_hypothesis` is set when
/// gcd(m, q−1) > 1.
pub fn digit_class_density<F>(seq: F, n_max: u64, q: u64, m: u64) -> Result<DensityProfile>
where
    F: Fn(u64) -> u64 + Sync,
{
    if q < 2 {
        return Err(Error::invalid(format!("base q must be at least 2, got {q}")));
    }
    let mut profile = class_profile(n_max, m, |n| digit_sum(seq(n), q).unwrap_or(0))?;
    profile.outside_hypothesis = gcd(m, q - 1) > 1;
    Ok(profile)
}

/// Whether k = ⌊αm + β⌋ for some m ≥ 1 (α > 1).
///
/// The only candidate is m = ⌈(k − β)/α⌉, since consecutive values of αm + β
/// are more than 1 apart. Its neighbours are checked too, so that rounding
/// in the division cannot hide a member.
pub fn in_beatty(k: u64, alpha: f64, beta: f64) -> bool {
    let m = ((k as f64 - beta) / alpha).ceil();
    [m - 1.0, m, m + 1.0].iter().any(|&c| c >= 1.0 && (alpha * c + beta).floor() == k as f64)
}

/// Density of {n ≤ N : seq(n) ∈ {⌊αm + β⌋ : m ∈ ℕ}}.
pub fn beatty_density<F>(seq: F, n_max: u64, alpha: f64, beta: f64) -> Result<f64>
where
    F: Fn(u64) -> u64 + Sync,
{
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(Error::invalid(format!("alpha must exceed 1, got {alpha}")));
    }
    if !beta.is_finite() {
        return Err(Error::invalid("beta must be finite"));
    }
    let profile = class_profile(n_max, 2, |n| u64::from(in_beatty(seq(n), alpha, beta)))?;
    Ok(profile.class_counts[1] as f64 / n_max as f64)
}

/// Result of [`joint_torus_defect`].
#[derive(Debug, Clone, PartialEq)]
pub struct JointDefect {
    /// max |𝔼 e(h₁p(n) + h₂q(Ω(n)))| over nonzero (h₁, h₂), |hᵢ| ≤ H.
    pub max_modulus: f64,
    pub argmax: (i64, i64),
    /// All sums, indexed [h₁ + H][h₂ + H].
    pub sums: Vec<Vec<Complex64>>,
}

fn has_irrational_coefficient(coeffs: &[f64]) -> bool {
    coeffs.iter().skip(1).any(|&c| small_denominator(c, 10_000, 1e-9).is_none())
}

/// The joint Weyl sums of (p(n), q(Ω(n))) on 𝕋².
///
/// p(n) is generated by the unipotent affine orbit of p (so high powers of
/// n never appear in floating point), and the sum is grouped by Ω(n):
/// Σₙ e(h₁p(n) + h₂q(Ω(n))) = Σₖ e(h₂q(k)) Σ_{Ω(n)=k} e(h₁p(n)).
///
/// A coefficient counts as irrational when no denominator up to 10⁴ brings
/// it within 1e−9 of an integer.
pub fn joint_torus_defect(
    p_coeffs: &[f64],
    q_coeffs: &[f64],
    n_max: u64,
    sieve: &FactorSieve,
    h_max: u32,
) -> Result<JointDefect> {
    if !has_irrational_coefficient(p_coeffs) || !has_irrational_coefficient(q_coeffs) {
        return Err(Error::invalid("p and q each need an irrational non-constant coefficient"));
    }
    if n_max < 1 {
        return Err(Error::invalid("N must be at least 1"));
    }
    if n_max > sieve.limit() {
        return Err(Error::OutOfRange { n: n_max, limit: sieve.limit() });
    }
    if h_max == 0 {
        return Err(Error::invalid("H must be at least 1"));
    }
    let hm = h_max as usize;
    let kmax = (64 - n_max.leading_zeros()) as usize;
    let (sys, x0, _) = polynomial_orbit_system(p_coeffs, 1)?;
    // grouped[h][k] = Σ_{Ω(n)=k} e(h·p(n)), 0 ≤ h ≤ H
    let mut grouped = vec![vec![ComplexSum::new(); kmax + 1]; hm + 1];
    let mut x = x0;
    for n in 1..=n_max {
        x = sys.step(&x);
        let State::Torus(t) = &x else { unreachable!("affine systems live on a torus") };
        let z = e(*t.last().unwrap());
        let k = sieve.big_omega_unchecked(n) as usize;
        let mut w = Complex64::new(1.0, 0.0);
        for row in grouped.iter_mut() {
            row[k].add(w);
            w *= z;
        }
    }
    let grouped: Vec<Vec<Complex64>> = grouped.iter().map(|r| r.iter().map(ComplexSum::value).collect()).collect();
    let q_at: Vec<f64> = (0..=kmax).map(|k| frac(crate::dynsys::poly_eval(q_coeffs, k as f64))).collect();
    let h = h_max as i64;
    let mut sums = vec![vec![Complex64::new(0.0, 0.0); 2 * hm + 1]; 2 * hm + 1];
    let mut best = (0.0, (0, 0));
    for h1 in -h..=h {
        for h2 in -h..=h {
            let mut acc = ComplexSum::new();
            for (k, &qk) in q_at.iter().enumerate() {
                let g = grouped[h1.unsigned_abs() as usize][k];
                let g = if h1 < 0 { g.conj() } else { g };
                acc.add(e(frac(h2 as f64 * qk)) * g);
            }
            let v = acc.value() / n_max as f64;
            sums[(h1 + h) as usize][(h2 + h) as usize] = v;
            if (h1, h2) != (0, 0) && v.norm() > best.0 {
                best = (v.norm(), (h1, h2));
            }
        }
    }
    Ok(JointDefect { max_modulus: best.0, argmax: best.1, sums })
}
