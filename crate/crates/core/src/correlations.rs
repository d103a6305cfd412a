//! Correlation tests: asymptotic independence, the Kátai pair table,
//! aperiodicity, mean values of multiplicative functions, Dirichlet
//! characters and the idempotency defect of multiplicative systems.

use std::sync::Arc;

use rayon::prelude::*;

use crate::arith::{is_prime_u64, FactorSieve, MultiplicativeFunctionSpec};
use crate::averaging::gcd;
use crate::dynsys::{invariant_mean, weighted_omega_average, AdditiveSystem, MultiplicativeSystem, Observable, State};
use crate::sum::{sum_range, ComplexSum, BLOCK};
use crate::{e, frac, Complex64, Error, Result};

type Evaluator = Arc<dyn Fn(u64) -> Complex64 + Send + Sync>;

/// A bounded sequence a: ℕ → ℂ with a label.
#[derive(Clone)]
pub struct ArithmeticSequence {
    eval: Evaluator,
    pub bound: f64,
    pub description: String,
}

impl std::fmt::Debug for ArithmeticSequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ArithmeticSequence({}, |a| <= {})", self.description, self.bound)
    }
}

impl ArithmeticSequence {
    pub fn new<F>(description: impl Into<String>, bound: f64, f: F) -> Self
    where
        F: Fn(u64) -> Complex64 + Send + Sync + 'static,
    {
        Self { eval: Arc::new(f), bound, description: description.into() }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(format!("constant {c}"), c.norm(), move |_| c)
    }

    /// n ↦ e(nα).
    pub fn linear_phase(alpha: f64) -> Self {
        Self::new(format!("e(n*{alpha})"), 1.0, move |n| e(frac(n as f64 * alpha)))
    }

    /// n ↦ λ(n); n must lie within the sieve.
    pub fn liouville(sieve: Arc<FactorSieve>) -> Self {
        Self::new("liouville", 1.0, move |n| Complex64::new(sieve.liouville_unchecked(n) as f64, 0.0))
    }

    #[inline]
    pub fn at(&self, n: u64) -> Complex64 {
        (self.eval)(n)
    }

    /// Pointwise product.
    pub fn times(&self, other: &Self) -> Self {
        let (a, b) = (self.eval.clone(), other.eval.clone());
        Self::new(
            format!("({})*({})", self.description, other.description),
            self.bound * other.bound,
            move |n| a(n) * b(n),
        )
    }

    /// 𝔼_{n∈[N]} a(n).
    pub fn mean(&self, n_max: u64) -> Complex64 {
        sum_range(1, n_max, |n| self.at(n)) / n_max as f64
    }
}

fn need_n(n_max: u64) -> Result<()> {
    if n_max == 0 {
        return Err(Error::invalid("N must be at least 1"));
    }
    Ok(())
}

/// 𝔼 a·b̄ − (𝔼 a)(𝔼 b̄) over [N].
pub fn independence_defect(a: &ArithmeticSequence, b: &ArithmeticSequence, n_max: u64) -> Result<Complex64> {
    need_n(n_max)?;
    let nf = n_max as f64;
    let cross = sum_range(1, n_max, |n| a.at(n) * b.at(n).conj()) / nf;
    Ok(cross - a.mean(n_max) * b.mean(n_max).conj())
}

/// Pair correlations 𝔼_{n∈[N]} a(pn)·conj(a(qn)) for p, q ∈ P.
#[derive(Debug, Clone, PartialEq)]
pub struct KataiTable {
    pub primes: Vec<u64>,
    /// entries[i][j] for primes[i], primes[j]; the diagonal is 𝔼|a(pn)|².
    pub entries: Vec<Vec<Complex64>>,
    /// 𝔼_{n∈[N]} a(n).
    pub mean: Complex64,
}

impl KataiTable {
    pub fn max_off_diagonal(&self) -> f64 {
        let k = self.primes.len();
        (0..k)
            .flat_map(|i| (0..k).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| self.entries[i][j].norm())
            .fold(0.0, f64::max)
    }
}

/// The table of [`KataiTable`]. Each block of n evaluates a(pn) once per
/// prime and accumulates all pairs from those values.
pub fn katai_table(a: &ArithmeticSequence, primes: &[u64], n_max: u64) -> Result<KataiTable> {
    need_n(n_max)?;
    if primes.is_empty() || primes.iter().any(|&p| !is_prime_u64(p)) {
        return Err(Error::invalid("P must be a nonempty set of primes"));
    }
    let mut ps = primes.to_vec();
    ps.sort_unstable();
    ps.dedup();
    let k = ps.len();
    let blocks: Vec<(u64, u64)> =
        (0..n_max.div_ceil(BLOCK)).map(|b| (b * BLOCK + 1, ((b + 1) * BLOCK).min(n_max))).collect();
    let partials: Vec<Vec<Complex64>> = blocks
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut acc = vec![ComplexSum::new(); k * k];
            let mut vals = vec![Complex64::new(0.0, 0.0); k];
            for n in lo..=hi {
                for (v, &p) in vals.iter_mut().zip(&ps) {
                    *v = a.at(p * n);
                }
                for i in 0..k {
                    for j in i..k {
                        acc[i * k + j].add(vals[i] * vals[j].conj());
                    }
                }
            }
            acc.iter().map(ComplexSum::value).collect()
        })
        .collect();
    let mut totals = vec![ComplexSum::new(); k * k];
    for part in partials {
        for (t, v) in totals.iter_mut().zip(part) {
            t.add(v);
        }
    }
    let nf = n_max as f64;
    let mut entries = vec![vec![Complex64::new(0.0, 0.0); k]; k];
    for i in 0..k {
        for j in i..k {
            let v = totals[i * k + j].value() / nf;
            entries[i][j] = v;
            entries[j][i] = v.conj();
        }
    }
    Ok(KataiTable { primes: ps, entries, mean: a.mean(n_max) })
}

/// 𝔼_{n∈[N]} e(n·r/m)·b_N(n), with b_N = b − 𝔼_{[N]} b.
pub fn aperiodicity_defect(b: &ArithmeticSequence, r: i64, m: u64, n_max: u64) -> Result<Complex64> {
    need_n(n_max)?;
    if m == 0 || gcd(r.unsigned_abs(), m) != 1 {
        return Err(Error::invalid(format!("alpha = {r}/{m} is not in lowest terms")));
    }
    let phase = |n: u64| {
        let k = ((n as i128 * r as i128).rem_euclid(m as i128)) as f64;
        e(k / m as f64)
    };
    // second pass over the centered values, so a constant b gives exactly 0
    let mean_b = b.mean(n_max);
    Ok(sum_range(1, n_max, |n| phase(n) * (b.at(n) - mean_b)) / n_max as f64)
}

/// Windows are rebuilt from scratch every this many slides.
const WINDOW_REFRESH: u64 = 1 << 14;

/// (1/N) Σ_{n≤N} |(1/H) Σ_{h=n}^{n+H} e(hα)·b_N(h)|, with b_N = b − 𝔼_{[N]} b.
///
/// The summand is indexed by h, the window variable. Windows slide with a
/// running sum that is recomputed exactly every 2¹⁴ steps.
pub fn local_aperiodicity_defect(b: &ArithmeticSequence, alpha: f64, h_len: u64, n_max: u64) -> Result<f64> {
    need_n(n_max)?;
    if h_len == 0 {
        return Err(Error::invalid("window length H must be at least 1"));
    }
    let mean_b = b.mean(n_max);
    let v = |h: u64| e(frac(h as f64 * alpha)) * (b.at(h) - mean_b);
    let window = |n: u64| {
        let mut acc = ComplexSum::new();
        for h in n..=n + h_len {
            acc.add(v(h));
        }
        acc.value()
    };
    let chunks: Vec<(u64, u64)> = (0..n_max.div_ceil(WINDOW_REFRESH))
        .map(|c| (c * WINDOW_REFRESH + 1, ((c + 1) * WINDOW_REFRESH).min(n_max)))
        .collect();
    let hf = h_len as f64;
    let partials: Vec<f64> = chunks
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut w = window(lo);
            let mut acc = crate::sum::Neumaier::new();
            for n in lo..=hi {
                if n > lo {
                    w += v(n + h_len) - v(n - 1);
                }
                acc.add(w.norm() / hf);
            }
            acc.value()
        })
        .collect();
    let mut total = crate::sum::Neumaier::new();
    for p in partials {
        total.add(p);
    }
    Ok(total.value() / n_max as f64)
}

/// 𝔼_{n∈[N]} b(n) for a completely multiplicative b.
pub fn mean_value(b: &MultiplicativeFunctionSpec, n_max: u64, sieve: &FactorSieve) -> Result<Complex64> {
    need_n(n_max)?;
    if n_max > sieve.limit() {
        return Err(Error::OutOfRange { n: n_max, limit: sieve.limit() });
    }
    let total = sum_range(1, n_max, |n| {
        let mut acc = Complex64::new(1.0, 0.0);
        for (p, k) in sieve.factors_unchecked(n) {
            acc *= b.value_at_prime(p).powu(k);
        }
        acc
    });
    Ok(total / n_max as f64)
}

/// |𝔼 g(R Sₙ y) − 𝔼 g(R² Sₙ y)| over n ∈ [N], where R = S_p is the
/// generator attached to the prime `generator_prime`.
pub fn idempotency_defect(
    msys: &MultiplicativeSystem,
    generator_prime: u64,
    y: &State,
    g: &Observable,
    n_max: u64,
    sieve: &FactorSieve,
) -> Result<f64> {
    need_n(n_max)?;
    if !is_prime_u64(generator_prime) {
        return Err(Error::invalid(format!("{generator_prime} is not prime, so S_p is not a generator")));
    }
    if n_max > sieve.limit() || generator_prime > sieve.limit() {
        return Err(Error::OutOfRange { n: n_max.max(generator_prime), limit: sieve.limit() });
    }
    msys.check_state(y)?;
    msys.check_observable(g)?;
    let p = generator_prime;
    let diff = sum_range(1, n_max, |n| {
        let sn = msys.apply(n, y, sieve).expect("n within sieve");
        let once = msys.apply(p, &sn, sieve).expect("p within sieve");
        let twice = msys.apply(p, &once, sieve).expect("p within sieve");
        g.eval(&once).unwrap_or_default() - g.eval(&twice).unwrap_or_default()
    });
    Ok((diff / n_max as f64).norm())
}

/// A Dirichlet character modulo a prime d, tabulated on 0..d−1.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletCharacter {
    pub modulus: u64,
    pub table: Vec<Complex64>,
}

impl DirichletCharacter {
    #[inline]
    pub fn at(&self, n: u64) -> Complex64 {
        self.table[(n % self.modulus) as usize]
    }

    pub fn is_principal(&self) -> bool {
        self.table.iter().skip(1).all(|&v| v == Complex64::new(1.0, 0.0))
    }
}

/// e(k/m) with exact values at multiples of a quarter turn.
pub fn root_of_unity(k: u64, m: u64) -> Complex64 {
    let k = k % m;
    if (4 * k) % m == 0 {
        return [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, -1.0),
        ][(4 * k / m) as usize];
    }
    e(k as f64 / m as f64)
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// Smallest primitive root modulo the prime d.
pub fn primitive_root(d: u64) -> Result<u64> {
    if !is_prime_u64(d) {
        return Err(Error::Unsupported(format!("primitive roots are only built for prime moduli, got {d}")));
    }
    if d == 2 {
        return Ok(1);
    }
    let mut factors = Vec::new();
    let mut rest = d - 1;
    let mut q = 2;
    while q * q <= rest {
        if rest % q == 0 {
            factors.push(q);
            while rest % q == 0 {
                rest /= q;
            }
        }
        q += 1;
    }
    if rest > 1 {
        factors.push(rest);
    }
    Ok((2..d).find(|&g| factors.iter().all(|&q| pow_mod(g, (d - 1) / q, d) != 1)).expect("a prime has a primitive root"))
}

/// All d − 1 characters modulo the prime d, principal first:
/// χⱼ(gᵏ) = e(jk/(d−1)) for a primitive root g.
pub fn dirichlet_characters(d: u64) -> Result<Vec<DirichletCharacter>> {
    if d > 10_000 {
        return Err(Error::invalid(format!("modulus {d} exceeds 10^4")));
    }
    let g = primitive_root(d)?;
    let order = d - 1;
    let mut index = vec![0u64; d as usize];
    let mut x = 1u64;
    for k in 0..order {
        index[x as usize] = k;
        x = x * g % d;
    }
    Ok((0..order)
        .map(|j| {
            let mut table = vec![Complex64::new(0.0, 0.0); d as usize];
            for n in 1..d {
                table[n as usize] = root_of_unity(j * index[n as usize], order);
            }
            DirichletCharacter { modulus: d, table }
        })
        .collect())
}

/// 𝔼_{n∈[N]} e(nα)·f(T^{Ω(n)}x) minus its limit (∫f dµ for integer α, else 0).
pub fn linear_phase_omega_defect(
    alpha: f64,
    sys: &AdditiveSystem,
    x: &State,
    f: &Observable,
    n_max: u64,
    sieve: &FactorSieve,
) -> Result<Complex64> {
    let integer = (alpha - alpha.round()).abs() <= 1e-12;
    let target = if integer { invariant_mean(sys, f)? } else { Complex64::new(0.0, 0.0) };
    let avg = weighted_omega_average(sys, x, f, |n| e(frac(n as f64 * alpha)), n_max, sieve)?;
    Ok(avg - target)
}

/// 𝔼_{n∈[N]} f(T^{Ω(mn+r)}x).
pub fn progression_omega_average(
    sys: &AdditiveSystem,
    x: &State,
    f: &Observable,
    m: u64,
    r: u64,
    n_max: u64,
    sieve: &FactorSieve,
) -> Result<Complex64> {
    need_n(n_max)?;
    if m == 0 || r >= m {
        return Err(Error::invalid(format!("need m >= 1 and 0 <= r < m, got m={m}, r={r}")));
    }
    let top = m.checked_mul(n_max).and_then(|v| v.checked_add(r)).unwrap_or(u64::MAX);
    if top > sieve.limit() {
        return Err(Error::OutOfRange { n: top, limit: sieve.limit() });
    }
    let table = crate::dynsys::orbit_table(sys, x, f, 64)?;
    Ok(sum_range(1, n_max, |n| table[sieve.big_omega_unchecked(m * n + r) as usize]) / n_max as f64)
}

/// P(n) = Σ cᵢ e(n·αᵢ).
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial {
    pub terms: Vec<(Complex64, f64)>,
}

impl TrigPolynomial {
    pub fn at(&self, n: u64) -> Complex64 {
        self.terms.iter().map(|&(c, a)| c * e(frac(n as f64 * a))).sum()
    }
}

/// M(P) = Σ cᵢ over the terms with αᵢ ∈ ℤ (|α − round(α)| ≤ 1e−12).
pub fn besicovitch_mean(p: &TrigPolynomial) -> Complex64 {
    p.terms.iter().filter(|&&(_, a)| (a - a.round()).abs() <= 1e-12).map(|&(c, _)| c).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{AdditiveFunctionSpec, PrimeSet};
    use crate::dynsys::omega_orbit_average;
    use crate::SQRT2_MINUS_1;

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    fn sieve(limit: u64) -> Arc<FactorSieve> {
        Arc::new(FactorSieve::new(limit).unwrap())
    }

    #[test]
    fn independence_examples() {
        let a = ArithmeticSequence::constant(c(0.5));
        let b = ArithmeticSequence::constant(Complex64::new(0.0, -0.25));
        assert_eq!(independence_defect(&a, &b, 1000).unwrap(), c(0.0));
        let rot = ArithmeticSequence::linear_phase(SQRT2_MINUS_1);
        let n = 100_000u64;
        // closed form: 1 − |𝔼 e(nα)|², 𝔼 e(nα) = e(α)(1 − e(Nα))/(N(1 − e(α)))
        let z = e(SQRT2_MINUS_1);
        let m = z * (c(1.0) - e(frac(n as f64 * SQRT2_MINUS_1))) / (c(1.0) - z) / n as f64;
        let want = 1.0 - m.norm_sqr();
        assert!((independence_defect(&rot, &rot, n).unwrap() - c(want)).norm() < 1e-9);
        let s = sieve(200_000);
        let lam = ArithmeticSequence::liouville(s);
        let ab = independence_defect(&rot, &lam, 200_000).unwrap();
        let ba = independence_defect(&lam, &rot, 200_000).unwrap();
        assert!((ab - ba.conj()).norm() < 1e-15);
        assert!(ab.norm() < 0.02);
    }

    #[test]
    fn katai_examples() {
        let rot = ArithmeticSequence::linear_phase(SQRT2_MINUS_1);
        let t = katai_table(&rot, &[2, 3, 5], 100_000).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let p = t.primes[i] as f64;
                let q = t.primes[j] as f64;
                let direct = (1..=100_000u64).map(|n| e(frac(n as f64 * (p - q) * SQRT2_MINUS_1))).sum::<Complex64>() / 1e5;
                assert!((t.entries[i][j] - direct).norm() < 1e-9);
            }
        }
        assert!(t.max_off_diagonal() < 1e-3);
        let one = katai_table(&ArithmeticSequence::constant(c(1.0)), &[2, 3], 100).unwrap();
        assert_eq!(one.entries[0][1], c(1.0));
        assert_eq!(one.mean, c(1.0));
        assert!(katai_table(&rot, &[4], 10).is_err());
    }

    #[test]
    fn katai_coherence_for_twisted_liouville() {
        let s = sieve(50_000_000);
        let a = ArithmeticSequence::liouville(s).times(&ArithmeticSequence::linear_phase(SQRT2_MINUS_1));
        let primes: Vec<u64> = (2..=50).filter(|&p| is_prime_u64(p)).collect();
        let t = katai_table(&a, &primes, 1_000_000).unwrap();
        assert!(t.max_off_diagonal() <= 0.05, "{}", t.max_off_diagonal());
        assert!(t.mean.norm() <= 0.02);
    }

    #[test]
    fn aperiodicity_examples() {
        let periodic = ArithmeticSequence::new("n mod 3 == 0", 1.0, |n| c(f64::from(u8::from(n % 3 == 0))));
        assert!(aperiodicity_defect(&periodic, 1, 3, 30_000).unwrap().norm() > 0.3);
        let k = ArithmeticSequence::constant(c(0.7));
        assert_eq!(aperiodicity_defect(&k, 1, 3, 1000).unwrap().norm(), 0.0);
        let rot = ArithmeticSequence::linear_phase(SQRT2_MINUS_1);
        assert!(aperiodicity_defect(&rot, 0, 1, 1000).unwrap().norm() < 1e-15);
        assert!(aperiodicity_defect(&rot, 2, 4, 1000).is_err());
        let lam = ArithmeticSequence::liouville(sieve(1_000_000));
        assert!(aperiodicity_defect(&lam, 1, 3, 1_000_000).unwrap().norm() <= 0.01);
    }

    #[test]
    fn local_aperiodicity_matches_direct_sum() {
        let lam = ArithmeticSequence::liouville(sieve(100_000));
        let (n_max, h_len, alpha) = (50_000u64, 37u64, 0.3);
        let fast = local_aperiodicity_defect(&lam, alpha, h_len, n_max).unwrap();
        let mean = lam.mean(n_max);
        let mut acc = 0.0;
        for n in 1..=n_max {
            let w: Complex64 = (n..=n + h_len).map(|h| e(frac(h as f64 * alpha)) * (lam.at(h) - mean)).sum();
            acc += w.norm() / h_len as f64;
        }
        assert!((fast - acc / n_max as f64).abs() < 1e-10);
        let periodic = ArithmeticSequence::new("alternating", 1.0, |n| c(if n % 2 == 0 { 1.0 } else { -1.0 }));
        assert!(local_aperiodicity_defect(&periodic, 0.5, 100, 10_000).unwrap() > 0.9);
        assert!(local_aperiodicity_defect(&lam, 0.0, 0, 10).is_err());
        let single = local_aperiodicity_defect(&lam, 0.0, 1, 1000).unwrap();
        assert!(single > 0.0 && single <= 4.0);
    }

    #[test]
    fn mean_values() {
        let s = FactorSieve::new(10_000_000).unwrap();
        let one = MultiplicativeFunctionSpec::new(vec![], c(1.0)).unwrap();
        assert_eq!(mean_value(&one, 12345, &s).unwrap(), c(1.0));
        let lam = mean_value(&MultiplicativeFunctionSpec::liouville(), 1_000_000, &s).unwrap();
        assert!(lam.norm() < 0.01);
        let chi = MultiplicativeFunctionSpec::new(vec![(PrimeSet::residue(3, 4).unwrap(), c(-1.0))], c(1.0)).unwrap();
        let v: Vec<f64> = [100_000, 1_000_000, 10_000_000].iter().map(|&n| mean_value(&chi, n, &s).unwrap().re).collect();
        assert!((v[0] - v[1]).abs() <= 0.02 && (v[1] - v[2]).abs() <= 0.02 && (v[0] - v[2]).abs() <= 0.02, "{v:?}");
    }

    #[test]
    fn idempotency_examples() {
        let s = FactorSieve::new(1_000_000).unwrap();
        let nu2 = MultiplicativeSystem::NuTwoRotation { alpha: SQRT2_MINUS_1 };
        let g = Observable::CharacterOnTorus(vec![1]);
        let y = State::Torus(vec![0.0]);
        assert_eq!(idempotency_defect(&nu2, 3, &y, &g, 10_000, &s).unwrap(), 0.0);
        let two = idempotency_defect(&nu2, 2, &y, &g, 100_000, &s).unwrap();
        assert!(two > 0.1, "{two}");
        let derived = MultiplicativeSystem::DerivedAdditive {
            base: AdditiveSystem::cyclic(2).unwrap(),
            a: AdditiveFunctionSpec::big_omega(),
        };
        let d = idempotency_defect(&derived, 2, &State::Cyclic(0), &Observable::alternating(), 1_000_000, &s).unwrap();
        assert!(d <= 0.02, "{d}");
        assert!(idempotency_defect(&nu2, 4, &y, &g, 10, &s).is_err());
    }

    #[test]
    fn character_examples() {
        let chars = dirichlet_characters(3).unwrap();
        assert_eq!(chars.len(), 2);
        assert!(chars[0].is_principal());
        assert_eq!(chars[1].table, vec![c(0.0), c(1.0), c(-1.0)]);
        assert!(matches!(dirichlet_characters(15), Err(Error::Unsupported(_))));
        for d in (2..=101u64).filter(|&d| is_prime_u64(d)) {
            let chars = dirichlet_characters(d).unwrap();
            assert_eq!(chars.len() as u64, d - 1);
            for chi in &chars {
                assert_eq!(chi.at(0), c(0.0));
                assert_eq!(chi.at(d * 7), c(0.0));
                for a in 1..=d * d {
                    for b in [1, 2, d - 1, d + 1, 3 * d + 2] {
                        assert!((chi.at(a * b) - chi.at(a) * chi.at(b)).norm() < 1e-12, "d={d}");
                    }
                }
                for n in 1..d {
                    assert!((chi.at(n).powu(d as u32 - 1) - c(1.0)).norm() < 1e-9);
                }
            }
        }
        let principal = &dirichlet_characters(7).unwrap()[0];
        let m = (1..=70_000u64).map(|n| principal.at(n)).sum::<Complex64>() / 70_000.0;
        assert!((m.re - 6.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn linear_phase_examples() {
        let s = FactorSieve::new(1_000_000).unwrap();
        let sys = AdditiveSystem::cyclic(2).unwrap();
        let f = Observable::alternating();
        let x = State::Cyclic(0);
        let integer = linear_phase_omega_defect(3.0, &sys, &x, &f, 1_000_000, &s).unwrap();
        let plain = omega_orbit_average(&sys, &x, &f, 1_000_000, &s).unwrap();
        assert!((integer - plain).norm() < 1e-12);
        assert!(linear_phase_omega_defect(1.0 / 3.0, &sys, &x, &f, 1_000_000, &s).unwrap().norm() <= 0.02);
        assert!(linear_phase_omega_defect(SQRT2_MINUS_1, &sys, &x, &f, 1_000_000, &s).unwrap().norm() <= 0.02);
    }

    #[test]
    fn progression_examples() {
        let s = FactorSieve::new(2_000_001).unwrap();
        let sys = AdditiveSystem::cyclic(2).unwrap();
        let f = Observable::alternating();
        let x = State::Cyclic(0);
        let a = progression_omega_average(&sys, &x, &f, 1, 0, 1_000_000, &s).unwrap();
        assert!((a - omega_orbit_average(&sys, &x, &f, 1_000_000, &s).unwrap()).norm() < 1e-12);
        // Ω(2n) = 1 + Ω(n): same as starting one step later
        let even = progression_omega_average(&sys, &x, &f, 2, 0, 1_000_000, &s).unwrap();
        let shifted = omega_orbit_average(&sys, &State::Cyclic(1), &f, 1_000_000, &s).unwrap();
        assert!((even - shifted).norm() < 1e-12);
        assert!(progression_omega_average(&sys, &x, &f, 4, 1, 500_000, &s).unwrap().norm() < 0.03);
        assert!(progression_omega_average(&sys, &x, &f, 4, 4, 10, &s).is_err());
        assert!(progression_omega_average(&sys, &x, &f, 4, 1, 1_000_000, &s).is_err());
    }

    #[test]
    fn besicovitch_examples() {
        let k = TrigPolynomial { terms: vec![(Complex64::new(0.3, 0.4), 0.0)] };
        assert_eq!(besicovitch_mean(&k), Complex64::new(0.3, 0.4));
        let rot = TrigPolynomial { terms: vec![(c(1.0), SQRT2_MINUS_1)] };
        assert_eq!(besicovitch_mean(&rot), c(0.0));
        let p = TrigPolynomial { terms: vec![(c(1.0), 0.0), (c(0.5), 0.5)] };
        assert_eq!(besicovitch_mean(&p), c(1.0));
        let direct = (1..=10_000u64).map(|n| p.at(n)).sum::<Complex64>() / 10_000.0;
        assert!((direct - c(1.0)).norm() < 1e-12);
    }
}
