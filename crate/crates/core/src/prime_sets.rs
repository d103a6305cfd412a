//! Almost primes and matched prime / 2-almost-prime blocks.
//!
//! A [`MatchedBlocks`] value pairs a set of primes `b1` with a set of
//! 2-almost primes `b2` such that both sets put the same number of elements
//! into every ρ-adic interval [ρʲ, ρʲ⁺¹) (optionally with an index shift),
//! and records the coprimality measure of each set.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_complex::Complex64;

use crate::arith::FactorSieve;
use crate::averaging::{coprimality_measure, log_average, BOUND_TOL};
use crate::sum::Neumaier;
use crate::{Error, Result};

/// Primes in [2, limit] by a plain sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Result<Vec<u64>> {
    if limit < 2 {
        return Err(Error::invalid(format!("limit must be at least 2, got {limit}")));
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i.saturating_mul(i);
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    Ok(out)
}

/// ℙ_k ∩ [1, limit] = {n ≤ limit : Ω(n) = k}, ascending.
pub fn k_almost_primes_up_to(sieve: &FactorSieve, k: u32, limit: u64) -> Result<Vec<u64>> {
    if k < 1 {
        return Err(Error::invalid("k must be at least 1"));
    }
    if limit > sieve.limit() {
        return Err(Error::OutOfRange { n: limit, limit: sieve.limit() });
    }
    Ok((2..=limit).filter(|&n| sieve.big_omega_unchecked(n) == k).collect())
}

/// Parameters ε and ρ of the ρ-adic partition [ρʲ, ρʲ⁺¹), j ≥ 0.
///
/// ρ is also held as a rational num/den (a continued-fraction convergent
/// when one matches the float to within a few ulps, the exact binary value
/// otherwise). Bucket indices are computed with logarithms, and any value
/// whose logarithm lands within 1e−9 of a boundary is re-classified by exact
/// integer comparison against that rational.
#[derive(Debug, Clone, PartialEq)]
pub struct RhoPartition {
    rho: f64,
    epsilon: f64,
    num: u64,
    den: u64,
    ln_rho: f64,
}

fn rational_approximation(x: f64) -> (u64, u64) {
    // continued-fraction convergents with denominators up to 10^6
    let (mut h0, mut h1) = (0u64, 1u64);
    let (mut k0, mut k1) = (1u64, 0u64);
    let mut r = x;
    for _ in 0..40 {
        let a = r.floor();
        if a > 1e12 {
            break;
        }
        let a = a as u64;
        let h2 = a * h1 + h0;
        let k2 = a * k1 + k0;
        if k2 > 1_000_000 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if ((h1 as f64 / k1 as f64) - x).abs() <= 4.0 * f64::EPSILON * x {
            return (h1, k1);
        }
        let f = r - r.floor();
        if f == 0.0 {
            break;
        }
        r = 1.0 / f;
    }
    // exact binary value of x in (1, 2]: mantissa / 2^52
    let den = 1u64 << 52;
    ((x * den as f64) as u64, den)
}

impl RhoPartition {
    pub fn new(epsilon: f64, rho: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::invalid(format!("epsilon must lie in (0,1), got {epsilon}")));
        }
        if !(rho > 1.0 && rho <= 1.0 + epsilon) {
            return Err(Error::invalid(format!("rho must lie in (1, 1+epsilon], got {rho}")));
        }
        let (num, den) = rational_approximation(rho);
        Ok(Self { rho, epsilon, num, den, ln_rho: rho.ln() })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// The rational value num/den used for exact boundary decisions.
    pub fn rational(&self) -> (u64, u64) {
        (self.num, self.den)
    }

    /// ρ^(j/scale) ≤ x, decided exactly: num^j ≤ x^scale · den^j.
    fn power_at_most(&self, j: u64, x: u64, scale: u32) -> bool {
        let lhs = BigUint::from(self.num).pow(j as u32);
        let rhs = BigUint::from(x).pow(scale) * BigUint::from(self.den).pow(j as u32);
        lhs <= rhs
    }

    /// ⌊scale · log_ρ x⌋ for x ≥ 1.
    fn level(&self, x: u64, scale: u32) -> u64 {
        let t = scale as f64 * (x as f64).ln() / self.ln_rho;
        let r = t.round();
        if (t - r).abs() < 1e-9 * t.max(1.0) {
            let r = r as u64;
            if self.power_at_most(r, x, scale) || r == 0 {
                r
            } else {
                r - 1
            }
        } else {
            t.floor() as u64
        }
    }

    /// The j with ρʲ ≤ n < ρʲ⁺¹.
    pub fn bucket(&self, n: u64) -> u64 {
        self.level(n.max(1), 1)
    }

    /// True iff n lies in the lower half [ρʲ, ρ^{j+1/2}) of its bucket.
    pub fn in_lower_half(&self, n: u64) -> bool {
        self.level(n.max(1), 2) % 2 == 0
    }
}

/// Bucket index of n for the partition (free-function form).
pub fn rho_bucket(n: u64, partition: &RhoPartition) -> u64 {
    partition.bucket(n)
}

/// Per-bucket element counts: `b1` counts b1 ∩ [ρʲ, ρʲ⁺¹) and `b2` counts
/// b2 ∩ [ρ^{j+shift}, ρ^{j+shift+1}).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BucketCount {
    pub bucket: i64,
    pub b1: usize,
    pub b2: usize,
}

/// Indices of the construction that produced a block pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstructionTrace {
    /// First half-bucket used for P₁.
    pub j0: u64,
    /// P₁ is drawn from half-buckets j0 ≤ l < s.
    pub s: u64,
    /// P₂ is drawn from the half-buckets at s·j, 1 ≤ j ≤ t.
    pub t: u64,
    pub p1_reciprocal_sum: f64,
    pub p2_reciprocal_sum: f64,
}

/// A pair (b1, b2) of matched blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchedBlocks {
    pub partition: RhoPartition,
    pub b1: Vec<u64>,
    pub b2: Vec<u64>,
    pub shift: i32,
    pub bucket_counts: Vec<BucketCount>,
    /// (coprimality_measure(b1), coprimality_measure(b2))
    pub measures: (f64, f64),
    pub trace: Option<ConstructionTrace>,
}

fn bucket_counts(partition: &RhoPartition, b1: &[u64], b2: &[u64], shift: i32) -> Vec<BucketCount> {
    let mut map: BTreeMap<i64, (usize, usize)> = BTreeMap::new();
    for &p in b1 {
        map.entry(partition.bucket(p) as i64).or_default().0 += 1;
    }
    for &q in b2 {
        map.entry(partition.bucket(q) as i64 - shift as i64).or_default().1 += 1;
    }
    map.into_iter().map(|(bucket, (b1, b2))| BucketCount { bucket, b1, b2 }).collect()
}

impl MatchedBlocks {
    /// Assembles a block pair from explicit sets, computing bucket counts and
    /// measures. No property is enforced; see [`verify_matched_blocks`].
    pub fn from_sets(partition: RhoPartition, mut b1: Vec<u64>, mut b2: Vec<u64>, shift: i32) -> Result<Self> {
        if !(-1..=1).contains(&shift) {
            return Err(Error::invalid(format!("shift must be -1, 0 or 1, got {shift}")));
        }
        b1.sort_unstable();
        b2.sort_unstable();
        let measures = (coprimality_measure(&b1)?, coprimality_measure(&b2)?);
        let bucket_counts = bucket_counts(&partition, &b1, &b2, shift);
        Ok(Self { partition, b1, b2, shift, bucket_counts, measures, trace: None })
    }

    /// Plain-text form: a header line `rho epsilon shift`, then one line
    /// `set index value` per element (set is 1 or 2, index counts from 0).
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.partition.rho, self.partition.epsilon, self.shift);
        for (set, elems) in [(1, &self.b1), (2, &self.b2)] {
            for (i, v) in elems.iter().enumerate() {
                writeln!(out, "{set} {i} {v}").unwrap();
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |line: usize, msg: &str| Error::Parse { pos: line, msg: msg.to_string() };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| bad(1, "missing header"))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 3 {
            return Err(bad(1, "header must be `rho epsilon shift`"));
        }
        let rho: f64 = h[0].parse().map_err(|_| bad(1, "bad rho"))?;
        let epsilon: f64 = h[1].parse().map_err(|_| bad(1, "bad epsilon"))?;
        let shift: i32 = h[2].parse().map_err(|_| bad(1, "bad shift"))?;
        let mut b1 = Vec::new();
        let mut b2 = Vec::new();
        for (i, line) in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 3 {
                return Err(bad(i + 1, "element line must be `set index value`"));
            }
            let v: u64 = f[2].parse().map_err(|_| bad(i + 1, "bad value"))?;
            match f[0] {
                "1" => b1.push(v),
                "2" => b2.push(v),
                _ => return Err(bad(i + 1, "set must be 1 or 2")),
            }
        }
        Self::from_sets(RhoPartition::new(epsilon, rho)?, b1, b2, shift)
    }
}

/// Primes of the sieve (up to `cap`) grouped by bucket, plus the lower
/// half-bucket of each.
struct BucketedPrimes {
    full: Vec<Vec<u64>>,
    lower: Vec<Vec<u64>>,
}

impl BucketedPrimes {
    fn new(partition: &RhoPartition, sieve: &FactorSieve, cap: u64) -> Self {
        let top = partition.bucket(cap) as usize;
        let mut full = vec![Vec::new(); top + 1];
        let mut lower = vec![Vec::new(); top + 1];
        for p in sieve.primes().take_while(|&p| p <= cap) {
            let j = partition.bucket(p) as usize;
            full[j].push(p);
            if partition.in_lower_half(p) {
                lower[j].push(p);
            }
        }
        Self { full, lower }
    }

    fn full(&self, j: i64) -> &[u64] {
        if j < 0 {
            return &[];
        }
        self.full.get(j as usize).map_or(&[], |v| v.as_slice())
    }

    fn lower(&self, j: u64) -> &[u64] {
        self.lower.get(j as usize).map_or(&[], |v| v.as_slice())
    }
}

fn reciprocal_sum(v: &[u64]) -> f64 {
    let mut acc = Neumaier::new();
    for &p in v {
        acc.add(1.0 / p as f64);
    }
    acc.value()
}

/// Largest |P_{2,j}| for which every product bucket sj + l still holds
/// enough primes to match, given the P₁ half-bucket sizes.
fn p2_capacity(primes: &BucketedPrimes, p1_sizes: &[(u64, usize)], s: u64, j: u64, shift: i32) -> usize {
    let mut cap = primes.lower(s * j).len();
    for &(l, size) in p1_sizes {
        if size > 0 {
            let target = (s * j + l) as i64 - shift as i64;
            cap = cap.min(primes.full(target).len() / size);
        }
    }
    cap
}

/// Builds b2 = P₁·P₂ and picks, for every bucket, as many primes as b2 has
/// there (shifted by `shift`), smallest first.
fn assemble(
    partition: &RhoPartition,
    primes: &BucketedPrimes,
    p1: &[u64],
    p2: &[u64],
    shift: i32,
    trace: ConstructionTrace,
) -> Result<MatchedBlocks> {
    let mut b2: Vec<u64> = p1.iter().flat_map(|&p| p2.iter().map(move |&q| p * q)).collect();
    b2.sort_unstable();
    b2.dedup();
    let mut per_bucket: BTreeMap<u64, usize> = BTreeMap::new();
    for &m in &b2 {
        *per_bucket.entry(partition.bucket(m)).or_default() += 1;
    }
    let mut b1 = Vec::new();
    for (&k, &count) in &per_bucket {
        let source = primes.full(k as i64 - shift as i64);
        if source.len() < count {
            return Err(Error::ResourceExhausted {
                what: format!("bucket {} holds {} primes, {count} needed", k as i64 - shift as i64, source.len()),
                needed_log10: partition.rho.log10() * (k + 2) as f64,
            });
        }
        b1.extend_from_slice(&source[..count]);
    }
    let mut blocks = MatchedBlocks::from_sets(partition.clone(), b1, b2, shift)?;
    blocks.trace = Some(trace);
    Ok(blocks)
}

/// log₁₀ of a sieve limit at which the lower half-buckets reach a
/// reciprocal sum of `target`, from Σ_{p≤x} 1/p ≈ ln ln x + 0.2615.
fn limit_estimate_log10(target: f64) -> f64 {
    let lnln = 2.0 * target - 0.2615;
    lnln.exp() / std::f64::consts::LN_10
}

/// Matched blocks for (ε, ρ) following the constructive proof.
///
/// P₁ collects the primes of the lower half-buckets [ρˡ, ρ^{l+1/2}) from the
/// first nonempty one (j0) until Σ 1/p ≥ 3/ε (this fixes s). P₂ then takes,
/// for j = 1, 2, …, primes from the lower half-bucket at s·j until its
/// reciprocal sum also reaches 3/ε (this fixes t). The size of each P_{2,j}
/// is the largest for which every product bucket sj + l still contains
/// |P_{1,l}|·|P_{2,j}| primes; these measured counts replace the
/// prime-number-theorem constant. Then b2 = P₁·P₂, and b1 takes the same
/// number of primes from every bucket.
///
/// Fails with [`Error::ResourceExhausted`] when the sieve runs out first.
pub fn construct_matched_blocks(epsilon: f64, rho: f64, sieve: &FactorSieve) -> Result<MatchedBlocks> {
    construct_matched_blocks_shifted(epsilon, rho, 0, sieve)
}

/// [`construct_matched_blocks`] with b1 matched to b2 at bucket offset
/// `shift` ∈ {−1, 0, 1}.
pub fn construct_matched_blocks_shifted(
    epsilon: f64,
    rho: f64,
    shift: i32,
    sieve: &FactorSieve,
) -> Result<MatchedBlocks> {
    if !(-1..=1).contains(&shift) {
        return Err(Error::invalid(format!("shift must be -1, 0 or 1, got {shift}")));
    }
    let partition = RhoPartition::new(epsilon, rho)?;
    let target = 3.0 / epsilon;
    let limit = sieve.limit();
    let top = partition.bucket(limit);
    let primes = BucketedPrimes::new(&partition, sieve, limit);

    let j0 = (0..=top).find(|&l| !primes.lower(l).is_empty()).unwrap_or(0);
    let mut p1 = Vec::new();
    let mut p1_sizes = Vec::new();
    let mut p1_sum = 0.0;
    let mut s = j0;
    while p1_sum < target {
        // products reach bucket 2s at the very least
        if 2 * (s + 1) > top {
            return Err(Error::ResourceExhausted {
                what: format!(
                    "P1 reached a reciprocal sum of {p1_sum:.3} of the required {target:.3} before the sieve ran out"
                ),
                needed_log10: 2.0 * limit_estimate_log10(target),
            });
        }
        let half = primes.lower(s);
        p1.extend_from_slice(half);
        p1_sizes.push((s, half.len()));
        p1_sum = reciprocal_sum(&p1);
        s += 1;
    }
    let s_len = s;

    let mut p2 = Vec::new();
    let mut p2_sum = 0.0;
    let mut j = 0;
    while p2_sum < target {
        j += 1;
        if s_len * (j + 1) + 1 > top {
            return Err(Error::ResourceExhausted {
                what: format!(
                    "P2 reached a reciprocal sum of {p2_sum:.3} of the required {target:.3} before the sieve ran out"
                ),
                needed_log10: f64::INFINITY,
            });
        }
        let cap = p2_capacity(&primes, &p1_sizes, s_len, j, shift);
        p2.extend_from_slice(&primes.lower(s_len * j)[..cap]);
        p2_sum = reciprocal_sum(&p2);
    }
    let trace = ConstructionTrace { j0, s: s_len, t: j, p1_reciprocal_sum: p1_sum, p2_reciprocal_sum: p2_sum };
    assemble(&partition, &primes, &p1, &p2, shift, trace)
}

/// Best-effort construction with every element at most `max_element`.
///
/// Runs the same construction without the 3/ε stopping rule: for each
/// t ∈ 1..=4 it uses s = ⌊K/(t+1)⌋ where ρ^K ≤ max_element, takes every
/// lower half-bucket below s for P₁ and fills P_{2,1..t} to capacity. The
/// candidate with the smallest max(measure(b1), measure(b2)) is returned.
/// Properties (a) and (b) hold exactly; (c) is whatever the range allows.
pub fn construct_matched_blocks_within(
    epsilon: f64,
    rho: f64,
    shift: i32,
    sieve: &FactorSieve,
    max_element: u64,
) -> Result<MatchedBlocks> {
    if !(-1..=1).contains(&shift) {
        return Err(Error::invalid(format!("shift must be -1, 0 or 1, got {shift}")));
    }
    let partition = RhoPartition::new(epsilon, rho)?;
    let cap = max_element.min(sieve.limit());
    let top = partition.bucket(cap);
    let primes = BucketedPrimes::new(&partition, sieve, cap);
    let j0 = (0..=top).find(|&l| !primes.lower(l).is_empty()).unwrap_or(0);
    let mut best: Option<MatchedBlocks> = None;
    for t in 1..=4u64 {
        // buckets of products stay below s(t+1); b1 may need one more
        let s = top.saturating_sub(1) / (t + 1);
        if s <= j0 {
            continue;
        }
        let mut p1 = Vec::new();
        let mut p1_sizes = Vec::new();
        for l in j0..s {
            p1.extend_from_slice(primes.lower(l));
            p1_sizes.push((l, primes.lower(l).len()));
        }
        let mut p2 = Vec::new();
        for j in 1..=t {
            let c = p2_capacity(&primes, &p1_sizes, s, j, shift);
            p2.extend_from_slice(&primes.lower(s * j)[..c]);
        }
        if p1.is_empty() || p2.is_empty() {
            continue;
        }
        let trace = ConstructionTrace {
            j0,
            s,
            t,
            p1_reciprocal_sum: reciprocal_sum(&p1),
            p2_reciprocal_sum: reciprocal_sum(&p2),
        };
        let Ok(blocks) = assemble(&partition, &primes, &p1, &p2, shift, trace) else {
            continue;
        };
        if blocks.b1.iter().chain(&blocks.b2).any(|&m| m > cap) {
            continue;
        }
        let score = blocks.measures.0.max(blocks.measures.1);
        if best.as_ref().is_none_or(|b| score < b.measures.0.max(b.measures.1)) {
            best = Some(blocks);
        }
    }
    best.ok_or_else(|| Error::ResourceExhausted {
        what: format!("no matched blocks fit below {cap}"),
        needed_log10: (cap as f64).log10() + 1.0,
    })
}

/// Outcome of [`verify_matched_blocks`]; failures are entries, not errors.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    /// (a): every b1 element is prime.
    pub b1_all_prime: bool,
    /// (a): every b2 element has Ω = 2.
    pub b2_all_two_almost_prime: bool,
    /// Elements violating (a).
    pub offending_elements: Vec<u64>,
    /// (b): bucket counts agree (with shift).
    pub buckets_match: bool,
    /// Buckets violating (b).
    pub offending_buckets: Vec<BucketCount>,
    pub measure_b1: f64,
    pub measure_b2: f64,
    pub epsilon: f64,
    /// (c): both measures ≤ ε.
    pub measures_ok: bool,
}

impl VerificationReport {
    pub fn property_a(&self) -> bool {
        self.b1_all_prime && self.b2_all_two_almost_prime
    }

    pub fn all_pass(&self) -> bool {
        self.property_a() && self.buckets_match && self.measures_ok
    }
}

fn trial_big_omega(mut n: u64) -> u32 {
    let mut k = 0;
    let mut d = 2;
    while d * d <= n {
        while n % d == 0 {
            n /= d;
            k += 1;
        }
        d += 1;
    }
    if n > 1 {
        k += 1;
    }
    k
}

/// Recomputes properties (a), (b) and (c) from scratch.
pub fn verify_matched_blocks(blocks: &MatchedBlocks) -> Result<VerificationReport> {
    let mut offending = Vec::new();
    let b1_all_prime = blocks.b1.iter().all(|&p| {
        let ok = p >= 2 && trial_big_omega(p) == 1;
        if !ok {
            offending.push(p);
        }
        ok
    });
    let b2_all = blocks.b2.iter().all(|&q| {
        let ok = q >= 2 && trial_big_omega(q) == 2;
        if !ok {
            offending.push(q);
        }
        ok
    });
    let counts = bucket_counts(&blocks.partition, &blocks.b1, &blocks.b2, blocks.shift);
    let offending_buckets: Vec<BucketCount> = counts.into_iter().filter(|c| c.b1 != c.b2).collect();
    let m1 = coprimality_measure(&blocks.b1)?;
    let m2 = coprimality_measure(&blocks.b2)?;
    let eps = blocks.partition.epsilon;
    Ok(VerificationReport {
        b1_all_prime,
        b2_all_two_almost_prime: b2_all,
        offending_elements: offending,
        buckets_match: offending_buckets.is_empty(),
        offending_buckets,
        measure_b1: m1,
        measure_b2: m2,
        epsilon: eps,
        measures_ok: m1 <= eps && m2 <= eps,
    })
}

/// 𝔼_{n∈[k]} a(n) for every k in `cutoffs`, in one pass up to max(cutoffs).
fn prefix_means<F>(a: &F, cutoffs: &[u64]) -> Result<BTreeMap<u64, Complex64>>
where
    F: Fn(u64) -> Complex64,
{
    let mut wanted: Vec<u64> = cutoffs.to_vec();
    wanted.sort_unstable();
    wanted.dedup();
    let mut out = BTreeMap::new();
    let (mut re, mut im) = (Neumaier::new(), Neumaier::new());
    let mut n = 0u64;
    for &k in &wanted {
        while n < k {
            n += 1;
            let v = a(n);
            if v.norm() > BOUND_TOL {
                return Err(Error::invalid("sequence is not bounded by 1 in modulus"));
            }
            re.add(v.re);
            im.add(v.im);
        }
        if k > 0 {
            out.insert(k, Complex64::new(re.value(), im.value()) / k as f64);
        }
    }
    Ok(out)
}

/// |𝔼^log_{p∈b1} 𝔼_{n∈[N/p]} a(n) − 𝔼^log_{q∈b2} 𝔼_{n∈[N/q]} a(n)|.
pub fn block_comparison_defect<F>(a: F, blocks: &MatchedBlocks, n_max: u64) -> Result<f64>
where
    F: Fn(u64) -> Complex64,
{
    let max = blocks.b1.iter().chain(&blocks.b2).copied().max().unwrap_or(0);
    if n_max < max {
        return Err(Error::invalid(format!("N = {n_max} is below the largest block element {max}")));
    }
    let cutoffs: Vec<u64> = blocks.b1.iter().chain(&blocks.b2).map(|&m| n_max / m).collect();
    let means = prefix_means(&a, &cutoffs)?;
    let avg = |m: u64| means[&(n_max / m)];
    let x = log_average(&blocks.b1, avg)?;
    let y = log_average(&blocks.b2, avg)?;
    Ok((x - y).norm())
}

/// The two transfer averages of the Ω-ergodic argument,
/// (𝔼^log_{p∈b1} 𝔼_{n∈[N/p]} f(T^{Ω(pn)+1}x), 𝔼^log_{q∈b2} 𝔼_{n∈[N/q]} f(T^{Ω(qn)}x)),
/// evaluated literally from Ω(pn) and Ω(qn). `orbit(k)` is f(Tᵏx).
pub fn transfer_averages<F>(
    blocks: &MatchedBlocks,
    orbit: F,
    n_max: u64,
    sieve: &FactorSieve,
) -> Result<(Complex64, Complex64)>
where
    F: Fn(u32) -> Complex64 + Sync,
{
    if n_max > sieve.limit() {
        return Err(Error::OutOfRange { n: n_max, limit: sieve.limit() });
    }
    let inner = |m: u64, extra: u32| {
        let top = n_max / m;
        if top == 0 {
            return Complex64::new(0.0, 0.0);
        }
        crate::sum::sum_range(1, top, |n| orbit(sieve.big_omega_unchecked(m * n) + extra)) / top as f64
    };
    let first = log_average(&blocks.b1, |p| inner(p, 1))?;
    let second = log_average(&blocks.b2, |q| inner(q, 0))?;
    Ok((first, second))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_primes(limit: u64) -> Vec<u64> {
        (2..=limit).filter(|&n| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)).collect()
    }

    #[test]
    fn primes_examples() {
        assert_eq!(primes_up_to(10).unwrap(), vec![2, 3, 5, 7]);
        assert_eq!(primes_up_to(2).unwrap(), vec![2]);
        assert_eq!(primes_up_to(5000).unwrap(), trial_primes(5000));
        assert!(primes_up_to(1).is_err());
    }

    #[test]
    fn almost_primes_examples() {
        let s = FactorSieve::new(1000).unwrap();
        assert_eq!(k_almost_primes_up_to(&s, 1, 1000).unwrap(), primes_up_to(1000).unwrap());
        assert_eq!(k_almost_primes_up_to(&s, 2, 21).unwrap(), vec![4, 6, 9, 10, 14, 15, 21]);
        assert_eq!(k_almost_primes_up_to(&s, 3, 1000).unwrap()[0], 8);
        assert!(k_almost_primes_up_to(&s, 2, 1001).is_err());
        assert!(k_almost_primes_up_to(&s, 0, 10).is_err());
    }

    #[test]
    fn bucket_examples() {
        let p = RhoPartition::new(0.25, 1.05).unwrap();
        assert_eq!(p.bucket(1), 0);
        assert_eq!(p.bucket(2), 14);
        assert_eq!(p.bucket(2), ((2f64).ln() / (1.05f64).ln()).floor() as u64);
    }

    #[test]
    fn bucket_boundaries_are_exact() {
        // ρ = 1.2 = 6/5 exactly as a rational; 1.2^j is an integer times 5^-j
        let p = RhoPartition::new(0.25, 1.2).unwrap();
        assert_eq!(p.rational(), (6, 5));
        // ρ = 2 hits every power of two exactly
        let p2 = RhoPartition { rho: 2.0, epsilon: 0.5, num: 2, den: 1, ln_rho: 2f64.ln() };
        for j in 0..60u64 {
            assert_eq!(p2.bucket(1 << j), j);
            if j > 0 {
                assert_eq!(p2.bucket((1 << j) - 1), j - 1);
            }
        }
        // brute-force against exact comparison for ρ = 6/5
        for n in 1..20_000u64 {
            let j = p.bucket(n);
            assert!(p.power_at_most(j, n, 1) && !p.power_at_most(j + 1, n, 1), "n={n}");
        }
    }

    #[test]
    fn partition_rejects_bad_parameters() {
        assert!(RhoPartition::new(1.0, 1.5).is_err());
        assert!(RhoPartition::new(0.25, 1.3).is_err());
        assert!(RhoPartition::new(0.25, 1.0).is_err());
        assert!(construct_matched_blocks(1.5, 1.2, &FactorSieve::new(100).unwrap()).is_err());
    }

    #[test]
    fn strict_construction_reports_exhaustion() {
        let s = FactorSieve::new(1_000_000).unwrap();
        match construct_matched_blocks(0.25, 1.2, &s) {
            Err(Error::ResourceExhausted { needed_log10, .. }) => assert!(needed_log10 > 6.0),
            other => panic!("expected exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn best_effort_blocks_satisfy_a_and_b() {
        let s = FactorSieve::new(2_000_000).unwrap();
        for shift in [-1, 0, 1] {
            let blocks = construct_matched_blocks_within(0.25, 1.2, shift, &s, 2_000_000).unwrap();
            let report = verify_matched_blocks(&blocks).unwrap();
            assert!(report.property_a(), "shift {shift}");
            assert!(report.buckets_match, "shift {shift}: {:?}", report.offending_buckets);
            assert!(blocks.b2.iter().all(|&q| s.big_omega(q).unwrap() == 2));
        }
    }

    #[test]
    fn removing_a_prime_breaks_property_b() {
        let s = FactorSieve::new(1_000_000).unwrap();
        let mut blocks = construct_matched_blocks_within(0.25, 1.2, 0, &s, 1_000_000).unwrap();
        let removed = blocks.b1.remove(0);
        let report = verify_matched_blocks(&blocks).unwrap();
        assert!(!report.buckets_match);
        let bad = report.offending_buckets;
        assert_eq!(bad.len(), 1);
        assert_eq!(bad[0].bucket, blocks.partition.bucket(removed) as i64);
        assert_eq!(bad[0].b1 + 1, bad[0].b2);
    }

    #[test]
    fn comparison_defect_examples() {
        let s = FactorSieve::new(1_000_000).unwrap();
        let blocks = construct_matched_blocks_within(0.25, 1.2, 0, &s, 1_000_000).unwrap();
        let same = MatchedBlocks::from_sets(blocks.partition.clone(), blocks.b1.clone(), blocks.b1.clone(), 0).unwrap();
        let lam = |n: u64| Complex64::new(s.liouville(n).unwrap() as f64, 0.0);
        assert_eq!(block_comparison_defect(lam, &same, 1_000_000).unwrap(), 0.0);
        let one = block_comparison_defect(|_| Complex64::new(1.0, 0.0), &blocks, 1_000_000).unwrap();
        assert!(one <= 0.2 + 1e-3, "{one}");
        assert!(block_comparison_defect(lam, &blocks, 10).is_err());
    }

    #[test]
    fn text_format_roundtrip() {
        let p = RhoPartition::new(0.25, 1.2).unwrap();
        let blocks = MatchedBlocks::from_sets(p, vec![5, 7], vec![6, 35], 1).unwrap();
        let text = blocks.to_text();
        assert!(text.starts_with("1.2 0.25 1\n1 0 5\n1 1 7\n2 0 6\n2 1 35\n"));
        assert_eq!(MatchedBlocks::from_text(&text).unwrap(), blocks);
        assert!(MatchedBlocks::from_text("1.2 0.25\n").is_err());
        assert!(MatchedBlocks::from_text("1.2 0.25 0\n3 0 5\n").is_err());
    }
}
