//! Sieve-backed arithmetic functions.
//!
//! [`FactorSieve`] stores one smallest-prime-factor entry per integer
//! (4 bytes per entry, so a sieve to 10⁸ occupies about 400 MB). Every other
//! function factors n by repeated division by its smallest prime factor,
//! which costs O(Ω(n)) = O(log n) divisions.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::{Error, Result};

/// Magic bytes opening a sieve cache file.
pub const CACHE_MAGIC: &[u8; 8] = b"ERGOSPF1";

/// Smallest-prime-factor table for every n in [2, limit].
#[derive(Clone, PartialEq, Eq)]
pub struct FactorSieve {
    limit: u32,
    // spf[0] = spf[1] = 0
    spf: Vec<u32>,
}

impl std::fmt::Debug for FactorSieve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FactorSieve").field("limit", &self.limit).finish()
    }
}

impl FactorSieve {
    /// Builds the table for [2, limit]. Requires 2 ≤ limit < 2³².
    pub fn new(limit: u64) -> Result<Self> {
        if limit < 2 {
            return Err(Error::invalid(format!("sieve limit must be at least 2, got {limit}")));
        }
        if limit > u32::MAX as u64 - 1 {
            return Err(Error::invalid(format!("sieve limit {limit} exceeds 32-bit entries")));
        }
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        let root = (limit as f64).sqrt() as usize + 1;
        for i in 2..=n {
            if spf[i] != 0 {
                continue;
            }
            spf[i] = i as u32;
            if i <= root && i * i <= n {
                let mut j = i * i;
                while j <= n {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        Ok(Self { limit: limit as u32, spf })
    }

    pub fn limit(&self) -> u64 {
        self.limit as u64
    }

    /// Raw table, indexed by n (entries 0 and 1 are 0).
    pub fn table(&self) -> &[u32] {
        &self.spf
    }

    /// Smallest prime factor of n, for 2 ≤ n ≤ limit.
    pub fn spf(&self, n: u64) -> Result<u64> {
        if n < 2 || n > self.limit() {
            return Err(Error::OutOfRange { n, limit: self.limit() });
        }
        Ok(self.spf[n as usize] as u64)
    }

    #[inline]
    fn check(&self, n: u64) -> Result<()> {
        if n == 0 || n > self.limit() {
            Err(Error::OutOfRange { n, limit: self.limit() })
        } else {
            Ok(())
        }
    }

    pub fn is_prime(&self, n: u64) -> Result<bool> {
        self.check(n)?;
        Ok(n >= 2 && self.spf[n as usize] as u64 == n)
    }

    /// Prime-power factorization of n as (p, e) pairs in increasing p.
    pub fn factors(&self, n: u64) -> Result<Factors<'_>> {
        self.check(n)?;
        Ok(self.factors_unchecked(n))
    }

    /// Like [`factors`](Self::factors) without the range check; n must be in
    /// [1, limit].
    #[inline]
    pub fn factors_unchecked(&self, n: u64) -> Factors<'_> {
        Factors { spf: &self.spf, rest: n as u32 }
    }

    /// Ω(n) for n in [1, limit], no range check.
    #[inline]
    pub fn big_omega_unchecked(&self, n: u64) -> u32 {
        let mut m = n as u32;
        let mut k = 0;
        while m > 1 {
            m /= self.spf[m as usize];
            k += 1;
        }
        k
    }

    /// Ω(n): prime factors counted with multiplicity; Ω(1) = 0.
    pub fn big_omega(&self, n: u64) -> Result<u32> {
        self.check(n)?;
        Ok(self.big_omega_unchecked(n))
    }

    /// ω(n): number of distinct prime factors.
    pub fn small_omega(&self, n: u64) -> Result<u32> {
        Ok(self.factors(n)?.count() as u32)
    }

    #[inline]
    pub fn liouville_unchecked(&self, n: u64) -> i8 {
        if self.big_omega_unchecked(n) % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// λ(n) = (−1)^Ω(n).
    pub fn liouville(&self, n: u64) -> Result<i8> {
        self.check(n)?;
        Ok(self.liouville_unchecked(n))
    }

    /// µ(n): λ(n) on squarefree n, 0 otherwise.
    pub fn moebius(&self, n: u64) -> Result<i8> {
        let mut sign = 1i8;
        for (_, e) in self.factors(n)? {
            if e > 1 {
                return Ok(0);
            }
            sign = -sign;
        }
        Ok(sign)
    }

    /// True iff no p^k divides n.
    pub fn is_k_free(&self, n: u64, k: u32) -> Result<bool> {
        if k < 2 {
            return Err(Error::invalid(format!("k-free needs k >= 2, got {k}")));
        }
        Ok(self.factors(n)?.all(|(_, e)| e < k))
    }

    /// Ω_Q(n): multiplicities of the prime factors of n that lie in `set`.
    pub fn omega_restricted(&self, n: u64, set: &PrimeSet) -> Result<u32> {
        Ok(self.factors(n)?.filter(|&(p, _)| set.contains(p)).map(|(_, e)| e).sum())
    }

    /// Σ e·a(p) over the factorization n = Π p^e.
    pub fn completely_additive_eval(&self, spec: &AdditiveFunctionSpec, n: u64) -> Result<u64> {
        Ok(self.factors(n)?.map(|(p, e)| e as u64 * spec.value_at_prime(p)).sum())
    }

    /// Π b(p)^e over the factorization n = Π p^e.
    pub fn completely_multiplicative_eval(
        &self,
        spec: &MultiplicativeFunctionSpec,
        n: u64,
    ) -> Result<Complex64> {
        let mut acc = Complex64::new(1.0, 0.0);
        for (p, e) in self.factors(n)? {
            acc *= spec.value_at_prime(p).powu(e);
        }
        Ok(acc)
    }

    /// Primes in [2, limit], ascending.
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.spf
            .iter()
            .enumerate()
            .skip(2)
            .filter(|&(n, &p)| p as usize == n)
            .map(|(n, _)| n as u64)
    }

    /// Writes the cache format: the 8-byte magic `ERGOSPF1`, the limit as a
    /// little-endian u64, then spf[0..=limit] as little-endian u32.
    pub fn write_cache(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(CACHE_MAGIC)?;
        w.write_all(&(self.limit as u64).to_le_bytes())?;
        for &v in &self.spf {
            w.write_all(&v.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a file produced by [`write_cache`](Self::write_cache).
    pub fn read_cache(path: &Path) -> Result<Self> {
        let mut r = BufReader::new(File::open(path)?);
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != CACHE_MAGIC {
            return Err(Error::invalid(format!("{}: not a sieve cache file", path.display())));
        }
        let mut lim = [0u8; 8];
        r.read_exact(&mut lim)?;
        let limit = u64::from_le_bytes(lim);
        if !(2..u32::MAX as u64).contains(&limit) {
            return Err(Error::invalid(format!("{}: bad limit {limit}", path.display())));
        }
        let mut bytes = vec![0u8; (limit as usize + 1) * 4];
        r.read_exact(&mut bytes)?;
        if r.read(&mut [0u8; 1])? != 0 {
            return Err(Error::invalid(format!("{}: trailing bytes", path.display())));
        }
        let spf: Vec<u32> = bytes
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        if spf[2] != 2 || spf[limit as usize] == 0 {
            return Err(Error::invalid(format!("{}: corrupt table", path.display())));
        }
        Ok(Self { limit: limit as u32, spf })
    }
}

/// Iterator over (prime, exponent) pairs of a factorization.
pub struct Factors<'a> {
    spf: &'a [u32],
    rest: u32,
}

impl Iterator for Factors<'_> {
    type Item = (u64, u32);

    #[inline]
    fn next(&mut self) -> Option<(u64, u32)> {
        if self.rest <= 1 {
            return None;
        }
        let p = self.spf[self.rest as usize];
        let mut e = 0;
        while self.rest % p == 0 {
            self.rest /= p;
            e += 1;
        }
        Some((p as u64, e))
    }
}

/// s_q(n), the sum of the base-q digits of n. Accepts n = 0.
pub fn digit_sum(mut n: u64, q: u64) -> Result<u64> {
    if q < 2 {
        return Err(Error::invalid(format!("digit base must be at least 2, got {q}")));
    }
    let mut s = 0;
    while n > 0 {
        s += n % q;
        n /= q;
    }
    Ok(s)
}

/// ν_p(n) = max{e : p^e | n}.
pub fn padic_valuation(mut n: u64, p: u64) -> Result<u32> {
    if n == 0 {
        return Err(Error::invalid("p-adic valuation of 0 is undefined"));
    }
    if !is_prime_u64(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    let mut e = 0;
    while n % p == 0 {
        n /= p;
        e += 1;
    }
    Ok(e)
}

/// Witness set for [`is_prime_u64`]; the first twelve primes make
/// Miller–Rabin deterministic for every n < 3.3·10²⁴, hence for all u64.
pub const MILLER_RABIN_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin primality test on u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MILLER_RABIN_WITNESSES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &MILLER_RABIN_WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A set of primes. Membership is only meaningful for primes; callers
/// holding an arbitrary integer should use [`PrimeSet::contains_integer`].
#[derive(Debug, Clone, PartialEq)]
pub enum PrimeSet {
    Explicit(BTreeSet<u64>),
    /// {p ∈ ℙ : p ≡ residue (mod modulus)}
    Residue { residue: u64, modulus: u64 },
    All,
    Complement(Box<PrimeSet>),
    Union(Vec<PrimeSet>),
}

impl PrimeSet {
    pub fn empty() -> Self {
        PrimeSet::Explicit(BTreeSet::new())
    }

    pub fn explicit<I: IntoIterator<Item = u64>>(primes: I) -> Self {
        PrimeSet::Explicit(primes.into_iter().collect())
    }

    pub fn residue(residue: u64, modulus: u64) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::invalid("residue-class modulus must be positive"));
        }
        Ok(PrimeSet::Residue { residue: residue % modulus, modulus })
    }

    pub fn complement(self) -> Self {
        PrimeSet::Complement(Box::new(self))
    }

    /// Membership of a prime p.
    pub fn contains(&self, p: u64) -> bool {
        match self {
            PrimeSet::Explicit(s) => s.contains(&p),
            PrimeSet::Residue { residue, modulus } => p % modulus == *residue,
            PrimeSet::All => true,
            PrimeSet::Complement(inner) => !inner.contains(p),
            PrimeSet::Union(parts) => parts.iter().any(|s| s.contains(p)),
        }
    }

    /// Membership of an arbitrary integer: primality is decided by the sieve
    /// when n is in range and by [`is_prime_u64`] otherwise.
    pub fn contains_integer(&self, n: u64, sieve: Option<&FactorSieve>) -> bool {
        let prime = match sieve {
            Some(s) if n >= 1 && n <= s.limit() => s.is_prime(n).unwrap_or(false),
            _ => is_prime_u64(n),
        };
        prime && self.contains(n)
    }
}

/// Completely additive a: ℕ → ℕ₀ given on primes by an ordered list of
/// (prime set, value) pairs; the first matching set wins.
#[derive(Debug, Clone, PartialEq)]
pub struct AdditiveFunctionSpec {
    pub assignments: Vec<(PrimeSet, u64)>,
    pub default: u64,
}

impl AdditiveFunctionSpec {
    pub fn new(assignments: Vec<(PrimeSet, u64)>, default: u64) -> Self {
        Self { assignments, default }
    }

    /// a = Ω.
    pub fn big_omega() -> Self {
        Self::new(Vec::new(), 1)
    }

    /// a = Ω_Q.
    pub fn restricted(set: PrimeSet) -> Self {
        Self::new(vec![(set, 1)], 0)
    }

    /// Index of the assignment governing p (`assignments.len()` = default).
    pub fn class_of(&self, p: u64) -> usize {
        self.assignments.iter().position(|(s, _)| s.contains(p)).unwrap_or(self.assignments.len())
    }

    pub fn value_at_prime(&self, p: u64) -> u64 {
        self.assignments.iter().find(|(s, _)| s.contains(p)).map_or(self.default, |&(_, v)| v)
    }
}

/// Completely multiplicative b: ℕ → S¹ given on primes like
/// [`AdditiveFunctionSpec`]. Unit modulus is checked once, at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplicativeFunctionSpec {
    assignments: Vec<(PrimeSet, Complex64)>,
    default: Complex64,
}

const UNIT_TOL: f64 = 1e-9;

impl MultiplicativeFunctionSpec {
    pub fn new(assignments: Vec<(PrimeSet, Complex64)>, default: Complex64) -> Result<Self> {
        for v in assignments.iter().map(|(_, v)| v).chain(std::iter::once(&default)) {
            if (v.norm() - 1.0).abs() > UNIT_TOL {
                return Err(Error::invalid(format!("value {v} does not have modulus 1")));
            }
        }
        Ok(Self { assignments, default })
    }

    /// b = λ.
    pub fn liouville() -> Self {
        Self { assignments: Vec::new(), default: Complex64::new(-1.0, 0.0) }
    }

    pub fn assignments(&self) -> &[(PrimeSet, Complex64)] {
        &self.assignments
    }

    pub fn default_value(&self) -> Complex64 {
        self.default
    }

    pub fn class_of(&self, p: u64) -> usize {
        self.assignments.iter().position(|(s, _)| s.contains(p)).unwrap_or(self.assignments.len())
    }

    pub fn value_at_prime(&self, p: u64) -> Complex64 {
        self.assignments.iter().find(|(s, _)| s.contains(p)).map_or(self.default, |&(_, v)| v)
    }
}
