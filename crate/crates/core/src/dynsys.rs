//! Additive and multiplicative topological dynamical systems.
//!
//! Additive systems are iterated as n ↦ Tⁿx. Multiplicative systems assign a
//! map Sₙ to every n with S_{mn} = S_m ∘ S_n. They are evaluated from the
//! factorization of n, so only the maps S_p at primes are ever specified.
//!
//! Torus coordinates are reduced mod 1 after every step. A coordinate that
//! is iterated n times therefore carries at most about n·2⁻⁵³ of drift.

use std::collections::BTreeMap;

use crate::arith::{padic_valuation, AdditiveFunctionSpec, FactorSieve, MultiplicativeFunctionSpec};
use crate::averaging::BOUND_TOL;
use crate::sum::{mean, sum_range};
use crate::{e, frac, integer_relation, Complex64, Error, Result};

/// An additive system (X, T).
#[derive(Debug, Clone, PartialEq)]
pub enum AdditiveSystem {
    /// x ↦ x + 1 mod m on {0, …, m−1}.
    Cyclic { m: u64 },
    /// x ↦ x + α on 𝕋ᵈ.
    Torus { alpha: Vec<f64> },
    /// x ↦ Ax + b on 𝕋ᵈ with (A − I)ᵈ = 0.
    UnipotentAffine { a: Vec<Vec<i64>>, b: Vec<f64> },
    Product(Vec<AdditiveSystem>),
}

/// A point of a system's state space.
#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Cyclic(u64),
    Torus(Vec<f64>),
    Product(Vec<State>),
}

/// A continuous function on a state space.
#[derive(Debug, Clone, PartialEq)]
pub enum Observable {
    /// x ↦ e(h·x) on a torus.
    CharacterOnTorus(Vec<i64>),
    /// x ↦ values[x] on a cyclic group.
    TableOnCyclic(Vec<Complex64>),
    Product(Vec<Observable>),
}

fn is_unipotent(a: &[Vec<i64>]) -> bool {
    let d = a.len();
    if a.iter().any(|row| row.len() != d) {
        return false;
    }
    let n: Vec<Vec<i128>> = (0..d)
        .map(|i| (0..d).map(|j| a[i][j] as i128 - i128::from(i == j)).collect())
        .collect();
    let mut p = n.clone();
    for _ in 1..d {
        let mut q = vec![vec![0i128; d]; d];
        for i in 0..d {
            for k in 0..d {
                if p[i][k] != 0 {
                    for j in 0..d {
                        q[i][j] += p[i][k] * n[k][j];
                    }
                }
            }
        }
        p = q;
    }
    p.iter().flatten().all(|&v| v == 0)
}

fn torus_add(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| frac(a + b)).collect()
}

impl AdditiveSystem {
    pub fn cyclic(m: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("cyclic rotation needs m >= 1"));
        }
        Ok(Self::Cyclic { m })
    }

    pub fn torus(alpha: Vec<f64>) -> Result<Self> {
        if alpha.is_empty() || alpha.iter().any(|a| !a.is_finite()) {
            return Err(Error::invalid("torus rotation needs a finite, nonempty alpha"));
        }
        Ok(Self::Torus { alpha: alpha.into_iter().map(frac).collect() })
    }

    pub fn unipotent_affine(a: Vec<Vec<i64>>, b: Vec<f64>) -> Result<Self> {
        if a.is_empty() || a.len() != b.len() {
            return Err(Error::invalid("affine map needs a d×d matrix and a length-d vector"));
        }
        if !is_unipotent(&a) {
            return Err(Error::invalid("matrix is not unipotent: (A - I)^d != 0"));
        }
        Ok(Self::UnipotentAffine { a, b: b.into_iter().map(frac).collect() })
    }

    /// Checks that `x` is a point of the state space.
    pub fn check_state(&self, x: &State) -> Result<()> {
        match (self, x) {
            (Self::Cyclic { m }, State::Cyclic(s)) if s < m => Ok(()),
            (Self::Torus { alpha: v }, State::Torus(t)) | (Self::UnipotentAffine { b: v, .. }, State::Torus(t))
                if v.len() == t.len() =>
            {
                Ok(())
            }
            (Self::Product(ss), State::Product(xs)) if ss.len() == xs.len() => {
                ss.iter().zip(xs).try_for_each(|(s, x)| s.check_state(x))
            }
            _ => Err(Error::invalid(format!("state {x:?} does not belong to {self:?}"))),
        }
    }

    /// Checks that `f` is defined on the state space.
    pub fn check_observable(&self, f: &Observable) -> Result<()> {
        match (self, f) {
            (Self::Cyclic { m }, Observable::TableOnCyclic(v)) if v.len() as u64 == *m => Ok(()),
            (Self::Torus { alpha: v }, Observable::CharacterOnTorus(h))
            | (Self::UnipotentAffine { b: v, .. }, Observable::CharacterOnTorus(h))
                if v.len() == h.len() =>
            {
                Ok(())
            }
            (Self::Product(ss), Observable::Product(fs)) if ss.len() == fs.len() => {
                ss.iter().zip(fs).try_for_each(|(s, f)| s.check_observable(f))
            }
            _ => Err(Error::invalid(format!("observable {f:?} does not fit {self:?}"))),
        }
    }

    /// Tx.
    pub fn step(&self, x: &State) -> State {
        match (self, x) {
            (Self::Cyclic { m }, State::Cyclic(s)) => State::Cyclic((s + 1) % m),
            (Self::Torus { alpha }, State::Torus(t)) => State::Torus(torus_add(t, alpha)),
            (Self::UnipotentAffine { a, b }, State::Torus(t)) => State::Torus(
                a.iter()
                    .zip(b)
                    .map(|(row, bi)| {
                        // integer coefficients: only the fractional parts matter
                        let s: f64 = row.iter().zip(t).map(|(&c, &ti)| frac(c as f64 * ti)).sum();
                        frac(s + bi)
                    })
                    .collect(),
            ),
            (Self::Product(ss), State::Product(xs)) => {
                State::Product(ss.iter().zip(xs).map(|(s, x)| s.step(x)).collect())
            }
            _ => panic!("state does not match system; call check_state first"),
        }
    }

    /// Tᵏx. Cyclic and torus rotations jump directly, affine maps iterate.
    pub fn power(&self, x: &State, k: u64) -> State {
        match (self, x) {
            (Self::Cyclic { m }, State::Cyclic(s)) => State::Cyclic(((*s as u128 + k as u128) % *m as u128) as u64),
            (Self::Torus { alpha }, State::Torus(t)) => State::Torus(
                t.iter().zip(alpha).map(|(ti, ai)| frac(ti + frac(k as f64 * ai))).collect(),
            ),
            (Self::Product(ss), State::Product(xs)) => {
                State::Product(ss.iter().zip(xs).map(|(s, x)| s.power(x, k)).collect())
            }
            _ => {
                let mut y = x.clone();
                for _ in 0..k {
                    y = self.step(&y);
                }
                y
            }
        }
    }

    /// Whether T is known to be uniquely ergodic. Rotations are tested with
    /// the integer-relation heuristic (coefficients up to 12, tolerance 1e−9).
    pub fn appears_uniquely_ergodic(&self) -> bool {
        match self {
            Self::Cyclic { .. } => true,
            Self::Torus { alpha } => integer_relation(alpha, 12, 1e-9).is_none(),
            // Weyl: unique ergodicity iff the induced rotation on the first
            // coordinate block is irrational; checked on b only
            Self::UnipotentAffine { b, .. } => b.iter().any(|&v| integer_relation(&[v], 12, 1e-9).is_none()),
            // products of uniquely ergodic systems need not be; only cyclic
            // factors of coprime order combined with rotations are accepted
            Self::Product(ss) => {
                let mut cyclic_lcm = 1u64;
                let mut angles = Vec::new();
                for s in ss {
                    match s {
                        Self::Cyclic { m } => {
                            if crate::averaging::gcd(cyclic_lcm, *m) != 1 {
                                return false;
                            }
                            cyclic_lcm *= m;
                        }
                        Self::Torus { alpha } => angles.extend_from_slice(alpha),
                        _ => return false,
                    }
                }
                let scaled: Vec<f64> = angles.iter().map(|a| a * cyclic_lcm as f64).collect();
                scaled.is_empty() || integer_relation(&scaled, 12, 1e-9).is_none()
            }
        }
    }
}

impl Observable {
    /// f(x). The observable must fit the state (see
    /// [`AdditiveSystem::check_observable`]).
    pub fn eval(&self, x: &State) -> Result<Complex64> {
        match (self, x) {
            (Self::CharacterOnTorus(h), State::Torus(t)) if h.len() == t.len() => {
                let phase: f64 = h.iter().zip(t).map(|(&hi, &ti)| frac(hi as f64 * ti)).sum();
                Ok(e(phase))
            }
            (Self::TableOnCyclic(v), State::Cyclic(s)) if (*s as usize) < v.len() => Ok(v[*s as usize]),
            (Self::Product(fs), State::Product(xs)) if fs.len() == xs.len() => {
                fs.iter().zip(xs).try_fold(Complex64::new(1.0, 0.0), |acc, (f, x)| Ok(acc * f.eval(x)?))
            }
            _ => Err(Error::invalid(format!("observable {self:?} cannot be evaluated at {x:?}"))),
        }
    }

    /// The ±1 observable on the two-point rotation.
    pub fn alternating() -> Self {
        Self::TableOnCyclic(vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)])
    }

    fn sup_norm(&self) -> f64 {
        match self {
            Self::CharacterOnTorus(_) => 1.0,
            Self::TableOnCyclic(v) => v.iter().map(|z| z.norm()).fold(0.0, f64::max),
            Self::Product(fs) => fs.iter().map(Self::sup_norm).product(),
        }
    }
}

fn check_n(n_max: u64, sieve: &FactorSieve) -> Result<()> {
    if n_max == 0 {
        return Err(Error::invalid("N must be at least 1"));
    }
    if n_max > sieve.limit() {
        return Err(Error::OutOfRange { n: n_max, limit: sieve.limit() });
    }
    Ok(())
}

/// [f(x), f(Tx), …, f(T^len x)].
pub fn orbit_table(sys: &AdditiveSystem, x: &State, f: &Observable, len: usize) -> Result<Vec<Complex64>> {
    sys.check_state(x)?;
    sys.check_observable(f)?;
    let mut out = Vec::with_capacity(len + 1);
    let mut y = x.clone();
    out.push(f.eval(&y)?);
    for _ in 0..len {
        y = sys.step(&y);
        out.push(f.eval(&y)?);
    }
    Ok(out)
}

/// 𝔼_{n∈[N]} f(Tⁿx), iterating the step map.
pub fn additive_orbit_average(sys: &AdditiveSystem, x: &State, f: &Observable, n_max: u64) -> Result<Complex64> {
    if n_max == 0 {
        return Err(Error::invalid("N must be at least 1"));
    }
    sys.check_state(x)?;
    sys.check_observable(f)?;
    let mut acc = crate::sum::ComplexSum::new();
    let mut y = x.clone();
    for _ in 0..n_max {
        y = sys.step(&y);
        acc.add(f.eval(&y)?);
    }
    Ok(acc.value() / n_max as f64)
}

/// 𝔼_{n∈[N]} f(T^{Ω(n)}x), indexing a precomputed orbit table by Ω(n).
pub fn omega_orbit_average(
    sys: &AdditiveSystem,
    x: &State,
    f: &Observable,
    n_max: u64,
    sieve: &FactorSieve,
) -> Result<Complex64> {
    weighted_omega_average(sys, x, f, |_| Complex64::new(1.0, 0.0), n_max, sieve)
}

/// 𝔼_{n∈[N]} w(n)·f(T^{Ω(n)}x).
pub fn weighted_omega_average<W>(
    sys: &AdditiveSystem,
    x: &State,
    f: &Observable,
    w: W,
    n_max: u64,
    sieve: &FactorSieve,
) -> Result<Complex64>
where
    W: Fn(u64) -> Complex64 + Sync,
{
    check_n(n_max, sieve)?;
    // Ω(n) ≤ log₂ n
    let table = orbit_table(sys, x, f, 64 - n_max.leading_zeros() as usize)?;
    let bad = std::sync::atomic::AtomicBool::new(false);
    let avg = mean(n_max, |n| {
        let wn = w(n);
        if wn.norm() > BOUND_TOL {
            bad.store(true, std::sync::atomic::Ordering::Relaxed);
        }
        wn * table[sieve.big_omega_unchecked(n) as usize]
    });
    if bad.into_inner() {
        return Err(Error::invalid("weight is not bounded by 1 in modulus"));
    }
    Ok(avg)
}

/// Orbit tables longer than this are not built; larger exponents jump.
const MAX_TABLE: u64 = 1 << 20;

/// 𝔼_{n∈[N]} f(T^{a(n)}x) for a completely additive a.
pub fn additive_fn_orbit_average(
    sys: &AdditiveSystem,
    x: &State,
    f: &Observable,
    a: &AdditiveFunctionSpec,
    n_max: u64,
    sieve: &FactorSieve,
) -> Result<Complex64> {
    check_n(n_max, sieve)?;
    sys.check_state(x)?;
    sys.check_observable(f)?;
    let eval_a = |n: u64| sieve.factors_unchecked(n).map(|(p, e)| e as u64 * a.value_at_prime(p)).sum::<u64>();
    let max_value = a.assignments.iter().map(|&(_, v)| v).chain([a.default]).max().unwrap_or(0);
    let bound = max_value.saturating_mul(64 - n_max.leading_zeros() as u64);
    if bound <= MAX_TABLE {
        let table = orbit_table(sys, x, f, bound as usize)?;
        return Ok(mean(n_max, |n| table[eval_a(n) as usize]));
    }
    if contains_affine(sys) {
        return Err(Error::Unsupported(format!(
            "affine orbits up to exponent {bound} are not tabulated; reduce the values of a"
        )));
    }
    Ok(mean(n_max, |n| f.eval(&sys.power(x, eval_a(n))).unwrap_or_default()))
}

fn contains_affine(sys: &AdditiveSystem) -> bool {
    match sys {
        AdditiveSystem::UnipotentAffine { .. } => true,
        AdditiveSystem::Product(ss) => ss.iter().any(contains_affine),
        _ => false,
    }
}

/// ∫ f dµ for the Haar/uniform measure of a uniquely ergodic built-in system.
pub fn invariant_mean(sys: &AdditiveSystem, f: &Observable) -> Result<Complex64> {
    sys.check_observable(f)?;
    if !sys.appears_uniquely_ergodic() {
        return Err(Error::Unsupported(format!("{sys:?} is not recognised as uniquely ergodic")));
    }
    Ok(haar_mean(f))
}

fn haar_mean(f: &Observable) -> Complex64 {
    match f {
        Observable::TableOnCyclic(v) => v.iter().sum::<Complex64>() / v.len() as f64,
        Observable::CharacterOnTorus(h) => {
            if h.iter().all(|&c| c == 0) {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }
        Observable::Product(fs) => fs.iter().map(haar_mean).product(),
    }
}

/// Σ coeffs[i]·tⁱ by Horner's rule.
pub fn poly_eval(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

/// Coefficients of q(t+1) − q(t), lowest degree first.
fn forward_difference(q: &[f64]) -> Vec<f64> {
    let k = q.len();
    let mut out = vec![0.0; k.saturating_sub(1)];
    // (t+1)^i − t^i = Σ_{j<i} C(i,j) t^j
    for (i, &c) in q.iter().enumerate() {
        let mut binom = 1.0;
        for j in 0..i {
            out[j] += c * binom;
            binom = binom * (i - j) as f64 / (j + 1) as f64;
        }
    }
    out
}

/// The unipotent affine system on 𝕋ᵏ, its starting point and an observable
/// with f(Tⁿx) = e(h·Q(n)), for Q(t) = Σ coeffs[i]·tⁱ of degree k.
///
/// With p_k = Q and p_{i−1}(t) = p_i(t+1) − p_i(t), the map is
/// (x₁, …, x_k) ↦ (x₁ + k!·c_k, x₂ + x₁, …, x_k + x_{k−1}) started at
/// (p₁(0), …, p_k(0)). A constant Q gives the one-point system.
pub fn polynomial_orbit_system(coeffs: &[f64], h: i64) -> Result<(AdditiveSystem, State, Observable)> {
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::invalid("polynomial coefficients must be finite"));
    }
    let k = coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0);
    if k == 0 {
        let c0 = coeffs.first().copied().unwrap_or(0.0);
        return Ok((
            AdditiveSystem::Cyclic { m: 1 },
            State::Cyclic(0),
            Observable::TableOnCyclic(vec![e(frac(h as f64 * c0))]),
        ));
    }
    // polys[i] = p_{i+1}
    let mut polys = vec![coeffs[..=k].to_vec()];
    for _ in 1..k {
        let next = forward_difference(polys.last().unwrap());
        polys.push(next);
    }
    polys.reverse();
    let increment = forward_difference(&polys[0])[0];
    let start: Vec<f64> = polys.iter().map(|p| frac(p[0])).collect();
    let mut a = vec![vec![0i64; k]; k];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = 1;
        if i > 0 {
            row[i - 1] = 1;
        }
    }
    let mut b = vec![0.0; k];
    b[0] = increment;
    let mut freq = vec![0i64; k];
    freq[k - 1] = h;
    Ok((AdditiveSystem::unipotent_affine(a, b)?, State::Torus(start), Observable::CharacterOnTorus(freq)))
}

/// Σ_{i=0}^{K} 2^{−(i+1)} g(y + iα).
pub fn nu2_limit_series<G: Fn(f64) -> Complex64>(g: G, y: f64, alpha: f64, k: u32) -> Complex64 {
    let mut acc = crate::sum::ComplexSum::new();
    let mut w = 0.5;
    for i in 0..=k {
        acc.add(w * g(frac(y + frac(i as f64 * alpha))));
        w *= 0.5;
    }
    acc.value()
}

/// A multiplicative system (Y, S).
#[derive(Debug, Clone, PartialEq)]
pub enum MultiplicativeSystem {
    /// Sₙ = T^{a(n)}.
    DerivedAdditive { base: AdditiveSystem, a: AdditiveFunctionSpec },
    /// Sₙ θ = θ + arg b(n)/2π on 𝕋.
    MultiplicativeRotation(MultiplicativeFunctionSpec),
    /// Sₙ y = y + ν₂(n)α on 𝕋.
    NuTwoRotation { alpha: f64 },
    Product(Vec<MultiplicativeSystem>),
}

/// Known ergodic behaviour of a built-in multiplicative system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErgodicityClass {
    /// Finitely generated and strongly uniquely ergodic.
    FinitelyGeneratedStronglyUniquelyErgodic,
    /// Finitely generated; strong unique ergodicity fails or is not known.
    FinitelyGenerated,
    /// Not decided.
    Unknown,
}

fn angle(z: Complex64) -> f64 {
    frac(z.arg() / std::f64::consts::TAU)
}

impl MultiplicativeSystem {
    /// Checks that `y` is a point of the state space.
    pub fn check_state(&self, y: &State) -> Result<()> {
        match (self, y) {
            (Self::DerivedAdditive { base, .. }, _) => base.check_state(y),
            (Self::MultiplicativeRotation(_) | Self::NuTwoRotation { .. }, State::Torus(t)) if t.len() == 1 => Ok(()),
            (Self::Product(ss), State::Product(ys)) if ss.len() == ys.len() => {
                ss.iter().zip(ys).try_for_each(|(s, y)| s.check_state(y))
            }
            _ => Err(Error::invalid(format!("state {y:?} does not belong to {self:?}"))),
        }
    }

    pub fn check_observable(&self, g: &Observable) -> Result<()> {
        match (self, g) {
            (Self::DerivedAdditive { base, .. }, _) => base.check_observable(g),
            (Self::MultiplicativeRotation(_) | Self::NuTwoRotation { .. }, Observable::CharacterOnTorus(h))
                if h.len() == 1 =>
            {
                Ok(())
            }
            (Self::Product(ss), Observable::Product(gs)) if ss.len() == gs.len() => {
                ss.iter().zip(gs).try_for_each(|(s, g)| s.check_observable(g))
            }
            _ => Err(Error::invalid(format!("observable {g:?} does not fit {self:?}"))),
        }
    }

    /// Sₙy, from the factorization of n (n must lie within the sieve).
    pub fn apply(&self, n: u64, y: &State, sieve: &FactorSieve) -> Result<State> {
        if n == 0 {
            return Err(Error::invalid("S_n is defined for n >= 1"));
        }
        if n > sieve.limit() {
            return Err(Error::OutOfRange { n, limit: sieve.limit() });
        }
        Ok(self.apply_unchecked(n, y, sieve))
    }

    fn apply_unchecked(&self, n: u64, y: &State, sieve: &FactorSieve) -> State {
        match (self, y) {
            (Self::DerivedAdditive { base, a }, _) => {
                let k: u64 = sieve.factors_unchecked(n).map(|(p, e)| e as u64 * a.value_at_prime(p)).sum();
                base.power(y, k)
            }
            (Self::MultiplicativeRotation(b), State::Torus(t)) => {
                let shift: f64 = sieve.factors_unchecked(n).map(|(p, e)| frac(e as f64 * angle(b.value_at_prime(p)))).sum();
                State::Torus(vec![frac(t[0] + shift)])
            }
            (Self::NuTwoRotation { alpha }, State::Torus(t)) => {
                let v = n.trailing_zeros() as f64;
                State::Torus(vec![frac(t[0] + frac(v * alpha))])
            }
            (Self::Product(ss), State::Product(ys)) => {
                State::Product(ss.iter().zip(ys).map(|(s, y)| s.apply_unchecked(n, y, sieve)).collect())
            }
            _ => panic!("state does not match system; call check_state first"),
        }
    }

    /// Label of the map S_p; primes with equal keys act identically.
    pub fn generator_key(&self, p: u64) -> Vec<usize> {
        match self {
            Self::DerivedAdditive { a, .. } => vec![a.class_of(p)],
            Self::MultiplicativeRotation(b) => vec![b.class_of(p)],
            Self::NuTwoRotation { .. } => vec![usize::from(p != 2)],
            Self::Product(ss) => ss.iter().flat_map(|s| s.generator_key(p)).collect(),
        }
    }

    pub fn ergodicity_class(&self) -> ErgodicityClass {
        match self {
            Self::DerivedAdditive { base, a } if base.appears_uniquely_ergodic() => {
                if a.assignments.is_empty() && a.default == 1 {
                    // T^Ω: uniquely ergodic T gives a strongly uniquely ergodic S
                    ErgodicityClass::FinitelyGeneratedStronglyUniquelyErgodic
                } else {
                    ErgodicityClass::FinitelyGenerated
                }
            }
            Self::DerivedAdditive { .. } | Self::Product(_) => ErgodicityClass::Unknown,
            Self::MultiplicativeRotation(_) | Self::NuTwoRotation { .. } => ErgodicityClass::FinitelyGenerated,
        }
    }
}

/// Σ 1/p and the smallest member, for each class of primes that share a
/// generator map S_p, over p ≤ sieve limit.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorDiagnostic {
    pub key: Vec<usize>,
    pub smallest_prime: u64,
    pub prime_count: u64,
    pub reciprocal_sum: f64,
}

pub fn generator_diagnostics(msys: &MultiplicativeSystem, sieve: &FactorSieve) -> Vec<GeneratorDiagnostic> {
    let mut map: BTreeMap<Vec<usize>, GeneratorDiagnostic> = BTreeMap::new();
    for p in sieve.primes() {
        let key = msys.generator_key(p);
        let entry = map.entry(key.clone()).or_insert(GeneratorDiagnostic {
            key,
            smallest_prime: p,
            prime_count: 0,
            reciprocal_sum: 0.0,
        });
        entry.prime_count += 1;
        entry.reciprocal_sum += 1.0 / p as f64;
    }
    map.into_values().collect()
}

/// 𝔼_{n∈[N]} g(Sₙy).
pub fn multiplicative_orbit_average(
    msys: &MultiplicativeSystem,
    y: &State,
    g: &Observable,
    n_max: u64,
    sieve: &FactorSieve,
) -> Result<Complex64> {
    check_n(n_max, sieve)?;
    msys.check_state(y)?;
    msys.check_observable(g)?;
    if g.sup_norm() > BOUND_TOL {
        return Err(Error::invalid("observable is not bounded by 1 in modulus"));
    }
    let total = sum_range(1, n_max, |n| g.eval(&msys.apply_unchecked(n, y, sieve)).unwrap_or_default());
    Ok(total / n_max as f64)
}

/// Distance between two states: 0/1 on cyclic coordinates, the mod-1
/// distance on torus coordinates, the maximum over products.
pub fn state_distance(x: &State, y: &State) -> f64 {
    match (x, y) {
        (State::Cyclic(a), State::Cyclic(b)) => f64::from(u8::from(a != b)),
        (State::Torus(a), State::Torus(b)) if a.len() == b.len() => a
            .iter()
            .zip(b)
            .map(|(u, v)| {
                let d = frac(u - v);
                d.min(1.0 - d)
            })
            .fold(0.0, f64::max),
        (State::Product(a), State::Product(b)) if a.len() == b.len() => {
            a.iter().zip(b).map(|(u, v)| state_distance(u, v)).fold(0.0, f64::max)
        }
        _ => f64::INFINITY,
    }
}

/// ν₂(n)α via the p-adic valuation, for callers outside the sieve range.
pub fn nu2_shift(n: u64, alpha: f64) -> Result<f64> {
    Ok(frac(padic_valuation(n, 2)? as f64 * alpha))
}
