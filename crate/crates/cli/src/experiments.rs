//! The experiment registry.
//!
//! Every experiment declares its keys with defaults, turns them into
//! measurements (estimate, target, optional tolerance) on an N grid, and
//! never prints; notes are returned with the outcome.

use std::collections::BTreeMap;
use std::sync::Arc;

use ergolab::arith::{AdditiveFunctionSpec, FactorSieve, MultiplicativeFunctionSpec, PrimeSet};
use ergolab::averaging::{coprimality_measure, dilation_defect, gcd, tk_l2_discrepancy, zeta};
use ergolab::correlations::{
    aperiodicity_defect, besicovitch_mean, independence_defect, katai_table, linear_phase_omega_defect,
    local_aperiodicity_defect, mean_value, progression_omega_average, ArithmeticSequence, TrigPolynomial,
};
use ergolab::dynsys::{
    additive_fn_orbit_average, generator_diagnostics, invariant_mean, multiplicative_orbit_average, nu2_limit_series,
    omega_orbit_average, orbit_table, polynomial_orbit_system, weighted_omega_average, AdditiveSystem, ErgodicityClass,
};
use ergolab::equidist::{beatty_density, joint_torus_defect, residue_density, star_discrepancy_counts};
use ergolab::gp::{gp_equidistribution_compare, parse_gp};
use ergolab::prime_sets::{
    block_comparison_defect, construct_matched_blocks_shifted, construct_matched_blocks_within, primes_up_to,
    verify_matched_blocks,
};
use ergolab::sum::{mean, ComplexSum};
use ergolab::{e, frac, small_denominator, Complex64};

use crate::cache::SieveCache;
use crate::config::ExperimentConfig;
use crate::report::{ExperimentReport, ReportRow};
use crate::systems::{parse_multiplicative, parse_system};
use crate::values::{parse_count, parse_grid, parse_rational, parse_real, parse_reals};
use crate::{CliError, CliResult};

/// A declared parameter. `default: None` marks a required key.
#[derive(Debug, Clone, Copy)]
pub struct Key {
    pub name: &'static str,
    pub default: Option<&'static str>,
    pub help: &'static str,
}

const fn key(name: &'static str, default: &'static str, help: &'static str) -> Key {
    Key { name, default: Some(default), help }
}

type RunFn = fn(&Params, &mut SieveCache) -> CliResult<Measurements>;

pub struct ExperimentInfo {
    pub name: &'static str,
    /// The statement the experiment tests.
    pub statement: &'static str,
    pub keys: &'static [Key],
    run: RunFn,
}

/// One measured quantity at one scale.
#[derive(Debug, Clone, PartialEq)]
pub struct Measured {
    pub quantity: String,
    pub n: u64,
    pub estimate: Complex64,
    pub target: Complex64,
    pub tolerance: Option<f64>,
}

#[derive(Debug, Default)]
pub struct Measurements {
    pub rows: Vec<Measured>,
    pub notes: Vec<String>,
}

impl Measurements {
    fn push(&mut self, quantity: impl Into<String>, n: u64, estimate: Complex64, target: Complex64, tol: Option<f64>) {
        self.rows.push(Measured { quantity: quantity.into(), n, estimate, target, tolerance: tol });
    }

    fn push_real(&mut self, quantity: impl Into<String>, n: u64, estimate: f64, target: f64, tol: Option<f64>) {
        self.push(quantity, n, re(estimate), re(target), tol);
    }
}

/// A tolerance check from an experiment with `--accept`.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub quantity: String,
    pub n: u64,
    pub defect: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub report: ExperimentReport,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl Outcome {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Effective parameters: declared defaults overlaid with the given values.
pub struct Params {
    values: BTreeMap<String, String>,
}

impl Params {
    fn get(&self, k: &str) -> &str {
        self.values.get(k).map(String::as_str).unwrap_or("")
    }

    fn real(&self, k: &str) -> CliResult<f64> {
        parse_real(self.get(k)).map_err(|e| context(k, e))
    }

    fn count(&self, k: &str) -> CliResult<u64> {
        parse_count(self.get(k)).map_err(|e| context(k, e))
    }

    fn grid(&self, k: &str) -> CliResult<Vec<u64>> {
        let mut g = parse_grid(self.get(k)).map_err(|e| context(k, e))?;
        g.sort_unstable();
        g.dedup();
        Ok(g)
    }

    fn reals(&self, k: &str) -> CliResult<Vec<f64>> {
        parse_reals(self.get(k)).map_err(|e| context(k, e))
    }

    /// The comma-separated entries of `k` as written, with their values.
    fn labelled_reals(&self, k: &str) -> CliResult<Vec<(String, f64)>> {
        self.get(k)
            .split(',')
            .map(|s| Ok((s.trim().to_string(), parse_real(s.trim()).map_err(|e| context(k, e))?)))
            .collect()
    }

    /// `key=value;...` in key order, N excluded (it has its own column).
    fn echo(&self) -> String {
        self.values.iter().filter(|(k, _)| k.as_str() != "N").map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
    }
}

fn context(k: &str, e: CliError) -> CliError {
    match e {
        CliError::Usage(m) => CliError::Usage(format!("{k}: {m}")),
        other => other,
    }
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn zero() -> Complex64 {
    re(0.0)
}

/// Tolerance attached to scale n, if the table lists it.
fn tol_at(n: u64, table: &[(u64, f64)]) -> Option<f64> {
    table.iter().find(|&&(m, _)| m == n).map(|&(_, t)| t)
}

const E6: u64 = 1_000_000;
const E7: u64 = 10_000_000;

/// Convergence thresholds for uniquely ergodic systems along Ω.
pub const THEOREM_A_THRESHOLDS: [(u64, f64); 4] = [(10_000, 0.2), (100_000, 0.1), (E6, 0.05), (E7, 0.02)];

fn sieve_for(cache: &mut SieveCache, grid: &[u64]) -> CliResult<Arc<FactorSieve>> {
    cache.get(grid.iter().copied().max().unwrap_or(2))
}

/// Counts of Ω(n) = k over n ≤ N, for k < 64.
fn omega_histogram(sieve: &FactorSieve, n: u64) -> CliResult<Vec<u64>> {
    Ok(residue_density(|k| sieve.big_omega_unchecked(k) as u64, n, 64)?.class_counts)
}

fn liouville(sieve: &FactorSieve, n: u64) -> Complex64 {
    re(sieve.liouville_unchecked(n) as f64)
}

/// Completely multiplicative functions by name: `liouville`, `mod4`
/// (−1 at primes ≡ 3 mod 4, else 1) or `rot:θ` (e(θ) at every prime).
fn multiplicative_spec(text: &str) -> CliResult<MultiplicativeFunctionSpec> {
    let one = re(1.0);
    let spec = match text.trim() {
        "liouville" => MultiplicativeFunctionSpec::liouville(),
        "mod4" => MultiplicativeFunctionSpec::new(vec![(PrimeSet::residue(3, 4)?, re(-1.0))], one)?,
        other => match other.strip_prefix("rot:") {
            Some(t) => MultiplicativeFunctionSpec::new(vec![], e(frac(parse_real(t)?)))?,
            None => return Err(CliError::Usage(format!("b: '{other}' must be liouville, mod4 or rot:<theta>"))),
        },
    };
    Ok(spec)
}

fn has_irrational_nonconstant(coeffs: &[f64]) -> bool {
    coeffs.iter().skip(1).any(|&c| small_denominator(c, 10_000, 1e-9).is_none())
}

// ---------------------------------------------------------------------------
// experiments

fn run_pnt(p: &Params, cache: &mut SieveCache) -> CliResult<Measurements> {
    let grid = p.grid("N")?;
    let sieve = sieve_for(cache, &grid)?;
    let mut out = Measurements::default();
    for &n in &grid {
        let est = mean(n, |k| liouville(&sieve, k));
        out.push("mean_liouville", n, est, zero(), tol_at(n, &[(E6, 0.01), (E7, 0.005)]));
    }
    Ok(out)
}

fn run_pillai_selberg(p: &Params, cache: &mut SieveCache) -> CliResult<Measurements> {
    let grid = p.grid("N")?;
    let moduli = p.grid("m")?;
    let sieve = sieve_for(cache, &grid)?;
    let mut out = Measurements::default();
    for &n in &grid {
        let hist = omega_histogram(&sieve, n)?;
        for &m in &moduli {
            let mut counts = vec![0u64; m as usize];
            for (k, &c) in hist.iter().enumerate() {
                counts[k % m as usize] += c;
            }
            for (r, &c) in counts.iter().enumerate() {
                let d = c as f64 / n as f64;
                out.push_real(format!("density_r{r}_mod{m}"), n, d, 1.0 / m as f64, tol_at(n, &[(E7, 0.01)]));
            }
        }
    }
    Ok(out)
}

fn run_erdos_delange(p: &Params, cache: &mut SieveCache) -> CliResult<Measurements> {
    let grid = p.grid("N")?;
    let alpha = p.real("alpha")?;
    let h_max = p.count("H")?;
    let beatty = p.real("beatty")?;
    let beta = p.real("beta")?;
    let sieve = sieve_for(cache, &grid)?;
    let mut out = Measurements::default();
    for &n in &grid {
        let hist = omega_histogram(&sieve, n)?;
        for h in 1..=h_max {
            let mut acc = ComplexSum::new();
            for (k, &c) in hist.iter().enumerate() {
                acc.add(c as f64 * e(frac(h as f64 * frac(k as f64 * alpha))));
            }
            out.push(format!("weyl_h{h}"), n, acc.value() / n as f64, zero(), tol_at(n, &[(E7, 0.03)]));
        }
        let samples: Vec<(f64, u64)> =
            hist.iter().enumerate().filter(|&(_, &c)| c > 0).map(|(k, &c)| (frac(k as f64 * alpha), c)).collect();
        let d = star_discrepancy_counts(&samples)?;
        out.push_real("star_discrepancy", n, d, 0.0, tol_at(n, &[(E7, 0.05)]));
        let b = beatty_density(|k| sieve.big_omega_unchecked(k) as u64, n, beatty, beta)?;
        out.push_real("beatty_density", n, b, 1.0 / beatty, tol_at(n, &[(E7, 0.02)]));
    }
    Ok(out)
}

fn run_gelfond_omega(p: &Params, cache: &mut SieveCache) -> CliResult<Measurements> {
    let grid = p.grid("N")?;
    let q = p.count("q")?;
    let m = p.count("m")?;
    if q < 2 || m < 1 {
        return Err(CliError::Usage("need q >= 2 and m >= 1".into()));
    }
    let hypothesis = gcd(m, q - 1) == 1;
    let sieve = sieve_for(cache, &grid)?;
    let mut out = Measurements::default();
    if !hypothesis {
        out.notes.push(format!("gcd(m, q-1) = {} > 1: outside the hypothesis, no tolerance applied", gcd(m, q - 1)));
    }
    for &n in &grid {
        let hist = omega_histogram(&sieve, n)?;
        let mut counts = vec![0u64; m as usize];
        for (k, &c) in hist.iter().enumerate() {
            counts[(ergolab::arith::digit_sum(k as u64, q)? % m) as usize] += c;
        }
        for (r, &c) in counts.iter().enumerate() {
            let tol = if hypothesis { tol_at(n, &[(E7, 0.01)]) } else { None };
            out.push_real(format!("density_r{r}"), n, c as f64 / n as f64, 1.0 / m as f64, tol);
        }
    }
    Ok(out)
}

fn k_free_density(sieve: &FactorSieve, n: u64, k: u32) -> f64 {
    mean(n, |j| re(f64::from(u8::from(sieve.is_k_free(j, k).unwrap_or(false))))).re
}

fn run_squarefree(p: &Params, cache: &mut SieveCache) -> CliResult<Measurements> {
    let grid = p.grid("N")?;
    let sieve = sieve_for(cache, &grid)?;
    let two = AdditiveSystem::cyclic(2)?;
    let alt = ergolab::dynsys::Observable::alternating();
    let x = ergolab::dynsys::State::Cyclic(0);
    let mut out = Measurements::default();
    for &n in &grid {
        out.push_real("density_squarefree", n, k_free_density(&sieve, n, 2), 1.0 / zeta(2)?, tol_at(n, &[(E7, 0.001)]));
        // (−1)^Ω weighted by the squarefree indicator is µ
        let w = |j: u64| re(f64::from(u8::from(sieve.is_k_free(j, 2).unwrap_or(false))));
        let mu = weighted_omega_average(&two, &x, &alt, w, n, &sieve)?;
        out.push("mean_moebius", n, mu, zero(), tol_at(n, &[(E7, 0.01)]));
    }
    Ok(out)
}

fn run_kfree(p: &Params, cache: &mut SieveCache) -> CliResult<Measurements> {
    let grid = p.grid("N")?;
    let k = p.count("k")?;
    if !(2..=64).contains(&k) {
        return Err(CliError::Usage("k must lie in [2, 64]".into()));
    }
    let sieve = sieve_for(cache, &grid)?;
    let mut out = Measurements::default();
    for &n in &grid {
        let d = k_free_density(&sieve, n, k as u32);
        out.push_real(format!("density_{k}free"), n, d, 1.0 / zeta(k as u32)?, tol_at(n, &[(E7, 0.003)]));
    }
    Ok(out)
}

fn run_omega_small(p: &Params, cache: &mut SieveCache) -> CliResult<Measurements> {
    let grid = p.grid("N")?;
    let sieve = sieve_for(cache, &grid)?;
    let mut out = Measurements::default();
    for &n in &grid {
        let est = mean(n, |j| re(if sieve.small_omega(j).unwrap_or(0) % 2 == 0 { 1.0 } else { -1.0 }));
        out.push("mean_minus1_pow_small_omega", n, est, zero(), tol_at(n, &[(E7, 0.03)]));
    }
    Ok(out)
}

fn run_wirsing_lambda_q(p: &Params, cache: &mut SieveCache) -> CliResult<Measurements> {
    let grid = p.grid("N")?;
    let set = PrimeSet::residue(p.count("residue")?, p.count("modulus")?)?;
    let sieve = sieve_for(cache, &grid)?;
    let spec = AdditiveFunctionSpec::restricted(set);
    let sys = AdditiveSystem::cyclic(2)?;
    let f = ergolab::dynsys::Observable::alternating();
    let x = ergolab::dynsys::State::Cyclic(0);
    let mut out = Measurements::default();
    for &n in &grid {
        let est = additive_fn_orbit_average(&sys, &x, &f, &spec, n, &sieve)?;
        out.push("mean_lambda_q", n, est, zero(), None);
    }
    Ok(out)
}

fn run_davenport(p: &Params, cache: &mut SieveCache) -> CliResult<Measurements> {
    let grid = p.grid("N")?;
    let alphas = p.labelled_reals("alpha")?;
    let sieve = sieve_for(cache, &grid)?;
    let mut out = Measurements::default();
    for &n in &grid {
        for (label, alpha) in &alphas {
            let est = mean(n, |k| e(frac(k as f64 * alpha)) * liouville(&sieve, k));
            out.push(format!("mean[alpha={label}]"), n, est, zero(), tol_at(n, &[(E7, 0.01)]));
        }
    }
    Ok(out)
}

fn run_linear_phase(p: &Params, cache: &mut SieveCache) -> CliResult<Measurements> {
    let grid = p.grid("N")?;
    let alphas = p.labelled_reals("alpha")?;
    let s = parse_system(p.get("system"), p.get("x"), p.get("f"))?;
    let sieve = sieve_for(cache, &grid)?;
    let mut out = Measurements::default();
    for &n in &grid {
        for (label, alpha) in &alphas {
            let target =
                if (alpha - alpha.round()).abs() <= 1e-12 { invariant_mean(&s.sys, &s.f)? } else { zero() };
            let d = linear_phase_omega_defect(*alpha, &s.sys, &s.x, &s.f, n, &sieve)?;
            out.push(format!("mean[alpha={label}]"), n, d + target, target, tol_at(n, &[(E7, 0.02)]));
        }
    }
    Ok(out)
}

fn run_daboussi(p: &Params, cache: &mut SieveCache) -> CliResult<Measurements> {
    let grid = p.grid("N")?;
    let alphas = p.labelled_reals("alpha")?;
    let b = multiplicative_spec(p.get("b"))?;
    let sieve = sieve_for(cache, &grid)?;
    let mut out = Measurements::default();
    for &n in &grid {
        for (label, alpha) in &alphas {
            let est = mean(n, |k| {
                e(frac(k as f64 * alpha)) * sieve.completely_multiplicative_eval(&b, k).unwrap_or_default()
            });
            out.push(format!("mean[alpha={label}]"), n, est, zero(), None);
        }
    }
    Ok(out)
}

fn run_matched_blocks(p: &Params, cache: &mut SieveCache) -> CliResult<Measurements> {
    let grid = p.grid("N")?;
    let eps = p.real("eps")?;
    let rho = p.real("rho")?;
    let shift: i32 = p.get("shift").trim().parse().map_err(|_| CliError::Usage("shift: expected -1, 0 or 1".into()))?;
    let cap = p.count("cap")?;
    let sieve = cache.get(cap.max(grid.iter().copied().max().unwrap_or(2)))?;
    let blocks = match p.get("mode") {
        "strict" => construct_matched_blocks_shifted(eps, rho, shift, &sieve)?,
        "bounded" => construct_matched_blocks_within(eps, rho, shift, &sieve, cap)?,
        other => return Err(CliError::Usage(format!("mode: '{other}' must be strict or bounded"))),
    };
    let v = verify_matched_blocks(&blocks)?;
    let mut out = Measurements::default();
    let flag = |b: bool| f64::from(u8::from(b));
    let exact = Some(0.0);
    out.push_real("property_a", cap, flag(v.property_a()), 1.0, exact);
    out.push_real("property_b", cap, flag(v.buckets_match), 1.0, exact);
    out.push_real("measure_b1", cap, v.measure_b1, 0.0, Some(eps));
    out.push_real("measure_b2", cap, v.measure_b2, 0.0, Some(eps));
    out.push_real("verifier", cap, flag(v.all_pass()), 1.0, exact);
    for &n in &grid {
        let d = block_comparison_defect(|k| liouville(&sieve, k), &blocks, n)?;
        out.push_real("comparison_defect", n, d, 0.0, Some(3.0 * eps + 0.05));
    }
    out.notes.push(format!("|b1| = {}, |b2| = {}, max element {}", blocks.b1.len(), blocks.b2.len(), {
        blocks.b1.iter().chain(&blocks.b2).max().copied().unwrap_or(0)
    }));
    if let Some(t) = blocks.trace {
        out.notes.push(format!(
            "construction: j0 = {}, s = {}, t = {}, reciprocal sums {:.4} and {:.4}",
            t.j0, t.s, t.t, t.p1_reciprocal_sum, t.p2_reciprocal_sum
        ));
    }
    Ok(out)
}

/// Fixed roster of small sets in [2, 50].
pub const TK_ROSTER: [&[u64]; 20] = [
    &[2],
    &[3],
    &[2, 3],
    &[2, 4],
    &[5, 7],
    &[2, 3, 5],
    &[2, 3, 5, 7],
    &[6, 10, 15],
    &[4, 6, 9],
    &[2, 4, 8, 16],
    &[11, 13, 17, 19],
    &[12, 18, 24, 36],
    &[30, 42],
    &[23, 29, 31, 37],
    &[41, 43, 47],
    &[2, 50],
    &[25, 35, 49],
    &[3, 9, 27],
    &[14, 21, 33, 45],
    &[16, 32, 48],
];

fn run_tk_identity(p: &Params, _cache: &mut SieveCache) -> CliResult<Measurements> {
    let grid = p.grid("N")?;
    let sets: Vec<Vec<u64>> = match p.get("sets").trim() {
        "" => TK_ROSTER.iter().map(|s| s.to_vec()).collect(),
        text => text
            .split('|')
            .map(|s| s.split_whitespace().map(parse_count).collect::<CliResult<Vec<u64>>>())
            .collect::<CliResult<_>>()?,
    };
    let mut out = Measurements::default();
    for &n in &grid {
        for b in &sets {
            let label = b.iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
            let est = tk_l2_discrepancy(b, n)?;
            let target = coprimality_measure(b)?;
            out.push_real(format!("B={{{label}}}"), n, est, target, tol_at(n, &[(E6, 0.01)]));
        }
    }
    Ok(out)
}

fn run_dilation(p: &Params, cache: &mut SieveCache) -> CliResult<Measurements> {
    let grid = p.grid("N")?;
    let b = primes_up_to(p.count("bmax")?)?;
    if b.is_empty() {
        return Err(CliError::Usage("bmax: no primes below it".into()));
    }
    let bound = coprimality_measure(&b)?.sqrt();
    let sieve = sieve_for(cache, &grid)?;
    let mut out = Measurements::default();
    for &n in &grid {
        let d = dilation_defect(|k| liouville(&sieve, k), &b, n)?;
        out.push_real("dilation_defect", n, d, 0.0, tol_at(n, &[(E7, bound + 0.02)]));
    }
    out.notes.push(format!("square root of the coprimality measure: {bound:.6}"));
    Ok(out)
}

fn run_nu2(p: &Params, cache: &mut SieveCache) -> CliResult<Measurements> {
    let grid = p.grid("N")?;
    let alpha = p.real("alpha")?;
    let y = p.real("y")?;
    let k = p.count("K")?;
    let (msys, state, g) = parse_multiplicative(&format!("nu2:{alpha}"), &y.to_string(), "")?;
    let sieve = sieve_for(cache, &grid)?;
    let target = nu2_limit_series(e, frac(y), frac(alpha), k as u32);
    let mut out = Measurements::default();
    for &n in &grid {
        let est = multiplicative_orbit_average(&msys, &state, &g, n, &sieve)?;
        out.push("orbit_mean_vs_series", n, est, target, tol_at(n, &[(E6, 2e-3)]));
    }
    out.notes.push(format!(
        "the Haar integral of g is 0; the limit differs from it by {:.6}",
        target.norm()
    ));
    Ok(out)
}

fn run_idempotency(p: &Params, cache: &mut SieveCache) -> CliResult<Measurements> {
    let grid = p.grid("N")?;
    let prime = p.count("p")?;
    let (msys, y, g) = parse_multiplicative(p.get("msys"), p.get("y"), p.get("g"))?;
    let sieve = cache.get(grid.iter().copied().max().unwrap_or(2).max(prime))?;
    let bounded = msys.ergodicity_class() == ErgodicityClass::FinitelyGeneratedStronglyUniquelyErgodic;
    let mut out = Measurements::default();
    for &n in &grid {
        let d = ergolab::correlations::idempotency_defect(&msys, prime, &y, &g, n, &sieve)?;
        let tol = if bounded { tol_at(n, &[(E7, 0.02)]) } else { None };
        out.push_real(format!("defect_p{prime}"), n, d, 0.0, tol);
    }
    let key = msys.generator_key(prime);
    for diag in generator_diagnostics(&msys, &sieve) {
        if diag.key == key {
            out.notes.push(format!(
                "generator of p = {prime}: {} primes up to {}, reciprocal sum {:.4}",
                diag.prime_count,
                sieve.limit(),
                diag.reciprocal_sum
            ));
        }
    }
    if !bounded {
        out.notes.push("no bound asserted: the generator's reciprocal sum is not known to diverge".into());
    }
    Ok(out)
}

fn run_katai(p: &Params, cache: &mut SieveCache) -> CliResult<Measurements> {
    let grid = p.grid("N")?;
    let alpha = p.real("alpha")?;
    let primes = primes_up_to(p.count("pmax")?)?;
    let pmax = primes.last().copied().ok_or_else(|| CliError::Usage("pmax: no primes below it".into()))?;
    let top = grid.iter().copied().max().unwrap_or(1);
    let sieve = cache.get(pmax.checked_mul(top).unwrap_or(u64::MAX))?;
    let a = ArithmeticSequence::liouville(sieve).times(&ArithmeticSequence::linear_phase(alpha));
    let mut out = Measurements::default();
    for &n in &grid {
        let t = katai_table(&a, &primes, n)?;
        out.push_real("max_pair_correlation", n, t.max_off_diagonal(), 0.0, tol_at(n, &[(E6, 0.05)]));
        out.push("mean", n, t.mean, zero(), tol_at(n, &[(E6, 0.02)]));
    }
    Ok(out)
}

fn run_besicovitch(p: &Params, cache: &mut SieveCache) -> CliResult<Measurements> {
    let grid = p.grid("N")?;
    let terms = p
        .get("terms")
        .split(',')
        .map(|t| {
            let (c, a) = t.split_once(':').ok_or_else(|| CliError::Usage(format!("terms: '{t}' must be c:alpha")))?;
            Ok((re(parse_real(c.trim())?), parse_real(a.trim())?))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let poly = TrigPolynomial { terms };
    let s = parse_system(p.get("system"), p.get("x"), p.get("f"))?;
    let target = besicovitch_mean(&poly) * invariant_mean(&s.sys, &s.f)?;
    let sieve = sieve_for(cache, &grid)?;
    let mut out = Measurements::default();
    for &n in &grid {
        let table = orbit_table(&s.sys, &s.x, &s.f, 64 - n.leading_zeros() as usize)?;
        let est = mean(n, |k| poly.at(k) * table[sieve.big_omega_unchecked(k) as usize]);
        out.push("mean", n, est, target, None);
    }
    Ok(out)
}

fn run_joint_poly(p: &Params, cache: &mut SieveCache) -> CliResult<Measurements> {
    let grid = p.grid("N")?;
    let pc = p.reals("p")?;
    let qc = p.reals("q")?;
    let h = p.count("H")?;
    let sieve = sieve_for(cache, &grid)?;
    let mut out = Measurements::default();
    for &n in &grid {
        let j = joint_torus_defect(&pc, &qc, n, &sieve, h as u32)?;
        out.push_real("max_joint_weyl", n, j.max_modulus, 0.0, tol_at(n, &[(E7, 0.02)]));
        out.notes.push(format!("N = {n}: largest sum at (h1, h2) = {:?}", j.argmax));
    }
    Ok(out)
}

fn run_gp_compare(p: &Params, cache: &mut SieveCache) -> CliResult<Measurements> {
    let grid = p.grid("N")?;
    let expr = parse_gp(p.get("expr"))?;
    let h = p.count("H")?;
    let sieve = sieve_for(cache, &grid)?;
    let mut out = Measurements::default();
    for &n in &grid {
        let r = gp_equidistribution_compare(&expr, n, &sieve, h as u32)?;
        for w in &r.rows {
            out.push_real(format!("weyl_linear_h{}", w.h), n, w.linear, 0.0, None);
            out.push_real(format!("weyl_omega_h{}", w.h), n, w.omega, 0.0, None);
        }
        if r.flagged_linear > 0 || !r.flagged_omega_values.is_empty() {
            out.notes.push(format!(
                "N = {n}: {} near-boundary floors in Q(n), at Omega values {:?}",
                r.flagged_linear, r.flagged_omega_values
            ));
        }
    }
    Ok(out)
}

fn run_poly_omega(p: &Params, cache: &mut SieveCache) -> CliResult<Measurements> {
    let grid = p.grid("N")?;
    let coeffs = p.reals("coeffs")?;
    let h: i64 = p.get("h").trim().parse().map_err(|_| CliError::Usage("h: expected an integer".into()))?;
    if h == 0 || !has_irrational_nonconstant(&coeffs) {
        return Err(CliError::Usage(
            "need h != 0 and an irrational non-constant coefficient for an equidistributed Q(Omega(n))".into(),
        ));
    }
    let (sys, x, f) = polynomial_orbit_system(&coeffs, h)?;
    let sieve = sieve_for(cache, &grid)?;
    let mut out = Measurements::default();
    for &n in &grid {
        out.push("mean_phase", n, omega_orbit_average(&sys, &x, &f, n, &sieve)?, zero(), None);
    }
    Ok(out)
}

fn run_theorem_a(p: &Params, cache: &mut SieveCache) -> CliResult<Measurements> {
    let grid = p.grid("N")?;
    let s = parse_system(p.get("system"), p.get("x"), p.get("f"))?;
    let target = invariant_mean(&s.sys, &s.f)?;
    let sieve = sieve_for(cache, &grid)?;
    let mut out = Measurements::default();
    for &n in &grid {
        let est = omega_orbit_average(&s.sys, &s.x, &s.f, n, &sieve)?;
        out.push("omega_orbit_mean", n, est, target, tol_at(n, &THEOREM_A_THRESHOLDS));
    }
    Ok(out)
}

fn contains_affine(sys: &AdditiveSystem) -> bool {
    match sys {
        AdditiveSystem::UnipotentAffine { .. } => true,
        AdditiveSystem::Product(v) => v.iter().any(contains_affine),
        _ => false,
    }
}

fn run_sarnak(p: &Params, cache: &mut SieveCache) -> CliResult<Measurements> {
    let grid = p.grid("N")?;
    let s = parse_system(p.get("system"), p.get("x"), p.get("f"))?;
    let sieve = sieve_for(cache, &grid)?;
    let mut out = Measurements::default();
    for &n in &grid {
        let defect = if contains_affine(&s.sys) {
            // affine powers iterate, so walk the orbit once
            let (mut ab, mut a, mut b) = (ComplexSum::new(), ComplexSum::new(), ComplexSum::new());
            let mut y = s.x.clone();
            for k in 1..=n {
                y = s.sys.step(&y);
                let fa = s.f.eval(&y)?;
                let l = liouville(&sieve, k);
                ab.add(fa * l);
                a.add(fa);
                b.add(l);
            }
            let nf = n as f64;
            ab.value() / nf - (a.value() / nf) * (b.value() / nf)
        } else {
            let (sys, x, f) = (s.sys.clone(), s.x.clone(), s.f.clone());
            let orbit = ArithmeticSequence::new("orbit", 1.0, move |k| f.eval(&sys.power(&x, k)).unwrap_or_default());
            independence_defect(&orbit, &ArithmeticSequence::liouville(sieve.clone()), n)?
        };
        out.push("independence_defect", n, defect, zero(), tol_at(n, &[(E7, 0.02)]));
    }
    Ok(out)
}

fn run_mean_value(p: &Params, cache: &mut SieveCache) -> CliResult<Measurements> {
    let grid = p.grid("N")?;
    let b = multiplicative_spec(p.get("b"))?;
    let sieve = sieve_for(cache, &grid)?;
    let estimates: Vec<(u64, Complex64)> =
        grid.iter().map(|&n| Ok((n, mean_value(&b, n, &sieve)?))).collect::<CliResult<_>>()?;
    let (last_n, last) = *estimates.last().unwrap();
    let mut out = Measurements::default();
    let mut spread: f64 = 0.0;
    for (i, &(n, v)) in estimates.iter().enumerate() {
        out.push("mean", n, v, last, None);
        for &(_, w) in &estimates[..i] {
            spread = spread.max((v - w).norm());
        }
    }
    out.push_real("max_pairwise_difference", last_n, spread, 0.0, Some(0.02));
    Ok(out)
}

fn run_local_aperiodicity(p: &Params, cache: &mut SieveCache) -> CliResult<Measurements> {
    let grid = p.grid("N")?;
    let alpha = p.real("alpha")?;
    let h = p.count("H")?;
    let top = grid.iter().copied().max().unwrap_or(1);
    let sieve = cache.get(top.saturating_add(h))?;
    let b = ArithmeticSequence::liouville(sieve);
    let mut out = Measurements::default();
    for &n in &grid {
        let d = local_aperiodicity_defect(&b, alpha, h, n)?;
        out.push_real("local_defect", n, d, 0.0, tol_at(n, &[(E7, 0.1)]));
    }
    Ok(out)
}

fn run_aperiodicity(p: &Params, cache: &mut SieveCache) -> CliResult<Measurements> {
    let grid = p.grid("N")?;
    let (r, m) = parse_rational(p.get("alpha"))?
        .ok_or_else(|| CliError::Usage("alpha: a rational r/m is required".into()))?;
    let sieve = sieve_for(cache, &grid)?;
    let b = ArithmeticSequence::liouville(sieve);
    let mut out = Measurements::default();
    for &n in &grid {
        let d = aperiodicity_defect(&b, r, m, n)?;
        out.push("centered_mean", n, d, zero(), tol_at(n, &[(E7, 0.01)]));
    }
    Ok(out)
}

fn run_progression(p: &Params, cache: &mut SieveCache) -> CliResult<Measurements> {
    let grid = p.grid("N")?;
    let m = p.count("m")?;
    let r = p.count("r")?;
    let s = parse_system(p.get("system"), p.get("x"), p.get("f"))?;
    let target = invariant_mean(&s.sys, &s.f)?;
    let top = grid.iter().copied().max().unwrap_or(1);
    let sieve = cache.get(m.saturating_mul(top).saturating_add(r))?;
    let mut out = Measurements::default();
    for &n in &grid {
        let est = progression_omega_average(&s.sys, &s.x, &s.f, m, r, n, &sieve)?;
        out.push("progression_mean", n, est, target, tol_at(n, &[(E7, 0.03)]));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// registry

const SYSTEM_KEYS: [Key; 3] = [
    key("system", "cyclic:2", "additive system: cyclic:M, rot:a1,..., poly:c0,c1,... joined by &"),
    key("x", "", "starting point (default per factor)"),
    key("f", "", "observable: table:v0,... or char:h1,... (default per factor)"),
];

macro_rules! keys {
    ($($k:expr),* $(,)?) => { &[$($k),*] };
}

pub static REGISTRY: &[ExperimentInfo] = &[
    ExperimentInfo {
        name: "pnt",
        statement: "prime number theorem: the Liouville function has mean 0",
        keys: keys![key("N", "1e4,1e5,1e6,1e7", "grid")],
        run: run_pnt,
    },
    ExperimentInfo {
        name: "pillai-selberg",
        statement: "Omega(n) mod m has asymptotic density 1/m in every class",
        keys: keys![key("N", "1e5,1e6,1e7", "grid"), key("m", "2,3,5", "moduli")],
        run: run_pillai_selberg,
    },
    ExperimentInfo {
        name: "erdos-delange",
        statement: "Omega(n)*alpha is uniformly distributed mod 1 for irrational alpha",
        keys: keys![
            key("N", "1e5,1e6,1e7", "grid"),
            key("alpha", "sqrt2 - 1", "irrational multiplier"),
            key("H", "5", "largest Weyl frequency"),
            key("beatty", "sqrt2 + 1", "Beatty modulus (> 1)"),
            key("beta", "0", "Beatty offset"),
        ],
        run: run_erdos_delange,
    },
    ExperimentInfo {
        name: "gelfond-omega",
        statement: "digit sums of Omega(n) in base q equidistribute mod m when m and q-1 are coprime",
        keys: keys![key("N", "1e5,1e6,1e7", "grid"), key("q", "2", "base"), key("m", "2", "modulus")],
        run: run_gelfond_omega,
    },
    ExperimentInfo {
        name: "squarefree",
        statement: "dynamical generalization along squarefree numbers: density 6/pi^2 and mean of the Moebius function 0",
        keys: keys![key("N", "1e5,1e6,1e7", "grid")],
        run: run_squarefree,
    },
    ExperimentInfo {
        name: "kfree",
        statement: "the k-free numbers have density 1/zeta(k)",
        keys: keys![key("N", "1e5,1e6,1e7", "grid"), key("k", "3", "power")],
        run: run_kfree,
    },
    ExperimentInfo {
        name: "omega-small",
        statement: "prime factors counted without multiplicity: (-1)^omega(n) has mean 0",
        keys: keys![key("N", "1e5,1e6,1e7", "grid")],
        run: run_omega_small,
    },
    ExperimentInfo {
        name: "wirsing-lambda-q",
        statement: "the Liouville variant counting only primes from a set of divergent reciprocal sum has mean 0",
        keys: keys![
            key("N", "1e5,1e6,1e7", "grid"),
            key("residue", "1", "primes p = residue mod modulus are counted"),
            key("modulus", "4", "modulus of the prime set"),
        ],
        run: run_wirsing_lambda_q,
    },
    ExperimentInfo {
        name: "davenport",
        statement: "Davenport: e(n*alpha)*lambda(n) has mean 0 for every alpha",
        keys: keys![key("N", "1e5,1e6,1e7", "grid"), key("alpha", "1/3,sqrt2 - 1", "frequencies")],
        run: run_davenport,
    },
    ExperimentInfo {
        name: "daboussi",
        statement: "Daboussi: e(n*alpha)*b(n) has mean 0 for irrational alpha and every bounded multiplicative b",
        keys: keys![
            key("N", "1e5,1e6,1e7", "grid"),
            key("alpha", "sqrt2 - 1", "irrational frequencies"),
            key("b", "mod4", "multiplicative function: liouville, mod4 or rot:<theta>"),
        ],
        run: run_daboussi,
    },
    ExperimentInfo {
        name: "matched-blocks",
        statement: "matched blocks of primes and 2-almost primes with small coprimality measures, and the block comparison bound",
        keys: keys![
            key("N", "1e7", "grid for the comparison defect"),
            key("eps", "0.25", "measure bound"),
            key("rho", "1.2", "bucket ratio"),
            key("shift", "0", "bucket offset -1, 0 or 1"),
            key("mode", "bounded", "strict (exit 3 when the range is insufficient) or bounded"),
            key("cap", "1e7", "largest block element in bounded mode; sieve size in strict mode"),
        ],
        run: run_matched_blocks,
    },
    ExperimentInfo {
        name: "tk-identity",
        statement: "Turan-Kubilius identity: the L2 discrepancy of a set equals its coprimality measure",
        keys: keys![
            key("N", "1e6", "grid"),
            key("sets", "", "sets separated by |, elements by spaces (default: a fixed roster of 20)"),
        ],
        run: run_tk_identity,
    },
    ExperimentInfo {
        name: "dilation",
        statement: "dilation bound: averages along dilations by a set differ by at most the square root of its coprimality measure",
        keys: keys![key("N", "1e7", "grid"), key("bmax", "100", "the set is the primes up to bmax")],
        run: run_dilation,
    },
    ExperimentInfo {
        name: "nu2-counterexample",
        statement: "rotation by nu_2(n)*alpha: orbit averages converge to a non-invariant limit",
        keys: keys![
            key("N", "1e4,1e5,1e6", "grid"),
            key("alpha", "0.41421356", "rotation angle"),
            key("y", "0", "starting point"),
            key("K", "19", "truncation of the limit series"),
        ],
        run: run_nu2,
    },
    ExperimentInfo {
        name: "idempotency",
        statement: "a generator attached to primes of divergent reciprocal sum acts idempotently on orbit averages",
        keys: keys![
            key("N", "1e5,1e6,1e7", "grid"),
            key("msys", "omega:cyclic:2", "omega:<system> or nu2:<alpha>"),
            key("p", "2", "a prime selecting the generator S_p"),
            key("y", "", "starting point"),
            key("g", "", "observable"),
        ],
        run: run_idempotency,
    },
    ExperimentInfo {
        name: "katai",
        statement: "Katai criterion: small pair correlations along primes force a small mean",
        keys: keys![
            key("N", "1e6", "grid"),
            key("alpha", "sqrt2 - 1", "phase of a(n) = lambda(n) e(n*alpha)"),
            key("pmax", "50", "primes up to pmax"),
        ],
        run: run_katai,
    },
    ExperimentInfo {
        name: "linear-phase",
        statement: "linear phases along Omega: e(n*alpha) f(T^Omega(n) x) averages to the integral for integer alpha, else 0",
        keys: keys![key("N", "1e5,1e6,1e7", "grid"), key("alpha", "1/3,sqrt2 - 1", "frequencies"), SYSTEM_KEYS[0], SYSTEM_KEYS[1], SYSTEM_KEYS[2]],
        run: run_linear_phase,
    },
    ExperimentInfo {
        name: "besicovitch",
        statement: "Besicovitch weights: a(n) f(T^Omega(n) x) averages to M(a) times the integral of f",
        keys: keys![
            key("N", "1e5,1e6,1e7", "grid"),
            key("terms", "1:0,0.5:1/2", "trigonometric polynomial as c:alpha terms"),
            SYSTEM_KEYS[0],
            SYSTEM_KEYS[1],
            key("f", "table:1,0", "observable"),
        ],
        run: run_besicovitch,
    },
    ExperimentInfo {
        name: "joint-poly",
        statement: "(p(n), q(Omega(n))) is uniformly distributed in the two-dimensional torus",
        keys: keys![
            key("N", "1e5,1e6,1e7", "grid"),
            key("p", "0,sqrt2", "coefficients of p, constant first"),
            key("q", "0,phi", "coefficients of q, constant first"),
            key("H", "3", "frequency box"),
        ],
        run: run_joint_poly,
    },
    ExperimentInfo {
        name: "gp-compare",
        statement: "a generalized polynomial Q(n) is uniformly distributed iff Q(Omega(n)) is",
        keys: keys![
            key("N", "1e5,1e6,1e7", "grid"),
            key("expr", "floor(n*sqrt2)*phi", "generalized polynomial in n"),
            key("H", "3", "largest Weyl frequency"),
        ],
        run: run_gp_compare,
    },
    ExperimentInfo {
        name: "poly-omega",
        statement: "Q(Omega(n)) is uniformly distributed when at least one of the coefficients of Q is irrational",
        keys: keys![
            key("N", "1e5,1e6,1e7", "grid"),
            key("coeffs", "0,0,sqrt2", "coefficients of Q, constant first"),
            key("h", "1", "frequency"),
        ],
        run: run_poly_omega,
    },
    ExperimentInfo {
        name: "theorem-a",
        statement: "uniquely ergodic systems: f(T^Omega(n) x) averages to the integral of f",
        keys: keys![key("N", "1e4,1e5,1e6,1e7", "grid"), SYSTEM_KEYS[0], SYSTEM_KEYS[1], SYSTEM_KEYS[2]],
        run: run_theorem_a,
    },
    ExperimentInfo {
        name: "sarnak",
        statement: "zero-entropy orbits are asymptotically independent of the Liouville function",
        keys: keys![key("N", "1e5,1e6,1e7", "grid"), SYSTEM_KEYS[0], SYSTEM_KEYS[1], SYSTEM_KEYS[2]],
        run: run_sarnak,
    },
    ExperimentInfo {
        name: "mean-value",
        statement: "Wirsing: a finitely generated multiplicative function has a mean value",
        keys: keys![key("N", "1e5,1e6,1e7", "grid"), key("b", "mod4", "liouville, mod4 or rot:<theta>")],
        run: run_mean_value,
    },
    ExperimentInfo {
        name: "local-aperiodicity",
        statement: "short-interval averages of the Liouville function are small (local aperiodicity)",
        keys: keys![key("N", "1e6,1e7", "grid"), key("alpha", "0", "frequency"), key("H", "1000", "window length")],
        run: run_local_aperiodicity,
    },
    ExperimentInfo {
        name: "aperiodicity",
        statement: "prime number theorem in progressions: lambda is independent of periodic sequences",
        keys: keys![key("N", "1e5,1e6,1e7", "grid"), key("alpha", "1/3", "rational frequency r/m")],
        run: run_aperiodicity,
    },
    ExperimentInfo {
        name: "progression",
        statement: "refinement along progressions: f(T^Omega(mn+r) x) averages to the integral of f",
        keys: keys![
            key("N", "1e5,1e6,1e7", "grid"),
            key("m", "4", "modulus"),
            key("r", "1", "residue"),
            SYSTEM_KEYS[0],
            SYSTEM_KEYS[1],
            SYSTEM_KEYS[2],
        ],
        run: run_progression,
    },
];

pub fn find(name: &str) -> Option<&'static ExperimentInfo> {
    REGISTRY.iter().find(|e| e.name == name)
}

/// Name, keys with defaults and statement of every experiment, in registry
/// order.
pub fn list_experiments() -> String {
    let mut out = String::new();
    for exp in REGISTRY {
        out.push_str(&format!("{}\n    {}\n", exp.name, exp.statement));
        for k in exp.keys {
            let default = match k.default {
                Some("") => "(empty)".to_string(),
                Some(d) => d.to_string(),
                None => "(required)".to_string(),
            };
            out.push_str(&format!("    {:<8} {:<20} {}\n", k.name, default, k.help));
        }
    }
    out
}

fn resolve(info: &ExperimentInfo, config: &ExperimentConfig) -> CliResult<Params> {
    let mut values = BTreeMap::new();
    for k in info.keys {
        if let Some(d) = k.default {
            values.insert(k.name.to_string(), d.to_string());
        }
    }
    for (k, v) in &config.params {
        if !info.keys.iter().any(|d| d.name == k) {
            let known: Vec<&str> = info.keys.iter().map(|d| d.name).collect();
            return Err(CliError::Usage(format!(
                "unknown key '{k}' for {} (known: {})",
                info.name,
                known.join(", ")
            )));
        }
        values.insert(k.clone(), v.clone());
    }
    if let Some(missing) = info.keys.iter().find(|k| !values.contains_key(k.name)) {
        return Err(CliError::Usage(format!("{} requires key '{}'", info.name, missing.name)));
    }
    Ok(Params { values })
}

/// Runs one experiment with the given sieve cache.
pub fn run_with_cache(config: &ExperimentConfig, cache: &mut SieveCache) -> CliResult<Outcome> {
    let info = find(&config.experiment).ok_or_else(|| {
        CliError::Usage(format!("unknown experiment '{}'; see `ergolab list`", config.experiment))
    })?;
    let params = resolve(info, config)?;
    let echo = params.echo();
    let mut measured = (info.run)(&params, cache)?;
    measured.rows.sort_by_key(|r| r.n);
    let mut outcome = Outcome { notes: std::mem::take(&mut cache.notes), ..Default::default() };
    outcome.notes.append(&mut measured.notes);
    for m in measured.rows {
        let params = if echo.is_empty() { format!("quantity={}", m.quantity) } else { format!("{echo};quantity={}", m.quantity) };
        let row = ReportRow::new(info.name, params, m.n, m.estimate, m.target);
        if let Some(tol) = m.tolerance {
            outcome.checks.push(Check {
                quantity: m.quantity,
                n: m.n,
                defect: row.defect,
                tolerance: tol,
                pass: row.defect <= tol,
            });
        }
        outcome.report.rows.push(row);
    }
    outcome.report.sort();
    Ok(outcome)
}

/// Runs one experiment with the default on-disk sieve cache.
pub fn run_experiment(config: &ExperimentConfig) -> CliResult<Outcome> {
    run_with_cache(config, &mut SieveCache::from_env())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(name: &str, pairs: &[(&str, &str)]) -> CliResult<Outcome> {
        run_with_cache(&ExperimentConfig::new(name, pairs), &mut SieveCache::new(None))
    }

    #[test]
    fn registry_is_consistent() {
        let mut names: Vec<&str> = REGISTRY.iter().map(|e| e.name).collect();
        let n = names.len();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), n, "duplicate experiment names");
        for e in REGISTRY {
            assert!(!e.statement.is_empty());
            assert!(e.keys.iter().any(|k| k.name == "N"), "{} has no grid", e.name);
        }
    }

    #[test]
    fn every_experiment_runs_small() {
        let small: BTreeMap<&str, Vec<(&str, &str)>> = BTreeMap::from([
            ("matched-blocks", vec![("N", "1e5"), ("cap", "1e5")]),
            ("tk-identity", vec![("N", "1e3")]),
            ("katai", vec![("N", "1e3")]),
            ("dilation", vec![("N", "1e4")]),
        ]);
        for e in REGISTRY {
            let pairs = small.get(e.name).cloned().unwrap_or_else(|| vec![("N", "100,1000")]);
            let out = run(e.name, &pairs).unwrap_or_else(|err| panic!("{}: {err}", e.name));
            assert!(!out.report.rows.is_empty(), "{}", e.name);
            for w in out.report.rows.windows(2) {
                assert!(w[0].n <= w[1].n);
            }
            for r in &out.report.rows {
                assert!(r.defect.is_finite(), "{}: {r:?}", e.name);
                assert_eq!(r.defect, (r.estimate - r.target).norm());
            }
        }
    }

    #[test]
    fn pnt_small_values() {
        let out = run("pnt", &[("N", "10,100")]).unwrap();
        // λ on 1..10: 1 −1 −1 1 −1 1 −1 −1 1 1 → sum 0
        assert_eq!(out.report.rows[0].estimate, re(0.0));
        assert_eq!(out.report.rows[0].params, "quantity=mean_liouville");
        // Σ_{n≤100} λ(n) = −2
        assert_eq!(out.report.rows[1].estimate, re(-0.02));
    }

    #[test]
    fn usage_errors() {
        let unknown = run("nope", &[]).unwrap_err();
        assert_eq!(unknown.exit_code(), 2);
        let bad_key = run("pnt", &[("alpha", "1")]).unwrap_err();
        assert!(bad_key.to_string().contains("unknown key 'alpha'"));
        assert_eq!(run("pnt", &[("N", "ten")]).unwrap_err().exit_code(), 2);
        assert_eq!(run("theorem-a", &[("N", "100"), ("system", "rot:1/2")]).unwrap_err().exit_code(), 2);
        assert_eq!(run("poly-omega", &[("N", "100"), ("coeffs", "0,1/2")]).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn strict_blocks_exhaust_resources() {
        let e = run("matched-blocks", &[("mode", "strict"), ("cap", "1e5"), ("N", "1e5")]).unwrap_err();
        assert_eq!(e.exit_code(), 3);
        assert!(e.to_string().contains("would suffice"));
    }

    #[test]
    fn nu2_target_is_the_series() {
        let out = run("nu2-counterexample", &[("N", "1e5")]).unwrap();
        let r = &out.report.rows[0];
        assert!(r.defect < 5e-3, "{r:?}");
        assert_eq!(out.checks.len(), 0);
    }

    #[test]
    fn tk_identity_default_roster() {
        let out = run("tk-identity", &[("N", "1e6")]).unwrap();
        assert_eq!(out.report.rows.len(), 20);
        assert_eq!(out.checks.len(), 20);
        assert!(out.all_pass(), "{:?}", out.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>());
    }

    #[test]
    fn params_echo_is_sorted_and_complete() {
        let out = run("davenport", &[("N", "100"), ("alpha", "1/4")]).unwrap();
        assert_eq!(out.report.rows[0].params, "alpha=1/4;quantity=mean[alpha=1/4]");
        let out = run("theorem-a", &[("N", "100")]).unwrap();
        assert_eq!(out.report.rows[0].params, "f=;system=cyclic:2;x=;quantity=omega_orbit_mean");
    }
}
