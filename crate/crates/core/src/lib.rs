//! Computational laboratory for ergodic averages along Ω(n).
//!
//! The crate is organized bottom-up:
//!
//! * [`arith`]: the smallest-prime-factor sieve and every arithmetic
//!   function evaluated from it (Ω, ω, λ, µ, ν_p, s_q, Ω_Q, completely
//!   additive/multiplicative functions), plus the on-disk sieve cache.
//! * [`averaging`]: Cesàro/logarithmic averages, the coprimality pairing and
//!   the Turán–Kubilius-type discrepancies.
//! * [`prime_sets`]: almost primes and the matched prime/2-almost-prime
//!   block construction.
//! * [`dynsys`]: additive and multiplicative dynamical systems and their
//!   orbit averages.
//! * [`gp`]: generalized (bracket) polynomial parser and evaluator.
//! * [`equidist`]: Weyl sums, star discrepancy and density profiles.
//! * [`correlations`]: independence, aperiodicity and orthogonality tests.
//!
//! Every "n ∈ [N/m]" in this crate means n ∈ {1, …, ⌊N/m⌋}.

pub mod arith;
pub mod averaging;
pub mod correlations;
pub mod dynsys;
pub mod equidist;
mod error;
pub mod gp;
pub mod prime_sets;
pub mod sum;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// e(x) = exp(2πix).
#[inline]
pub fn e(x: f64) -> Complex64 {
    let t = std::f64::consts::TAU * x;
    Complex64::new(t.cos(), t.sin())
}

/// Fractional part {x} = x − ⌊x⌋, always in [0, 1).
#[inline]
pub fn frac(x: f64) -> f64 {
    let f = x - x.floor();
    // x slightly below an integer can round up to exactly 1.0
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// √2 − 1, the default irrational rotation number.
pub const SQRT2_MINUS_1: f64 = std::f64::consts::SQRT_2 - 1.0;
/// (√5 − 1)/2, the golden ratio conjugate.
pub const GOLDEN_CONJUGATE: f64 = 0.618_033_988_749_894_9;
/// (1 + √5)/2.
pub const GOLDEN_RATIO: f64 = 1.618_033_988_749_895;

/// Smallest q ≤ `max_den` with ‖q·x‖ ≤ `tol` (distance to the nearest
/// integer), if any. Used as a heuristic rationality test for parameters
/// supplied as floating-point literals.
pub fn small_denominator(x: f64, max_den: u64, tol: f64) -> Option<u64> {
    (1..=max_den).find(|&q| {
        let y = q as f64 * x;
        (y - y.round()).abs() <= tol
    })
}

/// A nonzero integer vector h with ‖h‖∞ ≤ `height` and ‖h·α‖ ≤ `tol`, if
/// one exists. Only dimensions up to 4 are searched exhaustively.
pub fn integer_relation(alpha: &[f64], height: i64, tol: f64) -> Option<Vec<i64>> {
    let d = alpha.len();
    if d == 0 || d > 4 {
        return None;
    }
    let side = (2 * height + 1) as usize;
    let total = side.pow(d as u32);
    for idx in 0..total {
        let mut rest = idx;
        let mut h = Vec::with_capacity(d);
        for _ in 0..d {
            h.push((rest % side) as i64 - height);
            rest /= side;
        }
        if h.iter().all(|&c| c == 0) {
            continue;
        }
        let dot: f64 = h.iter().zip(alpha).map(|(&c, &a)| c as f64 * a).sum();
        if (dot - dot.round()).abs() <= tol {
            return Some(h);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frac_and_e() {
        assert_eq!(frac(-0.25), 0.75);
        assert_eq!(frac(3.0), 0.0);
        assert!(frac(-1e-18) < 1.0);
        assert!((e(0.25) - Complex64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn rationality_heuristics() {
        assert_eq!(small_denominator(0.375, 100, 1e-12), Some(8));
        assert_eq!(small_denominator(SQRT2_MINUS_1, 1000, 1e-9), None);
        assert_eq!(integer_relation(&[SQRT2_MINUS_1, GOLDEN_CONJUGATE], 6, 1e-9), None);
        let r = integer_relation(&[SQRT2_MINUS_1, 1.0 - SQRT2_MINUS_1], 3, 1e-12).unwrap();
        assert_eq!(r[0], r[1]);
    }
}
