use std::sync::OnceLock;

use ergolab::arith::{AdditiveFunctionSpec, FactorSieve, MultiplicativeFunctionSpec, PrimeSet};
use ergolab::prime_sets::k_almost_primes_up_to;
use ergolab::Complex64;
use proptest::prelude::*;

const LIMIT: u64 = 1_000_000;

fn sieve() -> &'static FactorSieve {
    static S: OnceLock<FactorSieve> = OnceLock::new();
    S.get_or_init(|| FactorSieve::new(LIMIT).unwrap())
}

fn additive_spec() -> AdditiveFunctionSpec {
    AdditiveFunctionSpec::new(
        vec![(PrimeSet::residue(1, 4).unwrap(), 3), (PrimeSet::explicit([2, 7]), 0)],
        2,
    )
}

fn multiplicative_spec() -> MultiplicativeFunctionSpec {
    let z = Complex64::from_polar(1.0, 0.7);
    MultiplicativeFunctionSpec::new(vec![(PrimeSet::residue(3, 4).unwrap(), z)], Complex64::new(-1.0, 0.0)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn omega_is_completely_additive(m in 1u64..1000, n in 1u64..1000) {
        let s = sieve();
        prop_assert_eq!(s.big_omega(m * n).unwrap(), s.big_omega(m).unwrap() + s.big_omega(n).unwrap());
        let a = additive_spec();
        prop_assert_eq!(
            s.completely_additive_eval(&a, m * n).unwrap(),
            s.completely_additive_eval(&a, m).unwrap() + s.completely_additive_eval(&a, n).unwrap()
        );
    }

    #[test]
    fn liouville_is_completely_multiplicative(m in 1u64..1000, n in 1u64..1000) {
        let s = sieve();
        prop_assert_eq!(s.liouville(m * n).unwrap(), s.liouville(m).unwrap() * s.liouville(n).unwrap());
        let b = multiplicative_spec();
        let lhs = s.completely_multiplicative_eval(&b, m * n).unwrap();
        let rhs = s.completely_multiplicative_eval(&b, m).unwrap() * s.completely_multiplicative_eval(&b, n).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn moebius_is_liouville_on_squarefree(n in 1u64..LIMIT) {
        let s = sieve();
        let mu = s.moebius(n).unwrap();
        if s.is_k_free(n, 2).unwrap() {
            prop_assert_eq!(mu, s.liouville(n).unwrap());
        } else {
            prop_assert_eq!(mu, 0);
        }
    }

    #[test]
    fn moebius_sums_over_divisors(n in 1u64..20_000) {
        let s = sieve();
        let total: i64 = (1..=n).filter(|d| n % d == 0).map(|d| s.moebius(d).unwrap() as i64).sum();
        prop_assert_eq!(total, i64::from(n == 1));
    }

    #[test]
    fn factorization_reconstructs(n in 1u64..LIMIT) {
        let product: u64 = sieve().factors(n).unwrap().map(|(p, e)| p.pow(e)).product();
        prop_assert_eq!(product, n);
    }
}

#[test]
fn almost_primes_partition_the_range() {
    let s = sieve();
    let limit = 100_000;
    let mut seen = vec![0u8; limit as usize + 1];
    for k in 1..=17 {
        for n in k_almost_primes_up_to(s, k, limit).unwrap() {
            seen[n as usize] += 1;
        }
    }
    assert!(seen[2..].iter().all(|&c| c == 1));
}
