"""Smoke test for the compiled extension.

Build it first, e.g. `maturin develop --release` in crates/py, then run
`python python/smoke_test.py`.
"""

import csv
import io
import math

import ergolab_py as el


def main():
    s = el.Sieve(10_000)
    assert s.limit == 10_000
    assert s.factor(360) == [2, 2, 2, 3, 3, 5]
    assert s.big_omega(360) == 6 and s.small_omega(360) == 3
    assert s.liouville(12) == -1 and s.moebius(30) == -1 and s.moebius(12) == 0
    assert s.is_prime(9973) and not s.is_prime(9975)
    omegas = s.big_omega_range(100)
    assert len(omegas) == 100 and omegas[63] == 6
    try:
        s.big_omega(10_001)
    except ValueError:
        pass
    else:
        raise AssertionError("out-of-range argument accepted")

    b = [2, 4, 6]
    w = sum(1 / m for m in b)
    direct = sum((math.gcd(m, n) - 1) / (m * n) for m in b for n in b) / w**2
    assert abs(el.coprimality_measure(b) - direct) < 1e-12
    assert abs(el.tk_l2_discrepancy([4], 100_000) - el.coprimality_measure([4])) < 1e-3

    p = el.GeneralizedPolynomial("frac(sqrt2*n)*n")
    x = math.sqrt(2) * 7
    assert abs(p(7) - (x - math.floor(x)) * 7) < 1e-9

    re, im = el.weyl_sum([0.0, 0.5], 1)
    assert abs(re) < 1e-12 and abs(im) < 1e-12
    assert abs(el.star_discrepancy([0.5]) - 0.5) < 1e-12

    assert "pnt" in el.list_experiments()
    text, _notes = el.run_experiment("pnt", {"N": "1e4"})
    rows = list(csv.DictReader(io.StringIO(text)))
    assert rows and rows[-1]["N"] == "10000"
    try:
        el.run_experiment("no-such-experiment")
    except ValueError:
        pass
    else:
        raise AssertionError("unknown experiment accepted")
    print("smoke test passed")


if __name__ == "__main__":
    main()
