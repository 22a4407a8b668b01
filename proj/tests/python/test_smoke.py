import math
from fractions import Fraction

import numpy as np
import pytest

import omegastar as om


def test_table_and_anchors():
    t = om.omega_star_table(12)
    assert t.dtype == np.uint16
    assert t[11] == 5
    assert int(t[:10].sum()) == 19
    assert om.omega_star(12) == 5
    assert om.moment_sum(10, 2) == 45
    assert om.p_k_count(10, 2) == 19
    assert om.moment_via_tuples(200, 3) == om.moment_sum(200, 3)
    assert om.distribution(10, [2, 3]) == [5, 4]


def brute_omega_star(n):
    def prime(m):
        return m > 1 and all(m % d for d in range(2, int(m ** 0.5) + 1))

    return sum(1 for d in range(1, n + 1) if n % d == 0 and prime(d + 1))


def test_table_matches_brute_force():
    t = om.omega_star_table(400)
    assert [int(v) for v in t] == [brute_omega_star(n) for n in range(1, 401)]


def test_lcm_identity_and_decomposition():
    lhs, rhs, equal = om.lcm_identity_check([6, 10, 15])
    assert (lhs, rhs, equal) == (30, Fraction(30), True)
    u = om.us_decompose([6, 10, 15])
    assert u[(1, 2)] == 2 and u[(1, 3)] == 3 and u[(2, 3)] == 5 and u[(1, 2, 3)] == 1
    assert math.prod(u.values()) == math.lcm(6, 10, 15)


def test_profiles():
    assert om.profile_consistent(3, [2, 3, 5])
    assert not om.profile_consistent(3, [2, 2, 3])
    assert om.profile_from_tuple([6, 10, 15]) == [2, 3, 5]
    assert om.d_formula(3, [2, 3, 5]) == 30
    for k, want in zip(range(2, 6), [1, 4, 11, 26]):
        assert om.count_profiles_at_prime(k, 2) == (want, True)
    assert om.psi_image_size(12) == 4083
    assert om.g_k_at_prime(3, 3) == Fraction(16, 9)
    assert om.g_k(2, 6) == Fraction(1, 2) * Fraction(2, 3)


def test_averages():
    h = om.average({"rule": "unit"}, [10**6])[0]
    assert abs(h - math.log(1e6) - 0.5772156649) < 1e-2
    exact = om.average_exact('{"rule":"tau_l","l":2}', 1000)
    approx = om.average({"rule": "tau_l", "l": 2}, [1000])[0]
    assert abs(approx - float(exact)) <= 1e-12 * float(exact)
    assert om.shifted_prime_average({"rule": "unit"}, 7, 2) == pytest.approx(11 / 6)
    with pytest.raises(ValueError):
        om.average({"rule": "nope"}, [10])


def test_checks_and_cli():
    report = om.run_check("lemma34", [4])
    assert report["count"] == 11 and report["failures"] == 0
    report = om.run_check("lcm_identity", [2, 3], trials=500)
    assert report["first_counterexample"] is None
    code, out, _ = om.cli(["pk", "--x", "10", "--k", "2"])
    assert code == 0 and "P_2(10)=19" in out
    assert om.cli(["omega", "--x", "0"])[0] == 2
    with pytest.raises(om.ResourceError):
        om.p_k_count(10**4, 3, budget=10)
