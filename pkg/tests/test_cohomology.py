from fractions import Fraction

import numpy as np
import pytest

from pencillab import cohomology as coh
from pencillab.cohomology import ChernPoly


def test_total_chern_small_n():
    assert coh.total_chern_cpn(1).coeffs == (1, 2)
    assert coh.total_chern_cpn(2).coeffs == (1, 3, 3)
    assert coh.total_chern_cpn(3).coeffs == (1, 4, 6, 4)
    with pytest.raises(ValueError):
        coh.total_chern_cpn(0)


def test_ring_truncates():
    h = ChernPoly.hpow(2, 1)
    assert (h * h).coeffs == (0, 0, 1)
    assert (h * h * h).coeffs == (0, 0, 0)
    with pytest.raises(ValueError):
        h * ChernPoly.hpow(3, 1)
    assert (ChernPoly(2, [1, 2, 3]) + ChernPoly(2, [1])).coeffs == (2, 2, 3)


def test_inverse_linear():
    for n in range(1, 5):
        for d in (1, 2, 7):
            one = ChernPoly(n, [1, d]).inverse_linear(d)
            assert one.coeffs == (1,) + (0,) * n


@pytest.mark.parametrize("d", range(1, 12))
def test_euler_fiber(d):
    assert coh.euler_fiber(1, d) == d
    g = (d - 1) * (d - 2) // 2
    assert coh.euler_fiber(2, d) == -d * d + 3 * d == 2 - 2 * g
    assert coh.euler_fiber(3, d) == d**3 - 4 * d**2 + 6 * d


def test_euler_fiber_quartic_k3():
    assert coh.euler_fiber(3, 4) == 24


@pytest.mark.parametrize("d", range(1, 12))
def test_euler_base(d):
    assert coh.euler_base(1, d) == 0
    assert coh.euler_base(2, d) == d * d
    # (d, d) curve in CP^3: 2g - 2 = d^2 (2d - 4)
    assert coh.euler_base(3, d) == -2 * d**3 + 4 * d**2


def test_crit_counts():
    for d in range(1, 101):
        assert coh.exact_crit_count(1, d) == 2 * d - 2
        assert coh.exact_crit_count(2, d) == 3 * (d - 1) ** 2
    assert coh.exact_crit_count(2, 1) == 0
    with pytest.raises(ValueError):
        coh.exact_crit_count(1, 0)


def test_crit_count_is_n_plus_1_times_d_minus_1_power():
    for n in range(1, 7):
        for d in (1, 2, 3, 10, 57):
            assert coh.exact_crit_count(n, d) == (n + 1) * (d - 1) ** n


def test_euler_characteristic_bookkeeping():
    for n in range(1, 7):
        for d in (1, 2, 3, 5, 100, 10**4):
            chi = (n + 1) - 2 * coh.euler_fiber(n, d) + coh.euler_base(n, d) \
                - (-1) ** n * coh.exact_crit_count(n, d)
            assert chi == 0


def test_counts_nonnegative():
    for n in range(1, 7):
        for d in range(1, 10**4 + 1, 37):
            assert coh.exact_crit_count(n, d) >= 0
        assert coh.exact_crit_count(n, 10**4) >= 0


def test_leading_coefficient():
    for n in range(1, 7):
        c = coh.crit_count_polynomial(n)
        assert len(c) == n + 1 and c[-1] == n + 1


def test_leading_density_pairs():
    assert coh.leading_density_complex(1) == (2, 2)
    assert coh.leading_density_complex(2) == (3, 3)
    for n in range(1, 7):
        a, b = coh.leading_density_complex(n)
        assert a == b == n + 1
        assert isinstance(b, Fraction)


def test_density_limit_rate():
    # count/d^n = (n+1)(1 - 1/d)^n, so the gap is at most n(n+1)/d and gap*d -> n(n+1)
    for n in range(1, 5):
        C = n * (n + 1)
        ds = [10**k for k in range(2, 7)]
        gaps = [abs(Fraction(coh.exact_crit_count(n, d), d**n) - (n + 1)) for d in ds]
        assert all(g <= Fraction(C, d) for g, d in zip(gaps, ds))
        assert abs(float(gaps[-1]) * ds[-1] / C - 1) < 1e-4
        assert float(gaps[-1]) / (n + 1) < 1e-4


def test_big_integers_exact():
    v = coh.exact_crit_count(6, 10**6)
    assert v == 7 * (10**6 - 1) ** 6
    assert isinstance(v, int)


def test_chern_table_rows():
    rows = coh.chern_table(2, 4)
    assert rows[0] == (2, 1, 2, 1, 0)
    assert rows[-1] == (2, 4, -4, 16, 27)
