from math import gamma, pi, sqrt

import numpy as np
import pytest
from scipy import integrate

from pencillab import constants as K
from pencillab.ensembles import make_stream
from pencillab.errors import UnsupportedError


def test_e_r1_quadrature():
    assert abs(K.e_r(1).mean - sqrt(2 / pi)) < 1e-10


def test_e_r1_mc():
    est = K.e_r(1, "mc", 10**6, make_stream(1, 1))
    assert est.within(sqrt(2 / pi))
    assert est.stderr < 1.5e-3
    assert est.n_samples == 10**6 and est.seed == 1


def test_e_r2_golden_value():
    # frozen before the estimators were written
    assert abs(K.e_r(2).mean - K.E_R2_GOLDEN) < 1e-10
    assert np.isclose(K.E_R2_GOLDEN, 1.3318399117607065, rtol=0, atol=1e-15)


def test_e_r2_mc_vs_quadrature():
    est = K.e_r(2, "mc", 10**6, make_stream(2, 2))
    assert est.within(K.E_R2_GOLDEN)


def test_half_variance_offdiagonal_closed_form():
    assert abs(K.abs_det_mean(2, 0.5).mean - (sqrt(2) - 0.5)) < 1e-10


def test_e_r_quadrature_unsupported_for_n3():
    with pytest.raises(UnsupportedError):
        K.e_r(3, "quadrature")
    with pytest.raises(ValueError):
        K.e_r(2, "simpson")


def test_mc_rate():
    s = make_stream(3, 3)
    a = K.e_r(2, "mc", 50000, s)
    b = K.e_r(2, "mc", 200000, s.substream(4))
    assert abs(a.stderr / b.stderr - 2) < 0.15 * 2


def test_mc_reproducible():
    a = K.e_r(2, "mc", 70000, make_stream(5, 0))
    b = K.e_r(2, "mc", 70000, make_stream(5, 0))
    assert a == b


def test_double_factorial_conventions():
    assert K.double_factorial(-1) == K.double_factorial(0) == 1
    assert K.double_factorial(5) == 15 and K.double_factorial(6) == 48


def test_wallis_examples():
    assert K.wallis(1) == pytest.approx(pi / 2, abs=1e-15)
    assert K.wallis(2) == pytest.approx(1.0, abs=1e-15)
    assert K.wallis(3) == pytest.approx(pi / 4, abs=1e-15)


def test_wallis_recursion():
    for m in range(3, 40):
        assert K.wallis(m) == pytest.approx((m - 2) / (m - 1) * K.wallis(m - 2), rel=1e-14)


def test_wallis_vs_quadrature():
    for m in range(1, 12):
        q = integrate.quad(lambda t: np.cos(t) ** (m - 1), 0, pi / 2, epsabs=1e-14)[0]
        assert abs(K.wallis(m) - q) < 1e-12


def test_radial_gamma():
    assert K.radial_gamma(1) == pytest.approx(sqrt(pi) / 4, rel=1e-15)
    assert K.radial_gamma(2) == pytest.approx(0.5, rel=1e-15)
    for n in range(2, 20):
        assert K.radial_gamma(n) / K.radial_gamma(n - 2) == pytest.approx(n / 2, rel=1e-14)
    for n in range(0, 9):
        q = integrate.quad(lambda r: r ** (n + 1) * np.exp(-r * r), 0, np.inf,
                           epsabs=1e-13, epsrel=1e-13)[0]
        assert abs(K.radial_gamma(n) - q) < 1e-12
        assert K.radial_gamma(n) == pytest.approx(gamma(n / 2 + 1) / 2, rel=1e-14)


def test_sphere_vol():
    assert K.sphere_vol(0) == pytest.approx(2)
    assert K.sphere_vol(1) == pytest.approx(2 * pi)
    assert K.sphere_vol(2) == pytest.approx(4 * pi)
    assert K.sphere_vol(3) == pytest.approx(2 * pi**2)


def test_fs_volumes():
    assert abs(K.fs_volume_rp(1) - sqrt(pi)) < 1e-10
    assert abs(K.fs_volume_rp(2) - 2) < 1e-8
    with pytest.raises(UnsupportedError):
        K.fs_volume_rp(3)


def test_fs_volume_tail():
    a, b = K.fs_volume_rp(1, cutoff=1e11), K.fs_volume_rp(1, cutoff=2e11)
    assert abs(a - b) < 1e-10
    assert abs(b - K.fs_volume_rp(1)) < 1e-10


def test_density_constants():
    d1 = K.predicted_real_density(1)
    assert d1.c_r == pytest.approx(sqrt(pi / 2), rel=1e-10)
    assert d1.predicted_density_cpn == pytest.approx(pi / sqrt(2), rel=1e-10)
    d2 = K.predicted_real_density(2)
    assert d2.c_r == pytest.approx(2 * K.E_R2_GOLDEN, rel=1e-10)
    assert d2.predicted_density_cpn == pytest.approx(4 * K.E_R2_GOLDEN, rel=1e-8)
    d3 = K.predicted_real_density(3, e_r_value=1.0)
    assert d3.c_r == pytest.approx(3 / 2 * pi / 2) and d3.predicted_density_cpn is None


def test_kac_rice_values():
    assert K.kac_rice_mean(1, 1) == 0
    assert K.kac_rice_mean(1, 9) == pytest.approx(4.0, rel=1e-10)
    assert K.kac_rice_mean(2, 3) == pytest.approx(4 * (sqrt(2) - 0.5), rel=1e-8)
    assert K.kac_rice_density(1) == pytest.approx(sqrt(2), rel=1e-10)
    assert K.kac_rice_density(2) == pytest.approx(2 * sqrt(2) - 1, rel=1e-8)


def test_peak_full_range_closed_forms():
    for d in (4, 10, 100, 1000):
        assert K.peak_lambda(d, 0, True) == pytest.approx(sqrt(d + 1), rel=1e-12)
        assert K.peak_lambda(d, 1, True) == pytest.approx(sqrt(d * (d + 1)), rel=1e-12)


def test_peak_truncation_gap():
    for p in (0, 1, 2):
        assert abs(K.peak_lambda(100, p) / K.peak_lambda(100, p, True) - 1) < 1e-4


def test_peak_growth_exponents():
    for p in (0, 1, 2):
        assert abs(K.growth_exponent(p) - (1 + p)) < 0.02


def test_peak_which_names():
    assert K.peak_lambda(50, which="i") == K.peak_lambda(50, 1)
    assert K.peak_lambda(50, which="kk") == K.peak_lambda(50, 2)
    with pytest.raises(UnsupportedError):
        K.peak_lambda(50, which="ij")
    with pytest.raises(ValueError):
        K.peak_lambda(3)


def test_peak_radius():
    assert K.peak_radius(100) == pytest.approx(np.log(100) / 10)
