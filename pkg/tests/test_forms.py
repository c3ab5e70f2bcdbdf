from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pencillab.ensembles import make_stream, sample_kostlan_binary, sample_kostlan_ternary
from pencillab.errors import DegreeMismatchError, ZeroFormError
from pencillab.forms import (BinaryForm, TernaryForm, eval_circle, jacobian_covector_ternary,
                             log_abs_resultant, resultant_binary, ternary_monomials,
                             wronskian_binary)

small_ints = st.integers(-9, 9)


def binary(*coeffs, exact=True):
    return BinaryForm(coeffs, exact=exact)


def exact_pairs(max_d=6):
    return st.integers(1, max_d).flatmap(
        lambda d: st.tuples(st.lists(small_ints, min_size=d + 1, max_size=d + 1),
                            st.lists(small_ints, min_size=d + 1, max_size=d + 1))
    ).filter(lambda ab: any(ab[0]) and any(ab[1]))


def test_wronskian_squares():
    # x^2, y^2 -> 2x * 2y = 4xy under W = a_x b_y - a_y b_x
    w = wronskian_binary(binary(0, 0, 1), binary(1, 0, 0))
    assert w.degree == 2
    assert list(w.coeffs) == [0, 4, 0]


def test_wronskian_linear_is_constant():
    w = wronskian_binary(binary(0, 1), binary(1, 0))
    assert w.degree == 0 and list(w.coeffs) == [1]


def test_wronskian_bilinear():
    a, b = binary(1, -2, 3, 5), binary(4, 0, -1, 2)
    lhs = wronskian_binary(a.scaled(2), b.scaled(3)).coeffs
    assert list(lhs) == [6 * c for c in wronskian_binary(a, b).coeffs]


@given(exact_pairs())
def test_wronskian_antisymmetric(ab):
    a, b = BinaryForm(ab[0], exact=True), BinaryForm(ab[1], exact=True)
    w1, w2 = wronskian_binary(a, b).coeffs, wronskian_binary(b, a).coeffs
    assert list(w1) == [-c for c in w2]


@given(exact_pairs())
def test_wronskian_chart_consistency(ab):
    # with y = 1 and z = x: W(z, 1) = d (a' b - a b') for a(z) = sum a_k z^k
    a, b = ab
    d = len(a) - 1
    pa, pb = np.polynomial.Polynomial(a), np.polynomial.Polynomial(b)
    expect = d * (pa.deriv() * pb - pa * pb.deriv())
    w = wronskian_binary(BinaryForm(a, exact=True), BinaryForm(b, exact=True)).coeffs
    got = np.array([int(c) for c in w], dtype=float)
    ref = np.zeros(len(got))
    ref[: len(expect.coef)] = expect.coef
    assert np.array_equal(got, ref)


def test_wronskian_top_coefficient_tracks_infinity():
    # x^2 / (x^2 + y^2) is critical at [1:0]; xy / (x^2 + y^2) is not
    w = wronskian_binary(binary(0, 0, 1), binary(1, 0, 1))
    assert w.degree == 2 and w.coeffs[-1] == 0
    w = wronskian_binary(binary(0, 1, 0), binary(1, 0, 1))
    assert list(w.coeffs) == [2, 0, -2]


def test_wronskian_errors():
    with pytest.raises(DegreeMismatchError):
        wronskian_binary(binary(1, 2), binary(1, 2, 3))
    with pytest.raises(ZeroFormError):
        wronskian_binary(binary(0, 0), binary(1, 2))


def test_float_and_exact_agree():
    s = make_stream(3, 3)
    a, b = sample_kostlan_binary(5, s, 0), sample_kostlan_binary(5, s, 1)
    wf = wronskian_binary(a, b).coeffs
    we = wronskian_binary(a.to_exact(), b.to_exact()).coeffs
    assert np.allclose(wf, [float(c) for c in we], rtol=1e-13, atol=1e-13 * np.abs(wf).max())


def test_jacobian_covector_linear():
    x = TernaryForm({(1, 0, 0): 1}, exact=True)
    y = TernaryForm({(0, 1, 0): 1}, exact=True)
    M0, M1, M2 = jacobian_covector_ternary(x, y)
    assert M0 == TernaryForm({(0, 1, 0): -1}, exact=True)
    assert M1 == TernaryForm({(1, 0, 0): 1}, exact=True)
    assert M2.is_zero
    assert all(M.degree == 1 for M in (M0, M1, M2))


def _euler_sum(Ms):
    x = TernaryForm({(1, 0, 0): 1}, degree=1, exact=Ms[0].exact)
    y = TernaryForm({(0, 1, 0): 1}, degree=1, exact=Ms[0].exact)
    z = TernaryForm({(0, 0, 1): 1}, degree=1, exact=Ms[0].exact)
    return x * Ms[0] + y * Ms[1] + z * Ms[2]


def test_euler_identity_float_random():
    s = make_stream(4, 0)
    a, b = sample_kostlan_ternary(3, s, 0), sample_kostlan_ternary(3, s, 1)
    Ms = jacobian_covector_ternary(a, b)
    total = _euler_sum(Ms)
    scale = max(M.max_abs() for M in Ms)
    assert total.max_abs() <= 1e-12 * scale


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 4), st.data())
def test_euler_identity_exact(d, data):
    n = len(ternary_monomials(d))
    ca = data.draw(st.lists(small_ints, min_size=n, max_size=n).filter(any))
    cb = data.draw(st.lists(small_ints, min_size=n, max_size=n).filter(any))
    a = TernaryForm([Fraction(c, 3) for c in ca], degree=d, exact=True)
    b = TernaryForm([Fraction(c, 7) for c in cb], degree=d, exact=True)
    assert _euler_sum(jacobian_covector_ternary(a, b)).is_zero


def test_jacobian_covector_alpha_equals_beta():
    a = sample_kostlan_ternary(3, make_stream(5, 0)).to_exact()
    assert all(M.is_zero for M in jacobian_covector_ternary(a, a))


def test_ternary_monomial_order():
    assert ternary_monomials(2) == ((2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2))
    for d in range(6):
        m = ternary_monomials(d)
        assert len(set(m)) == len(m) == (d + 1) * (d + 2) // 2
        assert all(sum(e) == d for e in m)


def test_ternary_evaluation_matches_monomials():
    f = sample_kostlan_ternary(4, make_stream(6, 0))
    p = np.array([0.3, -1.2, 0.7])
    ref = sum(c * p[0] ** i * p[1] ** j * p[2] ** k for c, (i, j, k) in zip(f.coeffs, ternary_monomials(4)))
    assert np.isclose(f(p), ref, rtol=1e-13)


def test_ternary_rejects_wrong_length():
    with pytest.raises(ValueError):
        TernaryForm([1, 2, 3, 4], degree=2)
    with pytest.raises(ValueError):
        TernaryForm([1.0, np.inf, 0.0], degree=1)


def test_eval_circle_unit_form():
    th = np.linspace(-3, 9, 37)
    assert np.allclose(eval_circle(binary(1, 0, 1, exact=False), th), 1.0, atol=1e-15)


def test_eval_circle_xy():
    assert np.isclose(eval_circle(binary(0, 1, 0, exact=False), np.pi / 4), 0.5, rtol=1e-15)


def test_eval_circle_normalizes():
    f = binary(0, 4, 0, exact=False)
    assert np.isclose(eval_circle(f, np.pi / 4), 0.5)


@pytest.mark.parametrize("d", [1, 2, 5, 8])
def test_eval_circle_antipodal_parity(d):
    f = sample_kostlan_binary(d, make_stream(7, d))
    th = np.linspace(0, np.pi, 11)
    assert np.allclose(eval_circle(f, th + np.pi), (-1) ** d * eval_circle(f, th), atol=1e-13)


def test_eval_circle_large_degree_finite():
    f = sample_kostlan_binary(1000, make_stream(8, 0))
    v = eval_circle(f, np.linspace(0, np.pi, 50))
    assert np.all(np.isfinite(v))


def test_eval_circle_zero_form():
    with pytest.raises(ZeroFormError):
        eval_circle(binary(0, 0, exact=False), 0.1)


def test_resultant_examples():
    x, y = binary(0, 1), binary(1, 0)
    assert abs(resultant_binary(x, y)) == 1
    assert resultant_binary(x, x) == 0
    assert resultant_binary(x.to_float(), x.to_float()) == 0


def test_resultant_common_root_exact():
    # (x - y)(x + 2y) and (x - y)(3x - y): common root [1:1]
    a = binary(-2, 1, 1)
    b = binary(1, -4, 3)
    assert resultant_binary(a, b) == 0
    assert resultant_binary(a, binary(1, 0, 1)) != 0


def test_resultant_degree_mismatch():
    with pytest.raises(DegreeMismatchError):
        resultant_binary(binary(1, 1), binary(1, 1, 1))


def test_random_d5_resultants_nonzero():
    s = make_stream(9, 0)
    for i in range(10**4):
        g = s.generator(i)
        a, b = sample_kostlan_binary(5, g), sample_kostlan_binary(5, g)
        assert resultant_binary(a, b) != 0


def test_log_abs_resultant_matches():
    s = make_stream(10, 0)
    a, b = sample_kostlan_binary(6, s, 0), sample_kostlan_binary(6, s, 1)
    assert np.isclose(log_abs_resultant(a, b), np.log(abs(resultant_binary(a, b))), rtol=1e-10)
