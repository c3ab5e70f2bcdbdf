import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pencillab.ensembles import make_stream, sample_kostlan_binary, sample_pencil
from pencillab.errors import ZeroFormError
from pencillab.forms import BinaryForm, wronskian_binary
from pencillab.realroots import (AngleList, RootCount, RootOptions, count_roots_circle,
                                 eigen_real_count, eigen_roots, sturm_count)
from pencillab.realroots.sturm import sturm_count_poly


def rounded(f, bits=30):
    # a nearby form with dyadic coefficients, so Sturm sees exactly what the grid sees
    c = f.to_float().coeffs
    c = c / np.abs(c).max()
    return BinaryForm(np.round(c * 2.0**bits) / 2.0**bits)


def test_sturm_examples():
    assert sturm_count(BinaryForm([-1, 0, 1], exact=True)) == 2
    assert sturm_count(BinaryForm([1, 0, 1], exact=True)) == 0
    # x y (x^2 - 4 y^2): roots 0, +-2 and [1:0]
    assert sturm_count(BinaryForm([0, -4, 0, 1, 0], exact=True)) == 4


def test_sturm_distinct_roots_only():
    # (x - y)^3 (x + y) has two distinct projective roots
    p = np.polynomial.Polynomial([-1, 1]) ** 3 * np.polynomial.Polynomial([1, 1])
    assert sturm_count(BinaryForm([int(c) for c in p.coef], exact=True)) == 2
    # y^2 x^2: roots [1:0] and [0:1]
    assert sturm_count(BinaryForm([0, 0, 1, 0, 0], exact=True)) == 2


def test_sturm_constant_and_zero():
    assert sturm_count_poly([5]) == 0
    with pytest.raises(ZeroFormError):
        sturm_count(BinaryForm([0, 0, 0], exact=True))


def test_sturm_accepts_floats_without_rounding():
    # 0.1 is not dyadic; the exact conversion keeps the two roots distinct
    assert sturm_count(BinaryForm([-0.1 * 0.1, 0.0, 1.0])) == 2


def test_eigen_complex_count_is_2d_minus_2():
    s = make_stream(21, 0)
    p = sample_pencil(1, 10, s, 0)
    r = eigen_roots(wronskian_binary(p.alpha, p.beta))
    assert len(r) == 18
    assert np.all(np.isfinite(r))


def test_eigen_simple_roots():
    r = np.sort(eigen_roots(BinaryForm([-1.0, 0.0, 1.0])).real)
    assert np.allclose(r, [-1, 1])


def test_eigen_root_at_infinity_and_zero():
    r = eigen_roots(BinaryForm([0.0, 1.0, 0.0]))
    assert np.sum(np.isinf(r.real)) == 1 and np.sum(r == 0) == 1
    assert eigen_real_count(BinaryForm([0.0, 1.0, 0.0])) == 2


def test_eigen_vs_sturm_random_integer_polys():
    gen = np.random.default_rng(2024)
    bad = 0
    for _ in range(1000):
        D = int(gen.integers(1, 21))
        c = gen.integers(-20, 21, D + 1)
        if not c.any():
            continue
        f = BinaryForm([int(v) for v in c], exact=True)
        bad += eigen_real_count(f) != sturm_count(f)
    assert bad == 0


def test_circle_examples():
    rc = count_roots_circle(BinaryForm([0.0, 1.0, 0.0]))
    assert (rc.count, rc.certified) == (2, True)
    rc = count_roots_circle(BinaryForm([1.0, 0.0, 1.0]))
    assert (rc.count, rc.certified) == (0, True)


def test_circle_root_at_seam_counts_once():
    # x^2 - y^2 has roots at pi/4 and 3pi/4; y (x^2 - y^2) adds theta = 0
    assert count_roots_circle(BinaryForm([-1.0, 0.0, 1.0])).count == 2
    assert count_roots_circle(BinaryForm([0.0, -1.0, 0.0, 1.0])).count == 3


def test_circle_zero_form():
    with pytest.raises(ZeroFormError):
        count_roots_circle(BinaryForm([0.0, 0.0]))


def test_circle_reports_double_root_as_uncertain_or_correct():
    # (x - y)^2 has one tangential root; never silently miscounted
    rc = count_roots_circle(BinaryForm([1.0, -2.0, 1.0]))
    assert rc.count == 1 or not rc.certified


def test_grid_vs_sturm_degree_up_to_40():
    s = make_stream(22, 0)
    checked = 0
    for i in range(300):
        D = 2 + i % 39
        f = rounded(sample_kostlan_binary(D, s, i))
        rc = count_roots_circle(f)
        if rc.certified:
            checked += 1
            assert rc.count == sturm_count(f)
    assert checked >= 295


def test_count_bounded_and_parity():
    s = make_stream(23, 0)
    for i in range(200):
        D = 1 + i % 25
        f = sample_kostlan_binary(D, s, i)
        rc = count_roots_circle(f)
        assert rc.count <= D
        if rc.certified and abs(f.coeffs[0]) > 0:
            # no root at theta = 0 and simple roots almost surely
            assert rc.count % 2 == D % 2


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.floats(1e-6, 1e6), st.booleans())
def test_count_scale_invariant(index, c, neg):
    f = sample_kostlan_binary(9, make_stream(24, 0), index)
    g = f.scaled(-c if neg else c)
    a, b = count_roots_circle(f), count_roots_circle(g)
    if a.certified and b.certified:
        assert a.count == b.count


def test_rootcount_contract():
    with pytest.raises(ValueError):
        RootCount(-1, True)
    with pytest.raises(ValueError):
        RootCount(1, True, [(0.0, 0.1)])


def test_anglelist_contract():
    AngleList(np.array([0.0, 1.0, 3.0]))
    with pytest.raises(ValueError):
        AngleList(np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        AngleList(np.array([0.5, np.pi]))


def test_root_options_grid_density():
    from pencillab.realroots.circle import grid_angles
    th = grid_angles(50, RootOptions())
    assert len(th) - 1 >= 8 * 50
