import numpy as np
import pytest

from pencillab.ensembles import make_stream, sample_pencil
from pencillab.errors import BaseLocusError, DegreeMismatchError
from pencillab.forms import BinaryForm
from pencillab.realroots import critical_angles, pencil_critical_count


def test_squares():
    al = critical_angles(BinaryForm([0.0, 0.0, 1.0]), BinaryForm([1.0, 0.0, 0.0]))
    assert al.certified
    assert np.allclose(al.angles, [0.0, np.pi / 2], atol=1e-12)


def test_moebius_has_no_critical_points():
    al = critical_angles(BinaryForm([0.0, 1.0]), BinaryForm([1.0, 0.0]))
    assert len(al) == 0 and al.certified


def test_common_root_rejected():
    # both vanish at [1:1]
    with pytest.raises(BaseLocusError):
        critical_angles(BinaryForm([-2.0, 1.0, 1.0]), BinaryForm([1.0, -4.0, 3.0]))


def test_proportional_rejected():
    a = BinaryForm([1.0, 2.0, -1.0])
    with pytest.raises(BaseLocusError):
        critical_angles(a, a.scaled(3.0))


def test_degree_mismatch():
    with pytest.raises(DegreeMismatchError):
        critical_angles(BinaryForm([1.0, 2.0]), BinaryForm([1.0, 0.0, 1.0]))


def test_angles_match_count_and_are_critical():
    s = make_stream(31, 0)
    for i in range(40):
        p = sample_pencil(1, 15, s, i)
        al = critical_angles(p.alpha, p.beta)
        rc = pencil_critical_count(p.alpha, p.beta)
        assert len(al) == rc.count
        assert np.all(np.diff(al.angles) > 0)
        # derivative of alpha/beta along the circle vanishes at each angle
        for th in al.angles:
            h = 1e-6
            def u(t):
                from pencillab.forms import eval_circle
                return eval_circle(p.alpha, t) / eval_circle(p.beta, t)
            du = (u(th + h) - u(th - h)) / (2 * h)
            scale = abs(u(th)) + 1
            assert abs(du) < 1e-4 * scale


def test_large_degree_common_root_rejected():
    # above the resultant degree cap; the common root is a double zero of W
    d = 40
    lin = np.polynomial.Polynomial([-1, 1])
    gen = np.random.default_rng(1)
    a = lin * np.polynomial.Polynomial(gen.standard_normal(d))
    b = lin * np.polynomial.Polynomial(gen.standard_normal(d))
    with pytest.raises(BaseLocusError):
        critical_angles(BinaryForm(a.coef), BinaryForm(b.coef))
