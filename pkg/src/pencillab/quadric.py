"""The quadric reduction of the real critical-point density.

A point of the relevant quadric is ``(a_0, b_0, ..., a_n, b_n)`` with
``a_0 b_i = a_i b_0``. It is parametrized by ``psi(a, b, t) =
(a, b, a t_1, b t_1, ..., a t_n, b t_n)``. Together with the second-order
coefficients ``a_ij, b_ij`` it defines

* ``A`` (``n x (2n+2)``) with rows ``(b_i, -b_0 e_i | -a_i, a_0 e_i)``;
* ``B`` (``n x n``) with entries ``a_0 b_ij - b_0 a_ij``, the diagonal
  scaled by ``sqrt(2)``.

The integral estimated here is

    I_n = sqrt(pi)^n int |det B| / sqrt(det A A^T) dmu

where ``dmu`` is the Gaussian measure ``pi^-(n+1) exp(-sum a_i^2 + b_i^2)``
restricted to the quadric (with its induced volume) times independent
``N(0, 1/2)`` laws for ``a_ij, b_ij``. Substituting ``psi`` the integral
splits into an angular, a radial and a ``t`` factor; :func:`quadric_oracle`
evaluates those three one-dimensional pieces by quadrature and
:func:`quadric_mc` estimates the whole integral by importance sampling.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gamma, pi, sqrt

import numpy as np
from scipy import integrate

from .constants import McEstimate, abs_det_mean, predicted_real_density, radial_gamma, sphere_vol, wallis
from .ensembles import RngStream, make_stream

__all__ = [
    "QuadricChart", "ABPair", "DiscrepancyReport", "psi", "jac_psi", "gram_jac_psi",
    "det_rank_one_identity", "build_AB", "aat_closed_form", "normal_jac_ratio",
    "random_chart", "quadric_weights", "quadric_mc", "quadric_oracle", "oracle_factors",
    "reference_chain",
]

_SQRT2 = sqrt(2.0)


def _check_ab(a, b):
    if a == 0 and b == 0:
        raise ValueError("(a, b) must not be the origin")


def psi(a, b, t) -> np.ndarray:
    """Embedded point ``(a, b, a t_1, b t_1, ..., a t_n, b t_n)``."""
    _check_ab(a, b)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty(2 * len(t) + 2)
    out[0], out[1] = a, b
    out[2::2] = a * t
    out[3::2] = b * t
    return out


def quadric_residual(x) -> float:
    """``max_i |a_0 b_i - a_i b_0|`` for an interleaved point."""
    x = np.asarray(x, dtype=float)
    return float(np.max(np.abs(x[0] * x[3::2] - x[2::2] * x[1]), initial=0.0))


def jac_psi(a, b, t) -> float:
    """Volume factor of ``psi``: ``sqrt(1 + |t|^2) * sqrt(a^2 + b^2)^n``."""
    _check_ab(a, b)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    return float(sqrt(1.0 + t @ t) * (a * a + b * b) ** (len(t) / 2))


def _dpsi(a, b, t):
    n = len(t)
    D = np.zeros((2 * n + 2, n + 2))
    D[0, 0] = 1.0
    D[1, 1] = 1.0
    D[2::2, 0] = t
    D[3::2, 1] = t
    for i in range(n):
        D[2 + 2 * i, 2 + i] = a
        D[3 + 2 * i, 2 + i] = b
    return D


def gram_jac_psi(a, b, t) -> float:
    """``sqrt(det(Dpsi^T Dpsi))`` from the explicit differential."""
    _check_ab(a, b)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    D = _dpsi(a, b, t)
    sign, logdet = np.linalg.slogdet(D.T @ D)
    return float(np.exp(0.5 * logdet)) if sign > 0 else 0.0


def det_rank_one_identity(t) -> float:
    """``det(I + t t^T)``, checked against ``1 + |t|^2``."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    dense = float(np.linalg.det(np.eye(len(t)) + np.outer(t, t)))
    closed = 1.0 + float(t @ t)
    assert abs(dense - closed) <= 1e-12 * closed, (dense, closed)
    return dense


@dataclass(frozen=True)
class QuadricChart:
    """Chart point ``(a, b, t)`` with second-order coefficient matrices ``a2, b2``."""

    n: int
    a: float
    b: float
    t: np.ndarray
    a2: np.ndarray
    b2: np.ndarray

    def __post_init__(self):
        _check_ab(self.a, self.b)
        t = np.atleast_1d(np.asarray(self.t, dtype=float))
        a2 = np.asarray(self.a2, dtype=float).reshape(self.n, self.n)
        b2 = np.asarray(self.b2, dtype=float).reshape(self.n, self.n)
        if len(t) != self.n:
            raise ValueError("t must have n entries")
        if not (np.array_equal(a2, a2.T) and np.array_equal(b2, b2.T)):
            raise ValueError("second-order coefficient arrays must be symmetric")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "a2", a2)
        object.__setattr__(self, "b2", b2)

    @property
    def point(self) -> np.ndarray:
        return psi(self.a, self.b, self.t)


@dataclass(frozen=True)
class ABPair:
    A: np.ndarray
    B: np.ndarray


def _ab_from_point(x, a2, b2):
    n = (len(x) - 2) // 2
    a0, b0 = x[0], x[1]
    ai, bi = x[2::2], x[3::2]
    A = np.zeros((n, 2 * n + 2))
    A[:, 0] = bi
    A[:, 1:n + 1] = -b0 * np.eye(n)
    A[:, n + 1] = -ai
    A[:, n + 2:] = a0 * np.eye(n)
    B = a0 * b2 - b0 * a2
    B[np.diag_indices(n)] *= _SQRT2
    return ABPair(A, B)


def build_AB(chart: QuadricChart) -> ABPair:
    """The matrices ``A`` and ``B`` at a chart point."""
    return _ab_from_point(chart.point, chart.a2, chart.b2)


def build_AB_at(x, a2, b2) -> ABPair:
    """``A`` and ``B`` at an arbitrary interleaved point (not necessarily on the quadric)."""
    return _ab_from_point(np.asarray(x, dtype=float), np.asarray(a2, float), np.asarray(b2, float))


def aat_reference(x) -> np.ndarray:
    """``(a_i a_j + b_i b_j) + (a_0^2 + b_0^2) I`` at an interleaved point."""
    x = np.asarray(x, dtype=float)
    ai, bi = x[2::2], x[3::2]
    return np.outer(ai, ai) + np.outer(bi, bi) + (x[0] ** 2 + x[1] ** 2) * np.eye(len(ai))


def aat_closed_form(a, b, t) -> np.ndarray:
    """``(a^2 + b^2)(I + t t^T)``; equals ``A A^T`` only on the quadric."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    return (a * a + b * b) * (np.eye(len(t)) + np.outer(t, t))


def normal_jac_ratio(chart: QuadricChart) -> float:
    """``|det B| / sqrt(det A A^T)``.

    The square root is computed from ``A`` directly and from the closed
    form ``(a^2+b^2)^n (1+|t|^2)``; the two must agree to ``1e-10``.
    """
    ab = build_AB(chart)
    direct = float(np.linalg.det(ab.A @ ab.A.T))
    if not direct > 0:
        raise ValueError("A A^T is singular at this chart point")
    r2 = chart.a ** 2 + chart.b ** 2
    closed = r2 ** chart.n * (1.0 + float(chart.t @ chart.t))
    s_direct, s_closed = sqrt(direct), sqrt(closed)
    assert abs(s_direct - s_closed) <= 1e-10 * s_closed, (s_direct, s_closed)
    return abs(float(np.linalg.det(ab.B))) / s_closed


def random_chart(n: int, gen: np.random.Generator) -> QuadricChart:
    """Chart point with Gaussian ``a, b``, Cauchy ``t`` and ``N(0, 1/2)`` second-order coefficients."""
    a, b = gen.standard_normal(2)
    t = gen.standard_cauchy(n)
    a2 = np.triu(gen.normal(0, sqrt(0.5), (n, n)))
    b2 = np.triu(gen.normal(0, sqrt(0.5), (n, n)))
    return QuadricChart(n, a, b, t, a2 + np.triu(a2, 1).T, b2 + np.triu(b2, 1).T)


# ---------------------------------------------------------------------------
# the integral


def quadric_weights(n: int, m: int, gen: np.random.Generator) -> np.ndarray:
    """``m`` importance weights whose mean estimates ``I_n``.

    Proposal: ``t_i`` iid standard Cauchy; ``(a, b)`` given ``t`` centered
    Gaussian with variance ``1/(2(1+|t|^2))`` per coordinate, which makes
    the ``exp(-(a^2+b^2)(1+|t|^2))`` factor exact; ``a_ij, b_ij`` iid
    ``N(0, 1/2)`` as in the target. The weight is

        sqrt(pi)^n pi^-(n+1) * Jac(psi) |det B| / sqrt(det A A^T)
        * pi / (1 + |t|^2) * prod_i pi (1 + t_i^2)
    """
    t = gen.standard_cauchy((m, n))
    s2 = 1.0 + np.einsum("ij,ij->i", t, t)
    ab = gen.standard_normal((m, 2)) / np.sqrt(2.0 * s2)[:, None]
    a, b = ab[:, 0], ab[:, 1]
    iu = np.triu_indices(n)
    a2v = gen.normal(0.0, sqrt(0.5), (m, len(iu[0])))
    b2v = gen.normal(0.0, sqrt(0.5), (m, len(iu[0])))
    Bv = a[:, None] * b2v - b[:, None] * a2v
    diag = iu[0] == iu[1]
    Bv[:, diag] *= _SQRT2
    B = np.zeros((m, n, n))
    B[:, iu[0], iu[1]] = Bv
    B[:, iu[1], iu[0]] = Bv
    det_b = np.abs(np.linalg.det(B))
    r2 = a * a + b * b
    jac = np.sqrt(s2) * r2 ** (n / 2)
    sq_aat = r2 ** (n / 2) * np.sqrt(s2)
    proposal = np.prod(np.pi * (1.0 + t * t), axis=1) * (np.pi / s2)
    return sqrt(pi) ** n * pi ** -(n + 1) * jac * det_b / sq_aat * proposal


_CHUNK = 1 << 16


@dataclass
class DiscrepancyReport:
    """Measured Monte Carlo value against the reduced quadrature and the predicted constant."""

    n: int
    estimate: float
    stderr: float
    oracle: float
    closed_form: float
    ratio: float
    ratio_ci: tuple
    oracle_rel_gap: float
    factors: dict = field(default_factory=dict)
    reference_factors: dict = field(default_factory=dict)
    factor_ratios: dict = field(default_factory=dict)

    def to_dict(self):
        return {"n": self.n, "estimate": self.estimate, "stderr": self.stderr, "oracle": self.oracle,
                "closed_form": self.closed_form, "ratio": self.ratio, "ratio_ci": list(self.ratio_ci),
                "oracle_rel_gap": self.oracle_rel_gap, "factors": self.factors,
                "reference_factors": self.reference_factors, "factor_ratios": self.factor_ratios}


def oracle_factors(n: int) -> dict:
    """The three one-dimensional factors of ``I_n`` evaluated by quadrature.

    * angular: ``2 pi E|det H|`` with ``H`` the ``sqrt(2)``-diagonal
      Gaussian matrix (``N(0,1)`` diagonal, ``N(0,1/2)`` off the diagonal);
    * radial: ``int_0^inf r^(n+1) exp(-r^2) dr``;
    * t: ``int_{R^n} (1 + |t|^2)^(-(n+2)/2) dt``.
    """
    if n not in (1, 2):
        raise ValueError("oracle implemented for n in {1, 2}")
    angular = 2 * pi * abs_det_mean(n, 0.5, "quadrature").mean
    radial = integrate.quad(lambda r: r ** (n + 1) * np.exp(-r * r), 0, np.inf, epsabs=1e-14, epsrel=1e-13)[0]
    # radial integral in |t| times the sphere volume; x = tan(u) tames the tail
    rho = integrate.quad(lambda u: np.tan(u) ** (n - 1) * np.cos(u) ** (n + 2) / np.cos(u) ** 2,
                         0, pi / 2, epsabs=1e-14, epsrel=1e-13)[0]
    t_factor = sphere_vol(n - 1) * rho
    prefactor = sqrt(pi) ** n * pi ** -(n + 1)
    return {"prefactor": prefactor, "angular": angular, "radial": radial, "t": t_factor}


def quadric_oracle(n: int) -> float:
    """``I_n`` as the product of the quadrature factors of :func:`oracle_factors`."""
    f = oracle_factors(n)
    return f["prefactor"] * f["angular"] * f["radial"] * f["t"]


def reference_chain(n: int) -> dict:
    """Factor values of the closed-form reduction that leads to the predicted constant.

    angular ``2 pi e_r(n)``, radial ``Gamma(n/2+1)/(2 pi)`` and ``t``
    factor ``wallis(n) * Vol(S^(n-1))``. Reported next to
    :func:`oracle_factors` so the source of any mismatch is visible.
    """
    from .constants import e_r

    return {"angular": 2 * pi * e_r(n).mean if n <= 2 else float("nan"),
            "radial": gamma(n / 2 + 1) / (2 * pi),
            "t": wallis(n) * sphere_vol(n - 1)}


def _chunk_weights(args):
    n, seed, stream_id, j, m = args
    return quadric_weights(n, m, RngStream(seed, stream_id).generator(j))


def quadric_mc(n: int, samples: int, rng=None, workers=None):
    """Importance-sampling estimate of ``I_n`` and its discrepancy report.

    Chunk ``j`` of ``2**16`` draws uses counter index ``j`` of the stream,
    and the chunk means are combined in a fixed order, so the result is
    bit-identical for any worker count.

    Returns
    -------
    (McEstimate, DiscrepancyReport)
    """
    from .parallel import pmap

    if not 1 <= n <= 4:
        raise ValueError("n must be in 1..4")
    stream = rng if rng is not None else make_stream(0)
    if not isinstance(stream, RngStream):
        raise TypeError("quadric_mc needs an RngStream for reproducible chunking")
    jobs = [(n, stream.seed, stream.stream_id, j, min(_CHUNK, samples - s))
            for j, s in enumerate(range(0, samples, _CHUNK))]
    w = np.concatenate(pmap(_chunk_weights, jobs, workers))
    est = McEstimate(float(np.mean(w)), float(w.std(ddof=1) / sqrt(len(w))), len(w), stream.seed)
    c_r = predicted_real_density(n).c_r if n <= 2 else float("nan")
    ratio = est.mean / c_r
    half = 1.959963984540054 * est.stderr / c_r
    if n <= 2:
        fac = oracle_factors(n)
        oracle = fac["prefactor"] * fac["angular"] * fac["radial"] * fac["t"]
        ref = reference_chain(n)
        ratios = {k: fac[k] / ref[k] for k in ("angular", "radial", "t")}
    else:
        fac, oracle, ref, ratios = {}, float("nan"), {}, {}
    report = DiscrepancyReport(n, est.mean, est.stderr, oracle, c_r, ratio, (ratio - half, ratio + half),
                               abs(est.mean - oracle) / oracle if oracle == oracle else float("nan"),
                               fac, ref, ratios)
    return est, report
