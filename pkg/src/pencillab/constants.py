"""Scalar constants: expected absolute determinants, volumes and peak-section factors.

Two Gaussian conventions appear side by side and are kept apart by name:

* ``e_r`` uses the symmetric ensemble with unit-variance coordinates on
  and above the diagonal (so ``e_r(1) = sqrt(2/pi)``);
* ``abs_det_mean(n, offdiag_var)`` lets the off-diagonal variance vary;
  ``offdiag_var = 1/2`` is the Hessian matrix that actually appears in
  the Kac-Rice density of a Kostlan pencil (see :func:`kac_rice_mean`).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from math import gamma, lgamma, log, pi, sqrt

import numpy as np
from scipy import integrate, special

from .ensembles import RngStream, make_stream
from .errors import UnsupportedError

__all__ = [
    "McEstimate", "DensityConstant", "e_r", "abs_det_mean", "E_R2_GOLDEN",
    "double_factorial", "wallis", "radial_gamma", "sphere_vol", "fs_volume_rp",
    "predicted_real_density", "kac_rice_mean", "kac_rice_density",
    "peak_lambda", "peak_radius", "growth_exponent",
]

# E|g11 g22 - g12^2| with iid N(0, 1) entries, computed by nested adaptive
# quadrature (see _abs_det2_quad) before the Monte Carlo code was written.
E_R2_GOLDEN = 1.3318399117607065


@dataclass(frozen=True)
class McEstimate:
    """Monte Carlo mean with its standard error."""

    mean: float
    stderr: float
    n_samples: int
    seed: int | None
    excluded: int = 0

    def within(self, value, k=3.0) -> bool:
        return abs(self.mean - value) <= k * self.stderr

    def to_dict(self):
        return {"value": self.mean, "stderr": self.stderr, "n_samples": self.n_samples,
                "seed": self.seed, "excluded": self.excluded}


def _mc_from_values(x, seed, excluded=0):
    x = np.asarray(x, dtype=float)
    n = x.size
    sd = x.std(ddof=1) if n > 1 else float("nan")
    return McEstimate(float(np.mean(x)), float(sd / sqrt(n)), n, seed, excluded)


# ---------------------------------------------------------------------------
# expected absolute determinants


def _abs_det2_quad(offdiag_var=1.0, tol=1e-12):
    """``E|X Y - Z^2|`` with ``X, Y ~ N(0,1)`` and ``Z ~ N(0, offdiag_var)``.

    The product ``U = X Y`` has density ``K_0(|u|) / pi``. For fixed
    ``c = Z^2`` the inner integral ``int |u - c| K_0(|u|) du / pi`` is split at
    the singular point ``0`` and at the kink ``c``; the outer integral runs
    over ``Z >= 0`` against twice the half-normal density.
    """
    dens = lambda u: special.k0(abs(u)) / pi

    def inner(c):
        neg = integrate.quad(lambda u: (c + u) * dens(u), 0, np.inf, epsabs=tol, epsrel=tol, limit=200)[0]
        mid = integrate.quad(lambda u: (c - u) * dens(u), 0, c, epsabs=tol, epsrel=tol, limit=200)[0] if c > 0 else 0.0
        hi = integrate.quad(lambda u: (u - c) * dens(u), c, np.inf, epsabs=tol, epsrel=tol, limit=200)[0]
        return neg + mid + hi

    s = sqrt(offdiag_var)
    phi = lambda z: 2.0 * np.exp(-0.5 * (z / s) ** 2) / (s * sqrt(2 * pi))
    with warnings.catch_warnings():
        # the K_0 log singularity makes QUADPACK report roundoff well below tol
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        return integrate.quad(lambda z: inner(z * z) * phi(z), 0, np.inf, epsabs=tol, epsrel=tol,
                              limit=200)[0]


def abs_det_mean(n: int, offdiag_var: float = 1.0, method: str = "quadrature",
                 samples: int = 10**6, rng=None) -> McEstimate:
    """``E|det A|`` for symmetric ``A`` with ``N(0,1)`` diagonal and ``N(0, offdiag_var)`` off-diagonal.

    ``method="quadrature"`` is available for ``n <= 2`` and returns a
    :class:`McEstimate` with zero standard error.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if method == "quadrature":
        if n == 1:
            val = integrate.quad(lambda x: abs(x) * np.exp(-0.5 * x * x) / sqrt(2 * pi),
                                 -np.inf, np.inf, epsabs=1e-13, epsrel=1e-13)[0]
        elif n == 2:
            val = _abs_det2_quad(offdiag_var)
        else:
            raise UnsupportedError("quadrature is only implemented for n <= 2")
        return McEstimate(val, 0.0, 0, None)
    if method != "mc":
        raise ValueError(f"unknown method {method!r}")
    stream = rng if rng is not None else make_stream(0)
    seed = stream.seed if isinstance(stream, RngStream) else None
    vals = _mc_abs_det(n, offdiag_var, samples, stream)
    return _mc_from_values(vals, seed)


_CHUNK = 1 << 16


def _mc_abs_det(n, offdiag_var, samples, stream):
    """``|det|`` of ``samples`` matrices; chunk ``j`` uses counter index ``j``."""
    iu = np.triu_indices(n)
    diag = iu[0] == iu[1]
    scale = np.where(diag, 1.0, sqrt(offdiag_var))
    out = np.empty(samples)
    for j, start in enumerate(range(0, samples, _CHUNK)):
        m = min(_CHUNK, samples - start)
        gen = stream.generator(j) if isinstance(stream, RngStream) else stream
        vals = gen.standard_normal((m, len(iu[0]))) * scale
        A = np.zeros((m, n, n))
        A[:, iu[0], iu[1]] = vals
        A[:, iu[1], iu[0]] = vals
        out[start:start + m] = np.abs(np.linalg.det(A))
    return out


def e_r(n: int, method: str = "quadrature", samples: int = 10**6, rng=None) -> McEstimate:
    """Expected absolute determinant of the unit-variance symmetric ensemble.

    Parameters
    ----------
    n : int
    method : {"quadrature", "mc"}
        Quadrature reaches about ``1e-12`` absolute for ``n <= 2``.
    samples : int
        Monte Carlo sample count.
    rng : RngStream, optional
        Defaults to ``make_stream(0)``.

    Examples
    --------
    >>> round(e_r(1).mean, 6)
    0.797885
    """
    return abs_det_mean(n, 1.0, method, samples, rng)


# ---------------------------------------------------------------------------
# closed-form factors


def double_factorial(m: int) -> int:
    """``m!!`` with ``0!! = (-1)!! = 1``."""
    if m < -1:
        raise ValueError("double factorial defined for m >= -1")
    out = 1
    while m > 1:
        out *= m
        m -= 2
    return out


def wallis(m: int) -> float:
    """``int_0^{pi/2} cos^(m-1) t dt``.

    Equals ``(m-2)!!/(m-1)!!`` times ``pi/2`` when ``m`` is odd.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    val = double_factorial(m - 2) / double_factorial(m - 1)
    return val * pi / 2 if m % 2 == 1 else float(val)


def radial_gamma(n: int) -> float:
    """``int_0^inf r^(n+1) exp(-r^2) dr = Gamma(n/2 + 1) / 2``.

    Uses the recursion ``Gamma(s + 1) = s Gamma(s)`` from ``Gamma(1) = 1`` or
    ``Gamma(1/2) = sqrt(pi)``.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if n % 2 == 0:
        g = 1.0
        s = 1
        while s < n // 2 + 1:
            g *= s
            s += 1
    else:
        g = sqrt(pi)
        s = 0.5
        while s < n / 2 + 1 - 1e-9:
            g *= s
            s += 1
    return g / 2


def sphere_vol(k: int) -> float:
    """Volume of the unit sphere ``S^k`` in ``R^(k+1)``."""
    if k < 0:
        raise ValueError("k must be >= 0")
    return 2 * pi ** ((k + 1) / 2) / gamma((k + 1) / 2)


def fs_volume_rp(n: int, cutoff: float | None = None) -> float:
    """Volume of ``RP^n`` for the metric ``omega(., i.)`` with ``int omega^n = 1``.

    In the affine chart the volume density is
    ``pi^(-n/2) (1 + |x|^2)^(-(n+1)/2)``; for ``n = 1`` this is
    ``(1 + x^2)^(-1) / sqrt(pi)``.

    Parameters
    ----------
    n : {1, 2}
    cutoff : float, optional
        Integrate over ``|x_i| <= cutoff`` instead of the whole chart; used
        to check the tail.
    """
    if n == 1:
        # x = tan(t) maps the chart onto (-pi/2, pi/2) and removes the slow 1/x^2 tail
        T = pi / 2 if cutoff is None else float(np.arctan(cutoff))
        g = lambda t: (1.0 / (1.0 + np.tan(t) ** 2)) / np.cos(t) ** 2
        val = integrate.quad(g, -T, T, epsabs=1e-13, epsrel=1e-13)[0]
        return val / sqrt(pi)
    if n == 2:
        lo, hi = (-np.inf, np.inf) if cutoff is None else (-cutoff, cutoff)
        val = integrate.dblquad(lambda y, x: (1.0 + x * x + y * y) ** -1.5, lo, hi, lo, hi,
                                epsabs=1e-11, epsrel=1e-11)[0]
        return val / pi
    raise UnsupportedError("Fubini-Study volume implemented for RP^1 and RP^2 only")


@dataclass(frozen=True)
class DensityConstant:
    """Predicted leading constant of ``E[#real critical points] / sqrt(d)^n``.

    ``c_r`` multiplies the real volume; ``predicted_density_cpn`` is
    ``c_r * fs_volume_rp(n)`` and is ``None`` when that volume is not
    implemented.
    """

    n: int
    e_r_value: float
    c_r: float
    predicted_density_cpn: float | None

    def __post_init__(self):
        if not self.c_r > 0:
            raise ValueError("c_r must be positive")


def predicted_real_density(n: int, e_r_value: float | None = None) -> DensityConstant:
    """``c_r = n!!/(n-1)!! * e_r(n) * (pi/2 if n is odd)`` and ``c_r * Vol(RP^n)``.

    Examples
    --------
    >>> round(predicted_real_density(1).c_r, 5)
    1.25331
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if e_r_value is None:
        e_r_value = e_r(n).mean if n <= 2 else e_r(n, "mc", 10**6).mean
    c = double_factorial(n) / double_factorial(n - 1) * e_r_value
    if n % 2 == 1:
        c *= pi / 2
    vol = c * fs_volume_rp(n) if n <= 2 else None
    return DensityConstant(n, e_r_value, c, vol)


def kac_rice_mean(n: int, d: int) -> float:
    """Exact ``E[#real critical points]`` of a Kostlan pencil of degree ``d`` on ``RP^n``.

    At any point the pencil is critical iff two independent Gaussian jets
    satisfy ``grad = 0``; the Kac-Rice density is constant on ``RP^n`` and
    equals ``E|det H| (d - 1)^(n/2)`` times the volume density in the
    normalization of :func:`fs_volume_rp`, where ``H`` has ``N(0,1)``
    diagonal and ``N(0,1/2)`` off-diagonal entries. For ``n = 1`` this is
    ``sqrt(2 (d - 1))``, for ``n = 2`` it is ``2 (d - 1)(sqrt(2) - 1/2)``.
    """
    if n not in (1, 2):
        raise UnsupportedError("implemented for n in {1, 2}")
    if d < 1:
        raise ValueError("d must be >= 1")
    return abs_det_mean(n, 0.5).mean * fs_volume_rp(n) * (d - 1) ** (n / 2)


def kac_rice_density(n: int) -> float:
    """Limit of ``kac_rice_mean(n, d) / sqrt(d)^n``: ``sqrt(2)`` for ``n=1``, ``2 sqrt(2) - 1`` for ``n=2``."""
    return abs_det_mean(n, 0.5).mean * fs_volume_rp(n)


# ---------------------------------------------------------------------------
# peak sections on CP^1

_WHICH = {"0": 0, "i": 1, "kk": 2}


def peak_radius(d: int) -> float:
    """Truncation radius ``log d / sqrt d`` of the peak-section integrals."""
    return log(d) / sqrt(d)


def peak_lambda(d: int, p: int = 0, full_range: bool = False, which: str | None = None) -> float:
    """Normalization ``lambda`` of the degree-``d`` peak section with jet ``x^p`` on ``CP^1``.

    ``lambda^-2 = 2 int_0^R r^(2p+1) (1 + r^2)^(-(d+2)) dr`` in the raw
    Fubini-Study chart, with ``R = log d / sqrt d`` or ``R = inf`` when
    ``full_range`` is set. ``which`` may name the jet instead of ``p``:
    ``"0"``, ``"i"`` (first order), ``"kk"`` (second order, pure).
    """
    if which is not None:
        if which == "ij":
            raise UnsupportedError("mixed second-order jets need n >= 2")
        if which not in _WHICH:
            raise ValueError(f"unknown jet {which!r}")
        p = _WHICH[which]
    if d < 4:
        raise ValueError("d must be >= 4")
    if full_range:
        # 2 int_0^inf r^(2p+1) (1+r^2)^(-(d+2)) dr = B(p+1, d+1-p)
        lam2 = -(lgamma(p + 1) + lgamma(d + 1 - p) - lgamma(d + 2))
        return float(np.exp(0.5 * lam2))
    R = peak_radius(d)
    # substitute r = s / sqrt(d) so the integrand has unit width
    f = lambda s: 2 * s ** (2 * p + 1) * np.exp(-(d + 2) * np.log1p(s * s / d))
    val = integrate.quad(f, 0, R * sqrt(d), epsabs=0, epsrel=1e-13, limit=200)[0]
    val /= d ** (p + 1)
    return float(val ** -0.5)


def growth_exponent(p: int, ds=(100, 1000, 10000), full_range: bool = False) -> float:
    """Least-squares slope of ``log lambda`` against ``log sqrt(d)``."""
    x = np.log(np.sqrt(np.asarray(ds, dtype=float)))
    y = np.log([peak_lambda(int(d), p, full_range) for d in ds])
    return float(np.polyfit(x, y, 1)[0])
