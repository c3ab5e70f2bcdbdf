"""Certified counting of real roots of binary forms on the circle.

A binary form ``f`` of degree ``D`` restricted to ``(cos t, sin t)`` is a
trigonometric polynomial of degree at most ``D`` with
``f(t + pi) = (-1)^D f(t)``. Its projective real roots are the zeros in
``[0, pi)``. The counter samples ``8 D`` points on ``[0, pi)``; together
with the parity these are ``16 D`` equispaced samples of the full
period, so a real FFT recovers the Fourier coefficients without
aliasing. From them we get a rigorous bound ``B2 >= sup |f''|`` (the
weighted sum ``sum k^2 |c_k|`` plus rounding slack). For Kostlan
pencils the spectrum is concentrated at frequencies of order
``sqrt(D)``, so ``B2`` is far below the Bernstein bound ``D^2 sup|f|``.

Each grid interval of length ``h`` is then certified as follows, with
``K = B2 h^2 / 2``:

* the function stays within ``K s (1 - s)`` of its chord, so a
  same-sign interval whose chord clears that parabola has no root;
* on a sign-change interval, roots can only sit where the chord is
  within ``K / 4`` of zero; if the function is monotone on that window
  (``|f(b) - f(a)| > B2 |b - a|^2``) the interval holds exactly one root.

Intervals that pass neither test (near tangencies, close root pairs)
are refined 100 fold, up to two levels; whatever is still unresolved is
reported as uncertain and the count is not certified.

The grid carries an irrational offset, so roots at "nice" angles such as
``0`` or ``pi/2`` never land on grid points. The interval that wraps past
``pi`` is handled like any other, which gives the half-open seam
convention for free: a root at ``t = 0`` is counted once and reported
as ``0``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ..errors import ZeroFormError
from ..forms import _half_log_binom, bombieri_coefficients, circle_basis

__all__ = [
    "RootOptions",
    "RootCount",
    "AngleList",
    "CircleFunction",
    "FormOnCircle",
    "WronskianOnCircle",
    "isolate",
    "bisect_brackets",
    "count_roots_circle",
    "grid_angles",
    "normalize_angles",
]

_EPS = np.finfo(float).eps
_OFFSET = 0.3819660112501051  # 2 - golden ratio


@dataclass(frozen=True)
class RootOptions:
    """Tolerances for the circle counter.

    Attributes
    ----------
    grid_factor : int
        Grid points per unit of degree on ``[0, pi)``.
    refine_factor : int
        Subdivision factor applied to an interval that fails certification.
    refine_levels : int
        How many times refinement may be applied before giving up.
    bisect_width : float
        Target bracket width (radians) for reported angles.
    noise_factor : float
        Safety multiplier on the floating-point error bound of an evaluation.
    min_grid : int
        Lower bound on the grid size (matters for tiny degrees).
    """

    grid_factor: int = 8
    refine_factor: int = 100
    refine_levels: int = 2
    bisect_width: float = 1e-12
    noise_factor: float = 4.0
    min_grid: int = 16


@dataclass
class RootCount:
    """Number of distinct real projective roots, with a certification flag."""

    count: int
    certified: bool
    uncertain_regions: list = field(default_factory=list)
    method: str = "grid"

    def __post_init__(self):
        if self.count < 0:
            raise ValueError("count must be nonnegative")
        if self.certified and self.uncertain_regions:
            raise ValueError("a certified count cannot carry uncertain regions")


@dataclass
class AngleList:
    """Sorted root angles in ``[0, pi)``."""

    angles: np.ndarray
    certified: bool = True

    def __post_init__(self):
        a = np.asarray(self.angles, dtype=float)
        if a.size and (np.any(np.diff(a) <= 0) or a[0] < 0 or a[-1] >= np.pi):
            raise ValueError("angles must be strictly increasing inside [0, pi)")
        self.angles = a

    def __len__(self):
        return len(self.angles)


def _blocked(theta, fn, width, budget=1 << 22):
    """Apply ``fn`` to chunks of ``theta`` so basis matrices stay near ``budget`` entries."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    size = max(1, budget // max(1, width))
    if theta.size <= size:
        return fn(theta)
    parts = [fn(theta[i:i + size]) for i in range(0, theta.size, size)]
    if isinstance(parts[0], tuple):
        return tuple(np.concatenate(x) for x in zip(*parts))
    return np.concatenate(parts)


@lru_cache(maxsize=64)
def basis_l1_bound(D):
    """Upper bound on the row 1-norm ``sum_k |b_k(t)|`` of the degree ``D`` basis.

    Sampled on a fine grid of ``[0, pi/2]`` (the norm is symmetric under
    ``t -> pi/2 - t`` and ``t -> -t``) with a 1% margin for the gaps.
    """
    t = np.linspace(0.0, np.pi / 2, 4 * D + 5)
    rows = np.abs(circle_basis(D, t)).sum(axis=1)
    return 1.01 * float(rows.max())


def _basis_rel_error(D):
    """Relative error of one basis entry: log-space assembly costs about ``|exponent| eps``."""
    return 8 * _EPS * (2 * float(np.max(_half_log_binom(D))) + 1)


class CircleFunction:
    """A trigonometric polynomial of known degree with rounding-error bounds.

    Subclasses set ``degree`` and ``noise`` (an absolute bound on the
    rounding error of any single evaluation) and implement
    :meth:`evaluate`. ``evaluate(theta, with_error=True)`` returns the
    values together with sharper per-point error bounds.
    """

    degree: int
    noise: float

    def evaluate(self, theta, with_error=False):  # pragma: no cover - interface
        raise NotImplementedError


class FormOnCircle(CircleFunction):
    """``f(cos t, sin t)`` for a binary form, scaled to unit max Bombieri coefficient."""

    def __init__(self, f, noise_factor=4.0):
        if f.is_zero:
            raise ZeroFormError("zero form")
        self.g, _ = bombieri_coefficients(f)
        self.degree = f.degree
        self._rel = noise_factor * ((self.degree + 2) * _EPS + _basis_rel_error(self.degree))
        self.noise = self._rel * basis_l1_bound(self.degree) * float(np.max(np.abs(self.g)))

    def evaluate(self, theta, with_error=False):
        def block(t):
            P = circle_basis(self.degree, t)
            v = P @ self.g
            if not with_error:
                return v
            return v, self._rel * (np.abs(P) @ np.abs(self.g))

        return _blocked(theta, block, self.degree + 1)


class WronskianOnCircle(CircleFunction):
    """The Wronskian of a pencil on the circle, evaluated without forming its coefficients.

    With ``g`` the unit-scaled Bombieri coefficients of a degree ``d`` form,
    ``d_x`` and ``d_y`` of the form have Bombieri coefficients
    ``sqrt(d) * u`` and ``sqrt(d) * v`` in degree ``d - 1``, where
    ``u_j = sqrt(j + 1) g_(j+1)`` and ``v_j = sqrt(d - j) g_j``. The
    Wronskian on the circle is then a positive multiple of
    ``(P u_a)(P v_b) - (P v_a)(P u_b)`` for the degree ``d - 1`` basis ``P``.
    Coefficients of the Wronskian itself would overflow for ``d`` near 1000.
    """

    def __init__(self, alpha, beta, noise_factor=4.0):
        if alpha.degree != beta.degree:
            raise ValueError("pencil forms must share a degree")
        d = alpha.degree
        ga, _ = bombieri_coefficients(alpha)
        gb, _ = bombieri_coefficients(beta)
        self._setup(d, derivative_columns(ga, gb), noise_factor)

    @classmethod
    def from_columns(cls, d, cols, noise_factor=4.0):
        obj = cls.__new__(cls)
        obj._setup(d, cols, noise_factor)
        return obj

    def _setup(self, d, cols, noise_factor):
        self.d = d
        self.degree = 2 * d - 2
        self.cols = cols
        self._rel = noise_factor * ((d + 2) * _EPS + _basis_rel_error(d - 1))
        # global bound: sum_k |P_ik w_k| <= |P_i|_1 max|w|
        n = basis_l1_bound(d - 1) * np.max(np.abs(cols), axis=0)
        dl = self._rel * n
        self.noise = float(dl[0] * n[3] + n[0] * dl[3] + dl[1] * n[2] + n[1] * dl[2]
                           + noise_factor * 2 * _EPS * (n[0] * n[3] + n[1] * n[2])) + 1e-300

    def evaluate(self, theta, with_error=False):
        def block(t):
            P = circle_basis(self.d - 1, t)
            A = P @ self.cols
            v = A[:, 0] * A[:, 3] - A[:, 1] * A[:, 2]
            if not with_error:
                return v
            dl = self._rel * (np.abs(P) @ np.abs(self.cols))
            aA = np.abs(A)
            err = (dl[:, 0] * aA[:, 3] + aA[:, 0] * dl[:, 3] + dl[:, 0] * dl[:, 3]
                   + dl[:, 1] * aA[:, 2] + aA[:, 1] * dl[:, 2] + dl[:, 1] * dl[:, 2]
                   + 4 * _EPS * (aA[:, 0] * aA[:, 3] + aA[:, 1] * aA[:, 2]))
            return v, err

        return _blocked(theta, block, self.d)


def derivative_columns(ga, gb):
    """Stack ``[u_a, v_a, u_b, v_b]`` as columns (see :class:`WronskianOnCircle`)."""
    d = len(ga) - 1
    j = np.arange(d)
    return np.stack([np.sqrt(j + 1) * ga[1:], np.sqrt(d - j) * ga[:-1],
                     np.sqrt(j + 1) * gb[1:], np.sqrt(d - j) * gb[:-1]], axis=1)


def grid_angles(degree, opts=RootOptions()):
    """The level-0 grid: ``M + 1`` angles, the last one equal to the first plus ``pi``."""
    M = max(opts.grid_factor * degree, opts.min_grid)
    h = np.pi / M
    return (np.arange(M + 1) + _OFFSET) * h


def _chord_clear(A, B, ea, eb, K):
    """True where the parabola bound keeps a same-sign interval away from zero.

    The true endpoint magnitudes are at least ``|A| - ea`` and ``|B| - eb``;
    the function is at least chord minus ``K s (1 - s)``.
    """
    a, b = np.abs(A) - ea, np.abs(B) - eb
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(K > 0, (K - (b - a)) / (2 * K), 0.0)
    s = np.clip(s, 0.0, 1.0)
    low = a + (b - a) * s - K * s * (1 - s)
    return (a > 0) & (b > 0) & (low > 0)


def _scan(func, lo, hi, va, vb, ea, eb, B2, level, opts, out_brackets, out_uncertain):
    """Classify the intervals ``[lo_i, hi_i]`` (vectorized over ``i``)."""
    h = hi - lo
    K = B2 * h * h / 2
    sure_a, sure_b = np.abs(va) > ea, np.abs(vb) > eb
    same = (va * vb > 0) & sure_a & sure_b
    opp = (va * vb < 0) & sure_a & sure_b

    refine = ~(same | opp)
    clear = same & _chord_clear(va, vb, ea, eb, K)
    refine |= same & ~clear

    mono = opp & (np.abs(vb - va) - ea - eb > 2 * K)
    for i in np.flatnonzero(mono):
        out_brackets.append((lo[i], hi[i], va[i], vb[i]))

    # sign change but not monotone on the whole interval: shrink to the window
    # where the chord is within K/4 + errors of zero and retry there
    rest = np.flatnonzero(opp & ~mono)
    if rest.size:
        A, B = va[rest], vb[rest]
        s0 = A / (A - B)
        w = 1.01 * (K[rest] / 4 + ea[rest] + eb[rest]) / np.abs(B - A)
        s_lo, s_hi = np.clip(s0 - w, 0.0, 1.0), np.clip(s0 + w, 0.0, 1.0)
        t_lo = lo[rest] + s_lo * h[rest]
        t_hi = lo[rest] + s_hi * h[rest]
        vals, errs = func.evaluate(np.concatenate([t_lo, t_hi]), with_error=True)
        n = rest.size
        f_lo = np.where(s_lo == 0, A, vals[:n])
        f_hi = np.where(s_hi == 1, B, vals[n:])
        e_lo = np.where(s_lo == 0, ea[rest], errs[:n])
        e_hi = np.where(s_hi == 1, eb[rest], errs[n:])
        hw = t_hi - t_lo
        ok = ((f_lo * f_hi < 0) & (np.abs(f_lo) > e_lo) & (np.abs(f_hi) > e_hi)
              & (np.abs(f_hi - f_lo) - e_lo - e_hi > B2 * hw * hw))
        for k in np.flatnonzero(ok):
            out_brackets.append((t_lo[k], t_hi[k], f_lo[k], f_hi[k]))
        refine[rest[~ok]] = True

    idx = np.flatnonzero(refine)
    if not idx.size:
        return
    if level >= opts.refine_levels:
        for i in idx:
            out_uncertain.append((float(lo[i]), float(hi[i])))
        return
    r = opts.refine_factor
    frac = np.arange(1, r) / r
    inner = lo[idx, None] + frac[None, :] * h[idx, None]
    vals, errs = func.evaluate(inner.ravel(), with_error=True)
    vals, errs = vals.reshape(inner.shape), errs.reshape(inner.shape)
    pts = np.concatenate([lo[idx, None], inner, hi[idx, None]], axis=1)
    fv = np.concatenate([va[idx, None], vals, vb[idx, None]], axis=1)
    fe = np.concatenate([ea[idx, None], errs, eb[idx, None]], axis=1)
    _scan(func, pts[:, :-1].ravel(), pts[:, 1:].ravel(), fv[:, :-1].ravel(), fv[:, 1:].ravel(),
          fe[:, :-1].ravel(), fe[:, 1:].ravel(), B2, level + 1, opts, out_brackets, out_uncertain)


def second_derivative_bound(half_grid, D, E):
    """Upper bound on ``sup |f''|`` from samples on the offset grid over ``[0, pi)``.

    ``half_grid`` holds ``M >= 2 D + 1`` values; the second half period is
    filled in by parity. Rounding in the samples (``E`` each) and in the
    FFT is added to every coefficient before weighting.
    """
    M = len(half_grid)
    full = np.concatenate([half_grid, half_grid if D % 2 == 0 else -half_grid])
    N = 2 * M
    X = np.abs(np.fft.rfft(full)) / N
    G = float(np.max(np.abs(half_grid)))
    if G <= 2 * E:
        raise ZeroFormError("function vanishes identically on the circle (to rounding)")
    k = np.arange(D + 1, dtype=float)
    slack = E + 8 * _EPS * np.log2(N) * G
    return float(2 * np.sum(k * k * (X[: D + 1] + slack)))


def isolate(func: CircleFunction, opts: RootOptions = RootOptions(), grid_values=None):
    """Isolate the zeros of ``func`` on ``[0, pi)``.

    Parameters
    ----------
    func : CircleFunction
    opts : RootOptions
    grid_values : array, optional
        Precomputed values on ``grid_angles(func.degree, opts)[:-1]``
        (the batched Monte Carlo path supplies these).

    Returns
    -------
    brackets : list of tuple
        ``(lo, hi, f(lo), f(hi))`` intervals each holding exactly one zero
        (angles may exceed ``pi`` for the wrap-around interval).
    uncertain : list of tuple
        ``(lo, hi)`` intervals that could not be resolved.
    """
    th = grid_angles(func.degree, opts)
    if grid_values is None:
        v = func.evaluate(th[:-1])
    else:
        v = np.asarray(grid_values, dtype=float)
    D = func.degree
    E = func.noise
    B2 = second_derivative_bound(v, D, E)
    v = np.append(v, v[0] if D % 2 == 0 else -v[0])
    e = np.full(v.shape, E)
    brackets, uncertain = [], []
    _scan(func, th[:-1], th[1:], v[:-1], v[1:], e[:-1], e[1:], B2, 0, opts, brackets, uncertain)
    return brackets, _merge(uncertain)


def _merge(intervals):
    """Sort and merge touching ``(lo, hi)`` intervals."""
    out = []
    for lo, hi in sorted(intervals):
        if out and lo <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], hi))
        else:
            out.append((lo, hi))
    return out


def bisect_brackets(func: CircleFunction, brackets, width=1e-12):
    """Shrink every bracket to ``width`` by vectorized bisection; returns midpoints."""
    if not brackets:
        return np.zeros(0)
    lo = np.array([b[0] for b in brackets])
    hi = np.array([b[1] for b in brackets])
    flo = np.array([b[2] for b in brackets])
    while np.max(hi - lo) > width:
        mid = 0.5 * (lo + hi)
        fm = func.evaluate(mid)
        left = np.sign(fm) == np.sign(flo)
        lo = np.where(left, mid, lo)
        flo = np.where(left, fm, flo)
        hi = np.where(left, hi, mid)
        if np.all(fm == 0):
            break
    return 0.5 * (lo + hi)


def normalize_angles(theta, width=1e-12):
    """Fold angles into ``[0, pi)`` and sort; values within ``width`` of ``pi`` become 0."""
    t = np.mod(theta, np.pi)
    t = np.where(t > np.pi - 2 * width, 0.0, t)
    return np.sort(t)


def count_roots_circle(f, opts: RootOptions = RootOptions()) -> RootCount:
    """Count distinct real projective roots of a binary form.

    Parameters
    ----------
    f : BinaryForm or CircleFunction
        Nonzero input.
    opts : RootOptions

    Returns
    -------
    RootCount
        ``certified`` is False whenever any interval stayed unresolved, in
        which case ``count`` is only the number of roots isolated so far.
    """
    func = f if isinstance(f, CircleFunction) else FormOnCircle(f, opts.noise_factor)
    brackets, uncertain = isolate(func, opts)
    return RootCount(len(brackets), not uncertain, uncertain, "grid")
