"""Certified count of real critical points of a pencil of ternary forms.

The critical equation is ``M = alpha grad(beta) - beta grad(alpha) = 0``.
Because ``x M_0 + y M_1 + z M_2 = 0`` identically, in the chart
``x_k = 1`` the two components ``M_i, M_j`` (``i, j != k``) already cut
out the critical set. Every point of ``RP^2`` lies in the square
``[-1, 1]^2`` of the chart of its largest coordinate, so the three
squares (slightly enlarged) cover the plane; duplicates from the
overlaps are merged in projective coordinates.

Each chart square is explored breadth first. A box is

* discarded when the Bernstein coefficients of ``M_i`` or ``M_j`` on it
  share a strict sign (no zero inside);
* resolved when the Krawczyk operator maps it into its own interior
  (exactly one zero, which is then located by Newton's method and
  certified again on a tiny box), or maps it outside itself (no zero);
* split in four otherwise, using exact de Casteljau halving of the
  Bernstein coefficients of the system and of its Jacobian.

Boxes narrower than ``min_width`` that are still undecided are returned as
uncertain. Zeros with ``alpha = beta = 0`` (the base locus) are certified
as such with a second Krawczyk test on ``(alpha, beta)`` and excluded.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np
from numpy.polynomial import polynomial as npoly

from ..errors import DegeneratePencilError, DegreeMismatchError, ZeroFormError
from ..forms import jacobian_covector_ternary
from .circle import RootCount

__all__ = ["Rp2Options", "Rp2Solution", "count_crit_rp2", "solve_crit_rp2",
           "check_pencil_rp2"]

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class Rp2Options:
    """Tolerances for the subdivision solver.

    Attributes
    ----------
    chart_low, chart_high : float
        Bounds of the square explored in each affine chart. They are
        deliberately asymmetric so that points with simple rational
        coordinates (such as the chart origin) do not sit on the edges of
        the dyadic boxes.
    initial_split : int
        The chart square is first cut into ``initial_split**2`` boxes.
    min_width : float
        Boxes narrower than this that are still undecided become uncertain.
    max_boxes : int
        Safety cap on the number of live boxes per chart.
    tiny_radius : float
        Relative radius of the box used to certify a refined zero.
    dedup_tol : float
        Distance on the unit sphere under which two zeros are the same point.
    guard_lines : int
        Random lines probed for a non-isolated critical locus.
    guard_tol : float
        Relative size of ``M`` on a line that counts as vanishing.
    """

    chart_low: float = -1.0618034
    chart_high: float = 1.0381966
    initial_split: int = 4
    min_width: float = 1e-9
    max_boxes: int = 400_000
    tiny_radius: float = 1e-10
    dedup_tol: float = 1e-8
    guard_lines: int = 3
    guard_tol: float = 1e-9


@dataclass
class Rp2Solution:
    """Output of :func:`solve_crit_rp2`: unit vectors (rows) for each kind of zero."""

    critical: np.ndarray
    base: np.ndarray
    uncertain: list

    @property
    def certified(self):
        return not self.uncertain


# --------------------------------------------------------------------------
# Bernstein machinery


@lru_cache(maxsize=16)
def _tools(D):
    n = D + 1
    L = np.zeros((n, n))
    SL = np.zeros((n, n))
    SR = np.zeros((n, n))
    for i in range(n):
        for k in range(i + 1):
            L[i, k] = comb(i, k) / comb(D, k)
            SL[i, k] = comb(i, k) / 2.0**i
        for k in range(i, n):
            SR[i, k] = comb(D - i, k - i) / 2.0 ** (D - i)
    half = np.array([comb(D, i) for i in range(n)], dtype=float) / 2.0**D
    Cm = np.array([[comb(k, kp) for k in range(n)] for kp in range(n)], dtype=float)
    for M in (L, SL, SR, half, Cm):
        M.setflags(write=False)
    return L, SL, SR, half, Cm


def _shift_matrices(D, a0, w):
    """``G = L T`` with ``T[k', k]`` the ``s^k'`` coefficient of ``(a0 + w s)^k`` (batched)."""
    L, _, _, _, Cm = _tools(D)
    k = np.arange(D + 1)
    e = k[None, :] - k[:, None]  # k - k'
    mask = e >= 0
    a0 = np.asarray(a0, dtype=float)[:, None, None]
    w = np.asarray(w, dtype=float)[:, None, None]
    with np.errstate(invalid="ignore"):
        T = np.where(mask, Cm * np.where(mask, a0 ** np.maximum(e, 0), 0.0) * w ** k[:, None], 0.0)
    return L @ T, np.abs(L) @ np.abs(T)


def _to_bernstein(A, u0, u1, v0, v1):
    """Bernstein coefficients on boxes of power-form arrays.

    Parameters
    ----------
    A : array (q, D+1, D+1)
        ``A[p, a, b]`` multiplies ``u^a v^b``.
    u0, u1, v0, v1 : arrays (m,)

    Returns
    -------
    B : array (m, q, D+1, D+1)
    err : array (m, q)
        Rounding bound on every coefficient.
    """
    D = A.shape[-1] - 1
    Gu, aGu = _shift_matrices(D, u0, np.asarray(u1) - u0)
    Gv, aGv = _shift_matrices(D, v0, np.asarray(v1) - v0)
    GvT = np.swapaxes(Gv, 1, 2)[:, None]
    B = Gu[:, None] @ A[None] @ GvT
    absB = aGu[:, None] @ np.abs(A)[None] @ np.swapaxes(aGv, 1, 2)[:, None]
    err = 8 * (2 * D + 4) * _EPS * absB.max(axis=(-1, -2))
    return B, err


def _split4(B, err):
    """Four de Casteljau children (order: u-low v-low, u-low v-high, u-high v-low, u-high v-high)."""
    D = B.shape[-1] - 1
    _, SL, SR, _, _ = _tools(D)
    growth = 4 * (D + 1) * _EPS * np.abs(B).max(axis=(-1, -2))
    kids = []
    for Su in (SL, SR):
        Bu = Su @ B
        for Sv in (SL, SR):
            kids.append(Bu @ Sv.T)
    return kids, err + growth


def _ranges(B, err):
    return B.min(axis=(-1, -2)) - err, B.max(axis=(-1, -2)) + err


def _center_values(B, err):
    half = _tools(B.shape[-1] - 1)[3]
    val = np.einsum("i,...ij,j->...", half, B, half)
    return val, err + 4 * (B.shape[-1]) * _EPS * np.abs(B).max(axis=(-1, -2))


def _krawczyk(B, err, m, r):
    """Krawczyk test on boxes ``m +- r`` for a 2x2 system.

    ``B`` holds Bernstein data for ``(F1, F2, F1u, F1v, F2u, F2v)``.
    Returns two boolean arrays ``(unique, empty)``.
    """
    Fm, Fe = _center_values(B[:, :2], err[:, :2])
    lo, hi = _ranges(B[:, 2:], err[:, 2:])
    Jlo, Jhi = lo.reshape(-1, 2, 2), hi.reshape(-1, 2, 2)
    Jc, Jr = 0.5 * (Jlo + Jhi), 0.5 * (Jhi - Jlo)
    det = Jc[:, 0, 0] * Jc[:, 1, 1] - Jc[:, 0, 1] * Jc[:, 1, 0]
    good = np.abs(det) > 1e-300
    safe = np.where(good, det, 1.0)
    Y = np.stack([np.stack([Jc[:, 1, 1], -Jc[:, 0, 1]], -1),
                  np.stack([-Jc[:, 1, 0], Jc[:, 0, 0]], -1)], -2) / safe[:, None, None]
    z = np.einsum("bij,bj->bi", Y, Fm)
    aY = np.abs(Y)
    zerr = np.einsum("bij,bj->bi", aY, Fe)
    C = np.eye(2)[None] - Y @ Jc
    R = np.abs(C) + aY @ Jr
    rad = np.einsum("bij,bj->bi", R, r)
    slack = 16 * _EPS * (np.abs(z) + rad + np.abs(m))
    rad = rad + zerr + slack
    unique = good & np.all(np.abs(z) + rad < r, axis=1)
    empty = good & np.any(np.abs(z) - rad > r, axis=1)
    return unique, empty


# --------------------------------------------------------------------------
# guards


def _rank2(alpha, beta, tol):
    a, b = alpha.to_float().coeffs, beta.to_float().coeffs
    S = np.stack([a / np.linalg.norm(a), b / np.linalg.norm(b)])
    s = np.linalg.svd(S, compute_uv=False)
    return s[-1] > tol * s[0]


def _line_ratio(alpha, beta, grads, M, p, q, theta):
    pts = np.cos(theta)[:, None] * p + np.sin(theta)[:, None] * q
    a, b = alpha(pts), beta(pts)
    ga = np.stack([g(pts) for g in grads[0]], -1)
    gb = np.stack([g(pts) for g in grads[1]], -1)
    Mv = np.stack([m(pts) for m in M], -1)
    scale = np.abs(a) * np.linalg.norm(gb, axis=-1) + np.abs(b) * np.linalg.norm(ga, axis=-1)
    return np.linalg.norm(Mv, axis=-1) / np.maximum(scale, 1e-300)


def check_pencil_rp2(alpha, beta, opts: Rp2Options = Rp2Options()):
    """Raise :class:`DegeneratePencilError` for proportional forms or a critical curve.

    The second test restricts the pencil to a few fixed pseudo-random real
    lines and looks for a point where ``M`` vanishes relative to its
    natural scale; a positive-dimensional real critical locus meets every
    line, isolated critical points almost never.
    """
    from scipy.optimize import minimize_scalar

    if alpha.degree != beta.degree:
        raise DegreeMismatchError(f"degrees differ: {alpha.degree} != {beta.degree}")
    if alpha.is_zero or beta.is_zero:
        raise ZeroFormError("pencil members must be nonzero")
    if not _rank2(alpha, beta, 1e-10):
        raise DegeneratePencilError("alpha and beta are proportional")
    a, b = alpha.to_float(), beta.to_float()
    a, b = a.scaled(1 / a.max_abs()), b.scaled(1 / b.max_abs())
    M = jacobian_covector_ternary(a, b)
    grads = ([a.derivative(i) for i in range(3)], [b.derivative(i) for i in range(3)])
    gen = np.random.default_rng(0x5EED)
    n = 64 * (2 * a.degree + 1)
    theta = (np.arange(n) + 0.5) * np.pi / n
    for _ in range(opts.guard_lines):
        p, q = np.linalg.qr(gen.standard_normal((3, 2)))[0].T
        ratio = _line_ratio(a, b, grads, M, p, q, theta)
        for i in np.argsort(ratio)[:3]:
            res = minimize_scalar(lambda t: float(_line_ratio(a, b, grads, M, p, q, np.array([t]))[0]),
                                  bounds=(theta[i] - np.pi / n, theta[i] + np.pi / n),
                                  method="bounded", options={"xatol": 1e-13})
            if min(res.fun, ratio[i]) < opts.guard_tol:
                raise DegeneratePencilError("critical locus is not isolated (meets a generic line)")


# --------------------------------------------------------------------------
# solver


def _chart_arrays(forms, k, D):
    out = np.zeros((len(forms), D + 1, D + 1))
    for idx, f in enumerate(forms):
        P = f.chart(k)
        out[idx, : P.shape[0], : P.shape[1]] = P
    return out


def _deriv_arrays(P, D):
    """``(P, dP/du, dP/dv)`` as arrays padded to ``(D+1, D+1)``."""
    du = np.zeros_like(P)
    dv = np.zeros_like(P)
    du[:-1, :] = npoly.polyder(P, axis=0)
    dv[:, :-1] = npoly.polyder(P, axis=1)
    return du, dv


class _ChartSystem:
    def __init__(self, M, alpha, beta, k):
        idx = [i for i in range(3) if i != k]
        D = M[0].degree
        F = _chart_arrays([M[idx[0]], M[idx[1]]], k, D)
        f1u, f1v = _deriv_arrays(F[0], D)
        f2u, f2v = _deriv_arrays(F[1], D)
        self.k = k
        self.D = D
        self.A = np.stack([F[0], F[1], f1u, f1v, f2u, f2v])
        ab = _chart_arrays([alpha, beta], k, D)
        au, av = _deriv_arrays(ab[0], D)
        bu, bv = _deriv_arrays(ab[1], D)
        self.AB = np.stack([ab[0], ab[1], au, av, bu, bv])

    def newton(self, x, iters=40):
        A = self.A
        for _ in range(iters):
            u, v = x
            F = np.array([npoly.polyval2d(u, v, A[0]), npoly.polyval2d(u, v, A[1])])
            J = np.array([[npoly.polyval2d(u, v, A[2]), npoly.polyval2d(u, v, A[3])],
                          [npoly.polyval2d(u, v, A[4]), npoly.polyval2d(u, v, A[5])]])
            try:
                step = np.linalg.solve(J, F)
            except np.linalg.LinAlgError:
                break
            x = x - step
            if np.max(np.abs(step)) < 1e-16 * (1 + np.max(np.abs(x))):
                break
        return x


def _point_box(c, rho):
    return (np.array([c[0] - rho]), np.array([c[0] + rho]),
            np.array([c[1] - rho]), np.array([c[1] + rho]))


def _classify_zero(sys, box, opts):
    """Locate the unique zero in ``box`` and decide whether it is a base point.

    Returns ``(kind, point)`` with kind in ``{"critical", "base", "uncertain"}``.
    """
    u0, u1, v0, v1 = box
    x = sys.newton(np.array([0.5 * (u0 + u1), 0.5 * (v0 + v1)]))
    if not (u0 <= x[0] <= u1 and v0 <= x[1] <= v1):
        x = np.array([0.5 * (u0 + u1), 0.5 * (v0 + v1)])
        rho = 0.5 * max(u1 - u0, v1 - v0)
    else:
        rho = opts.tiny_radius * (1 + np.max(np.abs(x)))
    bx = _point_box(x, rho)
    B, err = _to_bernstein(sys.A, *bx)
    unique, _ = _krawczyk(B, err, x[None], np.array([[rho, rho]]))
    if not unique[0]:
        return "uncertain", x
    Bab, eab = _to_bernstein(sys.AB, *bx)
    lo, hi = _ranges(Bab[:, :2], eab[:, :2])
    if np.any((lo[0] > 0) | (hi[0] < 0)):
        return "critical", x
    base, _ = _krawczyk(Bab, eab, x[None], np.array([[rho, rho]]))
    if base[0]:
        return "base", x
    return "uncertain", x


def _solve_chart(sys, opts):
    D = sys.D
    n0 = opts.initial_split
    edges = np.linspace(opts.chart_low, opts.chart_high, n0 + 1)
    U0, V0 = np.meshgrid(edges[:-1], edges[:-1], indexing="ij")
    u0, v0 = U0.ravel(), V0.ravel()
    w0 = edges[1] - edges[0]
    u1, v1 = u0 + w0, v0 + w0
    B, err = _to_bernstein(sys.A, u0, u1, v0, v1)
    found, uncertain = [], []
    while len(u0):
        if len(u0) > opts.max_boxes:
            uncertain.append((sys.k, "box-cap", len(u0)))
            break
        lo, hi = _ranges(B[:, :2], err[:, :2])
        alive = ~np.any((lo > 0) | (hi < 0), axis=1)
        u0, u1, v0, v1, B, err = u0[alive], u1[alive], v0[alive], v1[alive], B[alive], err[alive]
        if not len(u0):
            break
        m = np.stack([0.5 * (u0 + u1), 0.5 * (v0 + v1)], 1)
        r = np.stack([0.5 * (u1 - u0), 0.5 * (v1 - v0)], 1)
        unique, empty = _krawczyk(B, err, m, r)
        for i in np.flatnonzero(unique):
            found.append((u0[i], u1[i], v0[i], v1[i]))
        keep = ~(unique | empty)
        small = keep & (u1 - u0 < opts.min_width)
        for i in np.flatnonzero(small):
            uncertain.append((sys.k, float(u0[i]), float(u1[i]), float(v0[i]), float(v1[i])))
        keep &= ~small
        u0, u1, v0, v1, B, err = u0[keep], u1[keep], v0[keep], v1[keep], B[keep], err[keep]
        if not len(u0):
            break
        kids, kerr = _split4(B, err)
        um, vm = 0.5 * (u0 + u1), 0.5 * (v0 + v1)
        cu0 = np.concatenate([u0, u0, um, um])
        cu1 = np.concatenate([um, um, u1, u1])
        cv0 = np.concatenate([v0, vm, v0, vm])
        cv1 = np.concatenate([vm, v1, vm, v1])
        u0, u1, v0, v1 = cu0, cu1, cv0, cv1
        B = np.concatenate(kids)
        err = np.concatenate([kerr] * 4)
    return found, uncertain


def _homog(k, x):
    p = np.insert(np.asarray(x, dtype=float), k, 1.0)
    p = p / np.linalg.norm(p)
    j = np.argmax(np.abs(p))
    return p if p[j] > 0 else -p


def _dedup(points, tol):
    out = []
    for p in points:
        if not any(np.linalg.norm(p - q) < tol for q in out):
            out.append(p)
    return np.array(out).reshape(-1, 3)


def solve_crit_rp2(alpha, beta, opts: Rp2Options = Rp2Options(), guard=True) -> Rp2Solution:
    """All real zeros of the critical system on ``RP^2``, split into critical and base points."""
    if guard:
        check_pencil_rp2(alpha, beta, opts)
    a, b = alpha.to_float(), beta.to_float()
    a, b = a.scaled(1 / a.max_abs()), b.scaled(1 / b.max_abs())
    M = jacobian_covector_ternary(a, b)
    crit, base, uncertain = [], [], []
    for k in range(3):
        sys = _ChartSystem(M, a, b, k)
        boxes, unc = _solve_chart(sys, opts)
        uncertain.extend(unc)
        for box in boxes:
            kind, x = _classify_zero(sys, box, opts)
            p = _homog(k, x)
            if kind == "critical":
                crit.append(p)
            elif kind == "base":
                base.append(p)
            else:
                uncertain.append((k,) + tuple(float(t) for t in box))
    return Rp2Solution(_dedup(crit, opts.dedup_tol), _dedup(base, opts.dedup_tol), uncertain)


def count_crit_rp2(alpha, beta, opts: Rp2Options = Rp2Options()) -> RootCount:
    """Certified number of real critical points of the pencil ``[alpha : beta]`` on ``RP^2``.

    Raises
    ------
    DegeneratePencilError
        Proportional forms, or a critical locus that is not a finite set.
    """
    sol = solve_crit_rp2(alpha, beta, opts)
    return RootCount(len(sol.critical), sol.certified, list(sol.uncertain), "subdivision-krawczyk")
