"""Real critical points of pencils of binary forms."""
from __future__ import annotations

import numpy as np
from scipy.optimize import minimize_scalar

from ..errors import BaseLocusError, DegeneratePencilError, DegreeMismatchError, ZeroFormError
from ..forms import bombieri_coefficients, circle_basis, resultant_binary
from .circle import (AngleList, RootCount, RootOptions, WronskianOnCircle, bisect_brackets,
                     isolate, normalize_angles)

__all__ = ["critical_angles", "pencil_critical_count", "RESULTANT_THRESHOLD",
           "RESULTANT_MAX_DEGREE", "BASE_POINT_TOL", "check_base_locus",
           "check_uncertain_base_points"]

RESULTANT_THRESHOLD = 1e-300
# The normalized Sylvester determinant of a Kostlan pair shrinks roughly like
# 10**(-0.08 d**2), so the fixed threshold is only meaningful for small d.
RESULTANT_MAX_DEGREE = 32
BASE_POINT_TOL = 1e-8


def check_base_locus(alpha, beta):
    """Reject a pencil whose normalized resultant is below ``RESULTANT_THRESHOLD``.

    Applied for ``d <= RESULTANT_MAX_DEGREE``; larger degrees rely on the
    real base-point test done at each critical angle.
    """
    if alpha.degree != beta.degree:
        raise DegreeMismatchError(f"degrees differ: {alpha.degree} != {beta.degree}")
    if alpha.is_zero or beta.is_zero:
        raise ZeroFormError("pencil members must be nonzero")
    if alpha.degree <= RESULTANT_MAX_DEGREE:
        r = resultant_binary(alpha, beta)
        if abs(r) < RESULTANT_THRESHOLD:
            raise BaseLocusError(f"resultant {float(r):.3e} below threshold")


def _real_base_points(alpha, beta, angles):
    """Angles among ``angles`` at which both forms vanish to ``BASE_POINT_TOL``."""
    if len(angles) == 0:
        return np.zeros(0)
    out = []
    for f in (alpha, beta):
        g, _ = bombieri_coefficients(f)
        P = circle_basis(f.degree, angles)
        scale = np.abs(P) @ np.abs(g)
        out.append(np.abs(P @ g) <= BASE_POINT_TOL * scale)
    return np.asarray(angles)[out[0] & out[1]]


def check_uncertain_base_points(alpha, beta, uncertain):
    """Raise :class:`BaseLocusError` if both forms nearly vanish inside an unresolved interval.

    A common root ``l`` of the pencil makes ``l**2`` divide the Wronskian,
    so it shows up as a double zero that the sign-change scan cannot
    bracket. The relative size ``max(|alpha|, |beta|)`` (each divided by
    the sum of the absolute terms of its expansion) is minimized over the
    interval and compared with ``BASE_POINT_TOL``.
    """
    if not uncertain:
        return
    parts = []
    for f in (alpha, beta):
        g, _ = bombieri_coefficients(f)
        parts.append((f.degree, g))

    def rel(t):
        t = np.atleast_1d(t)
        out = np.zeros(t.shape)
        for D, g in parts:
            P = circle_basis(D, t)
            out = np.maximum(out, np.abs(P @ g) / (np.abs(P) @ np.abs(g)))
        return out

    for lo, hi in uncertain:
        D = max(p[0] for p in parts)
        t = np.linspace(lo, hi, max(33, int(np.ceil(16 * D * (hi - lo) / np.pi))))
        k = int(np.argmin(rel(t)))
        a, b = t[max(k - 1, 0)], t[min(k + 1, len(t) - 1)]
        res = minimize_scalar(lambda x: float(rel(x)[0]), bounds=(a, b), method="bounded",
                              options={"xatol": 1e-14})
        if min(res.fun, float(rel(t[k])[0])) <= BASE_POINT_TOL:
            raise BaseLocusError(f"common real root of the pencil near angle {res.x:.12g}")


def _from_brackets(alpha, beta, func, brackets, uncertain, opts):
    check_uncertain_base_points(alpha, beta, uncertain)
    theta = normalize_angles(bisect_brackets(func, brackets, opts.bisect_width), opts.bisect_width)
    bad = _real_base_points(alpha, beta, theta)
    if bad.size:
        raise BaseLocusError(f"common real root of the pencil at angle {bad[0]:.12g}")
    return AngleList(theta, certified=not uncertain)


def critical_angles(alpha, beta, opts: RootOptions = RootOptions(), grid_values=None,
                    func=None) -> AngleList:
    """Angles in ``[0, pi)`` of the real critical points of the pencil ``[alpha : beta]``.

    Parameters
    ----------
    alpha, beta : BinaryForm
        Equal degree, nonzero.
    opts : RootOptions
    grid_values, func : optional
        Precomputed circle evaluator and grid values (used by the batched
        Monte Carlo driver).

    Raises
    ------
    BaseLocusError
        Resultant below threshold, or a real common root.
    DegeneratePencilError
        Proportional forms (the Wronskian vanishes identically).
    """
    check_base_locus(alpha, beta)
    func = func if func is not None else WronskianOnCircle(alpha, beta, opts.noise_factor)
    try:
        brackets, uncertain = isolate(func, opts, grid_values)
    except ZeroFormError as exc:
        raise DegeneratePencilError("proportional forms: the Wronskian vanishes") from exc
    return _from_brackets(alpha, beta, func, brackets, uncertain, opts)


def pencil_critical_count(alpha, beta, opts: RootOptions = RootOptions()) -> RootCount:
    """Certified number of real critical points of a binary pencil."""
    func = WronskianOnCircle(alpha, beta, opts.noise_factor)
    check_base_locus(alpha, beta)
    try:
        brackets, uncertain = isolate(func, opts)
    except ZeroFormError as exc:
        raise DegeneratePencilError("proportional forms: the Wronskian vanishes") from exc
    _from_brackets(alpha, beta, func, brackets, uncertain, opts)
    return RootCount(len(brackets), not uncertain, uncertain, "grid-wronskian")
