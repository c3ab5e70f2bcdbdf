"""Floating-point oracle: roots of a binary form from a companion matrix."""
from __future__ import annotations

import numpy as np

from ..errors import ZeroFormError

__all__ = ["eigen_roots", "eigen_real_count", "REAL_TOL"]

REAL_TOL = 1e-8


def eigen_roots(f) -> np.ndarray:
    """All ``deg f`` projective roots of ``f`` in the chart ``y = 1``.

    Parameters
    ----------
    f : BinaryForm
        Nonzero form of degree ``D``.

    Returns
    -------
    ndarray of complex, length ``D``
        Finite roots ``z = x / y`` followed by one ``inf`` entry per unit
        of degree drop (roots at ``[1:0]``).

    Notes
    -----
    The variable is rescaled ``z = s w`` with ``s`` the geometric mean
    ratio of the extreme nonzero coefficients before the companion matrix
    of the monic polynomial is formed; LAPACK then balances the matrix as
    well. Zero low coefficients are split off as exact roots at 0.
    """
    c = np.asarray(f.to_float().coeffs, dtype=float)
    if not np.any(c):
        raise ZeroFormError("zero form")
    D = len(c) - 1
    nz = np.flatnonzero(c)
    lo, hi = nz[0], nz[-1]
    n_inf = D - hi
    n_zero = lo
    p = c[lo: hi + 1]
    m = len(p) - 1
    finite = np.zeros(0, dtype=complex)
    if m > 0:
        with np.errstate(divide="ignore"):
            logs = np.log(np.abs(p))
        log_s = (logs[0] - logs[-1]) / m
        k = np.arange(m + 1)
        # coefficients of the monic polynomial in w = z / s
        scaled = np.where(p != 0, np.sign(p * p[-1]) * np.exp(logs + k * log_s - logs[-1] - m * log_s), 0.0)
        comp = np.zeros((m, m))
        comp[0, :] = -scaled[-2::-1]
        comp[1:, :-1] = np.eye(m - 1)
        finite = np.linalg.eigvals(comp) * np.exp(log_s)
    roots = np.concatenate([np.zeros(n_zero, dtype=complex), finite.astype(complex),
                            np.full(n_inf, complex(np.inf, 0.0))])
    return roots


def eigen_real_count(f, tol: float = REAL_TOL) -> int:
    """Number of roots with ``|Im z| <= tol (1 + |Re z|)``; ``[1:0]`` counts as real.

    Roots that agree within ``1e-7`` relative are merged so the result
    estimates the number of distinct real roots.
    """
    r = eigen_roots(f)
    inf = np.isinf(r.real)
    fin = r[~inf]
    real = np.sort(fin.real[np.abs(fin.imag) <= tol * (1 + np.abs(fin.real))])
    distinct = 0
    for i, x in enumerate(real):
        if i == 0 or abs(x - real[i - 1]) > 1e-7 * (1 + abs(x)):
            distinct += 1
    return distinct + (1 if inf.any() else 0)
