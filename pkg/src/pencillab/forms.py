"""Binary and ternary homogeneous forms.

Two coefficient modes are supported. Floating forms carry a ``float64``
array and are what the Monte Carlo paths use. Exact forms carry an object
array of :class:`fractions.Fraction` and feed the rational oracles. Mixing
the two is never done implicitly: use :meth:`BinaryForm.to_exact` or
:meth:`BinaryForm.to_float`.

Binary forms store ``coeffs[k]`` as the coefficient of ``x**k * y**(d-k)``.
Ternary forms store a dense triangular table ``table[i, j]`` for the
monomial ``x**i * y**j * z**(d-i-j)``; the flat ``coeffs`` vector lists the
same numbers in graded lexicographic order (see :func:`ternary_monomials`).
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb, lcm, lgamma

import numpy as np
from scipy.signal import convolve2d

from .errors import DegreeMismatchError, ZeroFormError

__all__ = [
    "BinaryForm",
    "TernaryForm",
    "ternary_monomials",
    "wronskian_binary",
    "jacobian_covector_ternary",
    "eval_circle",
    "circle_basis",
    "bombieri_coefficients",
    "resultant_binary",
    "log_abs_resultant",
]


def _as_coeff_array(values, exact):
    if exact:
        return np.array([Fraction(v) for v in values], dtype=object)
    arr = np.asarray(values, dtype=np.float64).copy()
    if not np.all(np.isfinite(arr)):
        raise ValueError("form coefficients must be finite")
    return arr


class BinaryForm:
    """Real binary form of degree ``d`` in the variables ``x, y``.

    Parameters
    ----------
    coeffs : sequence
        ``d + 1`` numbers; ``coeffs[k]`` multiplies ``x**k y**(d-k)``.
    exact : bool, optional
        Store the coefficients as exact rationals. Floats are converted
        through :class:`fractions.Fraction`, i.e. without rounding.

    Notes
    -----
    The zero form can be built (it is useful as a sentinel) and reports
    ``is_zero``; every downstream operation rejects it.
    """

    __slots__ = ("coeffs", "exact")

    def __init__(self, coeffs, exact=False):
        coeffs = list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs
        if len(coeffs) < 1:
            raise ValueError("a form needs at least one coefficient")
        self.exact = bool(exact)
        self.coeffs = _as_coeff_array(coeffs, self.exact)
        self.coeffs.setflags(write=False)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not any(c != 0 for c in self.coeffs)

    def to_exact(self) -> "BinaryForm":
        return self if self.exact else BinaryForm(self.coeffs, exact=True)

    def to_float(self) -> "BinaryForm":
        if not self.exact:
            return self
        return BinaryForm([float(c) for c in self.coeffs])

    def scaled(self, c) -> "BinaryForm":
        return BinaryForm(self.coeffs * (Fraction(c) if self.exact else c), exact=self.exact)

    def normalized(self) -> "BinaryForm":
        """Float copy scaled to unit max-abs coefficient."""
        f = self.to_float()
        m = np.max(np.abs(f.coeffs))
        if m == 0:
            raise ZeroFormError("cannot normalize the zero form")
        return BinaryForm(f.coeffs / m)

    def __call__(self, x, y):
        k = np.arange(self.degree + 1)
        x = np.asarray(x, dtype=float)[..., None]
        y = np.asarray(y, dtype=float)[..., None]
        return np.sum(self.to_float().coeffs * x**k * y ** (self.degree - k), axis=-1)

    def __eq__(self, other):
        if not isinstance(other, BinaryForm):
            return NotImplemented
        return self.degree == other.degree and all(
            a == b for a, b in zip(self.coeffs, other.coeffs)
        )

    def __hash__(self):
        return hash(tuple(self.coeffs))

    def __repr__(self):
        kind = "exact" if self.exact else "float"
        vals = [str(c) if self.exact else float(c) for c in self.coeffs]
        return f"BinaryForm(degree={self.degree}, {kind}, coeffs={vals})"


def _require_pair(alpha, beta):
    if alpha.degree != beta.degree:
        raise DegreeMismatchError(
            f"degrees differ: {alpha.degree} != {beta.degree}"
        )
    if alpha.is_zero or beta.is_zero:
        raise ZeroFormError("pencil members must be nonzero")


def _common_mode(alpha, beta):
    exact = alpha.exact and beta.exact
    if exact:
        return alpha.coeffs, beta.coeffs, True
    return alpha.to_float().coeffs, beta.to_float().coeffs, False


def wronskian_binary(alpha: BinaryForm, beta: BinaryForm) -> BinaryForm:
    """Jacobian covariant ``W = a_x b_y - a_y b_x`` of two binary forms.

    The result always has nominal degree ``2d - 2``. Its top coefficient is
    zero exactly when ``[1:0]`` is a critical point of the pencil. The
    result is exact only when both inputs are exact.
    """
    _require_pair(alpha, beta)
    a, b, exact = _common_mode(alpha, beta)
    d = alpha.degree
    k = np.arange(1, d + 1)
    ax, bx = k * a[1:], k * b[1:]
    ay, by = (d - k + 1) * a[:-1], (d - k + 1) * b[:-1]
    w = np.convolve(ax, by) - np.convolve(ay, bx)
    return BinaryForm(w, exact=exact)


@lru_cache(maxsize=64)
def _half_log_binom(D):
    k = np.arange(D + 1)
    return 0.5 * (lgamma(D + 1) - np.array([lgamma(i + 1) + lgamma(D - i + 1) for i in k]))


def circle_basis(D: int, theta) -> np.ndarray:
    """Bombieri basis ``sqrt(C(D,k)) cos^k sin^(D-k)`` on the circle.

    Rows index ``theta``; every entry is bounded by 1 in absolute value
    because the squares of a row sum to ``(cos^2 + sin^2)^D``. The powers
    are formed in log space so nothing overflows for ``D`` in the
    thousands.
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    k = np.arange(D + 1)
    c, s = np.cos(theta)[:, None], np.sin(theta)[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        lc, ls = np.log(np.abs(c)), np.log(np.abs(s))
        lk = np.where(k == 0, 0.0, k * lc)
        lj = np.where(k == D, 0.0, (D - k) * ls)
    mag = np.exp(_half_log_binom(D) + lk + lj)
    neg = ((c < 0) & (k % 2 == 1)) ^ ((s < 0) & ((D - k) % 2 == 1))
    return np.where(neg, -mag, mag)


def bombieri_coefficients(f: BinaryForm):
    """Return ``(g, log_scale)`` with ``c_k = exp(log_scale) g_k sqrt(C(D,k))``.

    ``g`` has unit max-abs entry. For Kostlan forms the ``g_k`` are the
    iid standard normals the form was built from (up to one scale).
    """
    c = f.to_float().coeffs
    if not np.any(c):
        raise ZeroFormError("zero form")
    D = f.degree
    with np.errstate(divide="ignore"):
        lg = np.log(np.abs(c)) - _half_log_binom(D)
    top = np.max(lg)
    g = np.sign(c) * np.exp(lg - top)
    return g, top


def eval_circle(f: BinaryForm, theta):
    """Evaluate ``f(cos t, sin t)`` after scaling ``f`` to unit max-abs coefficient.

    Works elementwise on arrays of angles.
    """
    c = f.to_float().coeffs
    m = np.max(np.abs(c))
    if m == 0:
        raise ZeroFormError("zero form")
    g, log_scale = bombieri_coefficients(f)
    vals = circle_basis(f.degree, theta) @ g
    vals = vals * np.exp(log_scale - np.log(m))
    return vals[0] if np.ndim(theta) == 0 else vals


def _bareiss_det(rows):
    """Fraction-free determinant of a square list-of-lists of rationals."""
    m = [list(r) for r in rows]
    n = len(m)
    if n == 0:
        return Fraction(1)
    # clear denominators row by row so the elimination runs over integers
    scale = Fraction(1)
    for r in m:
        den = lcm(*(Fraction(v).denominator for v in r))
        scale /= den
        r[:] = [int(Fraction(v) * den) for v in r]
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1] * scale


def _sylvester(a, b, d):
    # descending powers of x, i.e. coefficient order a_d, ..., a_0
    a, b = list(a[::-1]), list(b[::-1])
    size = 2 * d
    rows = []
    zero = a[0] * 0
    for src in (a, b):
        for i in range(d):
            rows.append([zero] * i + src + [zero] * (size - d - 1 - i))
    return rows


def resultant_binary(alpha: BinaryForm, beta: BinaryForm):
    """Sylvester resultant of two binary forms of equal degree.

    Exact inputs give an exact :class:`~fractions.Fraction`. Float inputs
    are first scaled to unit max-abs coefficient and the determinant is
    returned as a float; for Kostlan pairs it decays roughly like
    ``10**(-0.08 d**2)``, so use :func:`log_abs_resultant` for large ``d``.
    """
    if alpha.degree != beta.degree:
        raise DegreeMismatchError(f"degrees differ: {alpha.degree} != {beta.degree}")
    d = alpha.degree
    if alpha.exact and beta.exact:
        return _bareiss_det(_sylvester(alpha.coeffs, beta.coeffs, d))
    a, b = alpha.normalized().coeffs, beta.normalized().coeffs
    return float(np.linalg.det(np.array(_sylvester(a, b, d), dtype=float)))


def log_abs_resultant(alpha: BinaryForm, beta: BinaryForm) -> float:
    """Natural log of ``|resultant_binary|`` for max-normalized float inputs."""
    if alpha.degree != beta.degree:
        raise DegreeMismatchError(f"degrees differ: {alpha.degree} != {beta.degree}")
    a, b = alpha.normalized().coeffs, beta.normalized().coeffs
    sign, logdet = np.linalg.slogdet(np.array(_sylvester(a, b, alpha.degree), dtype=float))
    return float(logdet) if sign != 0 else -np.inf


# --------------------------------------------------------------------------
# ternary forms


@lru_cache(maxsize=32)
def ternary_monomials(d: int):
    """Exponent triples ``(i, j, k)`` with ``i + j + k = d`` in canonical order.

    The order is lexicographic descending, which for a fixed total degree
    is the graded lexicographic order: ``x^d, x^(d-1) y, x^(d-1) z, ...``.
    """
    return tuple((i, j, d - i - j) for i in range(d, -1, -1) for j in range(d - i, -1, -1))


def _conv2(a, b):
    if a.dtype != object and b.dtype != object:
        return convolve2d(a, b)
    out = np.zeros((a.shape[0] + b.shape[0] - 1, a.shape[1] + b.shape[1] - 1), dtype=object)
    out[...] = Fraction(0)
    for i in range(a.shape[0]):
        for k in range(b.shape[0]):
            out[i + k] = out[i + k] + np.convolve(a[i], b[k])
    return out


class TernaryForm:
    """Real ternary form of degree ``d`` in ``x, y, z``.

    Parameters
    ----------
    coeffs : sequence or dict
        Either ``C(d+2, 2)`` numbers in the order of
        :func:`ternary_monomials`, or a mapping ``{(i, j, k): value}``
        (missing monomials are zero).
    degree : int, optional
        Required when ``coeffs`` is a mapping that may be empty.
    exact : bool
        Store exact rationals.
    """

    __slots__ = ("table", "degree", "exact")

    def __init__(self, coeffs, degree=None, exact=False):
        self.exact = bool(exact)
        if isinstance(coeffs, dict):
            if degree is None:
                degree = sum(next(iter(coeffs)))
            flat = [coeffs.get(m, 0) for m in ternary_monomials(degree)]
        else:
            flat = list(coeffs)
            if degree is None:
                degree = int(round((np.sqrt(8 * len(flat) + 1) - 3) / 2))
            if len(flat) != comb(degree + 2, 2):
                raise ValueError(
                    f"degree {degree} needs {comb(degree + 2, 2)} coefficients, got {len(flat)}"
                )
        self.degree = int(degree)
        vals = _as_coeff_array(flat, self.exact)
        table = np.zeros((self.degree + 1, self.degree + 1), dtype=vals.dtype)
        if self.exact:
            table[...] = Fraction(0)
        for v, (i, j, _) in zip(vals, ternary_monomials(self.degree)):
            table[i, j] = v
        table.setflags(write=False)
        self.table = table

    @classmethod
    def _from_table(cls, table, degree, exact):
        obj = cls.__new__(cls)
        obj.exact = exact
        obj.degree = degree
        t = np.array(table[: degree + 1, : degree + 1], dtype=object if exact else float)
        t.setflags(write=False)
        obj.table = t
        return obj

    @property
    def coeffs(self) -> np.ndarray:
        return np.array([self.table[i, j] for i, j, _ in ternary_monomials(self.degree)],
                        dtype=self.table.dtype)

    @property
    def is_zero(self) -> bool:
        return not any(c != 0 for c in self.table.ravel())

    def to_float(self) -> "TernaryForm":
        if not self.exact:
            return self
        return TernaryForm._from_table(self.table.astype(float), self.degree, False)

    def to_exact(self) -> "TernaryForm":
        if self.exact:
            return self
        t = np.vectorize(Fraction, otypes=[object])(self.table)
        return TernaryForm._from_table(t, self.degree, True)

    def scaled(self, c) -> "TernaryForm":
        c = Fraction(c) if self.exact else float(c)
        return TernaryForm._from_table(self.table * c, self.degree, self.exact)

    def derivative(self, axis: int) -> "TernaryForm":
        """Partial derivative along ``x`` (0), ``y`` (1) or ``z`` (2)."""
        d = self.degree
        if d == 0:
            return TernaryForm._from_table(self.table * 0, 0, self.exact)
        t = self.table
        out = np.zeros((d, d), dtype=t.dtype)
        if self.exact:
            out[...] = Fraction(0)
        for i in range(d + 1):
            for j in range(d + 1 - i):
                k = d - i - j
                c = t[i, j]
                if axis == 0 and i > 0:
                    out[i - 1, j] += i * c
                elif axis == 1 and j > 0:
                    out[i, j - 1] += j * c
                elif axis == 2 and k > 0:
                    out[i, j] += k * c
        return TernaryForm._from_table(out, d - 1, self.exact)

    def __mul__(self, other):
        if isinstance(other, TernaryForm):
            exact = self.exact and other.exact
            a = self.table if exact else self.to_float().table
            b = other.table if exact else other.to_float().table
            return TernaryForm._from_table(_conv2(a, b), self.degree + other.degree, exact)
        return self.scaled(other)

    __rmul__ = __mul__

    def _binop(self, other, sign):
        if self.degree != other.degree:
            raise DegreeMismatchError("ternary forms of different degree")
        exact = self.exact and other.exact
        a = self.table if exact else self.to_float().table
        b = other.table if exact else other.to_float().table
        return TernaryForm._from_table(a + sign * b, self.degree, exact)

    def __add__(self, other):
        return self._binop(other, 1)

    def __sub__(self, other):
        return self._binop(other, -1)

    def __neg__(self):
        return self.scaled(-1)

    def __eq__(self, other):
        if not isinstance(other, TernaryForm):
            return NotImplemented
        return self.degree == other.degree and bool(np.all(self.table == other.table))

    def __call__(self, pts):
        """Evaluate at points given as an array of shape ``(..., 3)``."""
        pts = np.asarray(pts, dtype=float)
        x, y, z = pts[..., 0], pts[..., 1], pts[..., 2]
        d = self.degree
        t = self.to_float().table
        e = np.arange(d + 1)
        xp, yp, zp = (c[..., None] ** e for c in (x, y, z))
        # z exponent d - i - j, clipped where the table entry is zero anyway
        K = np.maximum(d - e[:, None] - e[None, :], 0)
        return np.einsum("...i,...j,...ij,ij->...", xp, yp, zp[..., K], t)

    def chart(self, k: int) -> np.ndarray:
        """Dehomogenize at ``x_k = 1``.

        Returns a float array ``P`` with ``P[a, b]`` the coefficient of
        ``u**a v**b``, where ``(u, v)`` are the two remaining coordinates
        in increasing index order.
        """
        d = self.degree
        t = self.to_float().table
        P = np.zeros((d + 1, d + 1))
        for i in range(d + 1):
            for j in range(d + 1 - i):
                e = (i, j, d - i - j)
                u, v = [e[m] for m in range(3) if m != k]
                P[u, v] = t[i, j]
        return P

    def compose_linear(self, R) -> "TernaryForm":
        """Return the float form ``x -> f(R x)`` for a 3x3 matrix ``R``."""
        R = np.asarray(R, dtype=float)
        d = self.degree
        lin = [TernaryForm({(1, 0, 0): R[m, 0], (0, 1, 0): R[m, 1], (0, 0, 1): R[m, 2]}, degree=1)
               for m in range(3)]
        one = TernaryForm([1.0], degree=0)
        powers = []
        for m in range(3):
            p = [one]
            for _ in range(d):
                p.append(p[-1] * lin[m])
            powers.append(p)
        out = np.zeros((d + 1, d + 1))
        t = self.to_float().table
        for i in range(d + 1):
            for j in range(d + 1 - i):
                if t[i, j] != 0:
                    term = powers[0][i] * powers[1][j] * powers[2][d - i - j]
                    out = out + t[i, j] * term.table
        return TernaryForm._from_table(out, d, False)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.to_float().table)))

    def __repr__(self):
        kind = "exact" if self.exact else "float"
        return f"TernaryForm(degree={self.degree}, {kind})"


def jacobian_covector_ternary(alpha: TernaryForm, beta: TernaryForm):
    """Components ``M_i = alpha * d_i beta - beta * d_i alpha`` for ``i = 0, 1, 2``.

    Each component has degree ``2d - 1`` and ``x M_0 + y M_1 + z M_2`` is
    identically zero (Euler). Exact when both inputs are exact.
    """
    if alpha.degree != beta.degree:
        raise DegreeMismatchError(f"degrees differ: {alpha.degree} != {beta.degree}")
    if alpha.is_zero or beta.is_zero:
        raise ZeroFormError("pencil members must be nonzero")
    return tuple(alpha * beta.derivative(i) - beta * alpha.derivative(i) for i in range(3))
