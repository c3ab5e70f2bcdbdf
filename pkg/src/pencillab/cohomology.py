"""Exact Chern-class bookkeeping on complex projective space.

Everything lives in the truncated ring ``Z[h]/(h^(n+1))`` where ``h`` is
the hyperplane class, so integrating a top-degree class means reading the
coefficient of ``h^n``. For a pencil of degree ``d`` hypersurfaces on
``CP^n`` the fiber ``F`` is a smooth hypersurface and the base locus ``Y``
is a smooth complete intersection of two of them. Adjunction gives

    c(F) = (1 + h)^(n+1) / (1 + d h)
    c(Y) = (1 + h)^(n+1) / (1 + d h)^2

restricted to the subvariety, and integration over ``F`` (resp. ``Y``)
multiplies by ``d h`` (resp. ``d^2 h^2``) before reading off ``h^n``.
Additivity of the Euler characteristic over the blown-up Lefschetz
fibration then yields the number of complex critical points.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

__all__ = [
    "ChernPoly",
    "total_chern_cpn",
    "euler_fiber",
    "euler_base",
    "exact_crit_count",
    "crit_count_polynomial",
    "leading_density_complex",
    "chern_table",
]


@dataclass(frozen=True)
class ChernPoly:
    """Element of ``Z[h]/(h^(n+1))`` given by integer coefficients of ``h^0..h^n``."""

    n: int
    coeffs: tuple

    def __post_init__(self):
        c = tuple(int(v) for v in self.coeffs)[: self.n + 1]
        c = c + (0,) * (self.n + 1 - len(c))
        object.__setattr__(self, "coeffs", c)

    def __getitem__(self, j):
        return self.coeffs[j] if 0 <= j <= self.n else 0

    def __add__(self, other):
        self._check(other)
        return ChernPoly(self.n, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __mul__(self, other):
        if isinstance(other, int):
            return ChernPoly(self.n, [other * a for a in self.coeffs])
        self._check(other)
        out = [0] * (self.n + 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j in range(self.n + 1 - i):
                    out[i + j] += a * other.coeffs[j]
        return ChernPoly(self.n, out)

    __rmul__ = __mul__

    def _check(self, other):
        if not isinstance(other, ChernPoly) or other.n != self.n:
            raise ValueError("Chern polynomials live in different rings")

    def integrate(self) -> int:
        """Degree of the top class, i.e. the ``h^n`` coefficient."""
        return self.coeffs[self.n]

    def inverse_linear(self, d: int) -> "ChernPoly":
        """Multiply by ``(1 + d h)^(-1)`` inside the truncated ring."""
        geo = ChernPoly(self.n, [(-d) ** k for k in range(self.n + 1)])
        return self * geo

    @staticmethod
    def hpow(n, k):
        return ChernPoly(n, [1 if j == k else 0 for j in range(n + 1)])


def total_chern_cpn(n: int) -> ChernPoly:
    """Total Chern class ``(1 + h)^(n+1)`` of ``CP^n``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return ChernPoly(n, [comb(n + 1, j) for j in range(n + 1)])


def euler_fiber(n: int, d: int) -> int:
    """Euler characteristic of a smooth degree ``d`` hypersurface in ``CP^n``.

    ``n = 1`` gives ``d`` (the fiber is ``d`` points).
    """
    cF = total_chern_cpn(n).inverse_linear(d)
    # integrating c_(n-1)(F) over F = integrating c_(n-1)(F) * d h over X
    return (cF * ChernPoly.hpow(n, 1)).integrate() * d


def euler_base(n: int, d: int) -> int:
    """Euler characteristic of the base locus ``Y``, a ``(d, d)`` complete intersection.

    For ``n = 1`` two generic binary forms share no root, so ``Y`` is empty
    and 0 is returned by convention.
    """
    if n < 2:
        return 0
    cY = total_chern_cpn(n).inverse_linear(d).inverse_linear(d)
    return (cY * ChernPoly.hpow(n, 2)).integrate() * d * d


def exact_crit_count(n: int, d: int) -> int:
    """Number of complex critical points of a Lefschetz pencil of degree ``d`` on ``CP^n``.

    Solves ``chi(X) = 2 chi(F) - chi(Y) + (-1)^n #crit`` with
    ``chi(CP^n) = n + 1``. The closed form is ``(n + 1)(d - 1)^n``.
    """
    if n < 1 or d < 1:
        raise ValueError("need n >= 1 and d >= 1")
    return (-1) ** n * ((n + 1) - 2 * euler_fiber(n, d) + euler_base(n, d))


def crit_count_polynomial(n: int):
    """Integer coefficients of ``exact_crit_count(n, d)`` as a polynomial in ``d``.

    Obtained by exact Lagrange interpolation through ``d = 1..n+1``;
    ``coeffs[k]`` multiplies ``d^k``.
    """
    pts = list(range(1, n + 2))
    vals = [exact_crit_count(n, d) for d in pts]
    coeffs = [Fraction(0)] * (n + 1)
    for i, xi in enumerate(pts):
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j, xj in enumerate(pts):
            if j == i:
                continue
            basis = [Fraction(0)] + basis
            for k in range(len(basis) - 1):
                basis[k] -= xj * basis[k + 1]
            denom *= xi - xj
        for k in range(n + 1):
            coeffs[k] += vals[i] * basis[k] / denom
    if any(c.denominator != 1 for c in coeffs):
        raise ArithmeticError("non-integer interpolant")
    return [int(c) for c in coeffs]


def leading_density_complex(n: int):
    """Pair ``((n+1) * int c_1^n, (n+1)! * int dvol_h)`` for ``CP^n``, both exact.

    On ``CP^n`` with ``L = O(1)`` the first integral is 1 and the
    Fubini-Study volume is ``1/n!``. The two numbers must coincide; an
    ``AssertionError`` is raised otherwise.
    """
    top = (n + 1) * ChernPoly.hpow(n, n).integrate()
    vol = Fraction(1, factorial(n))
    other = factorial(n + 1) * vol
    assert top == other, (top, other)
    return Fraction(top), other


def chern_table(n: int, d_max: int, d_min: int = 1):
    """Rows ``(n, d, chi_F, chi_Y, crit)`` for ``d_min <= d <= d_max``."""
    return [(n, d, euler_fiber(n, d), euler_base(n, d), exact_crit_count(n, d))
            for d in range(d_min, d_max + 1)]
