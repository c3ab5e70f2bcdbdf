"""Exact real-root counting of binary forms with Sturm sequences.

All arithmetic is on Python integers. The chart polynomial at ``y = 1``
is reduced to its squarefree part, then a primitive Sturm chain is run
and the sign variations at ``-inf`` and ``+inf`` are compared. The gcd
with the derivative is read off the tail of a first chain, so generic
(already squarefree) inputs pay for one chain only. A missing top
coefficient means ``[1:0]`` is a root and adds one.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm

from ..errors import ZeroFormError

__all__ = ["sturm_count", "sturm_count_poly"]


def _trim(p):
    while p and p[-1] == 0:
        p.pop()
    return p


def _content(p):
    g = 0
    for c in p:
        g = gcd(g, c)
        if g == 1:
            break
    return g


def _primitive(p):
    g = _content(p)
    if g > 1:
        p = [c // g for c in p]
    return p


def _deriv(p):
    return [k * p[k] for k in range(1, len(p))]


def _prem(a, b):
    """Remainder of ``lc(b)^steps * a`` modulo ``b`` (lowest-first lists).

    Returns ``(r, steps)``; ``steps`` is the number of times ``lc(b)`` was
    multiplied in, needed to recover the sign of the true remainder.
    """
    r = list(a)
    db = len(b) - 1
    lb = b[-1]
    steps = 0
    while r and len(r) - 1 >= db:
        lr = r[-1]
        shift = len(r) - 1 - db
        r = [c * lb for c in r]
        for i, c in enumerate(b):
            r[i + shift] -= lr * c
        r.pop()
        _trim(r)
        steps += 1
    return r, steps


def _exact_div(a, b):
    """Quotient ``a / b`` for integer polynomials where ``b`` divides ``a`` over Q."""
    a = [Fraction(c) for c in a]
    q = [Fraction(0)] * (len(a) - len(b) + 1)
    for k in range(len(q) - 1, -1, -1):
        q[k] = a[k + len(b) - 1] / b[-1]
        for i, c in enumerate(b):
            a[k + i] -= q[k] * c
    if any(a[: len(b) - 1]):
        raise ArithmeticError("inexact polynomial division")
    den = lcm(*(c.denominator for c in q))
    return _primitive([int(c * den) for c in q])


def _variations(signs):
    out, prev = 0, 0
    for s in signs:
        if s != 0:
            if prev != 0 and s != prev:
                out += 1
            prev = s
    return out


def _sign(x):
    return (x > 0) - (x < 0)


def _chain(p):
    chain = [p, _primitive(_deriv(p))]
    while len(chain[-1]) > 1:
        a, b = chain[-2], chain[-1]
        r, k = _prem(a, b)
        if not r:
            break
        # the pseudo-remainder carries a factor lc(b)^k; flip back when it is negative
        if b[-1] < 0 and k % 2 == 1:
            r = [-c for c in r]
        chain.append([-c for c in _primitive(r)])
    return chain


def sturm_count_poly(p) -> int:
    """Number of distinct real roots of an integer polynomial (lowest-first coefficients)."""
    p = _trim([int(c) for c in p])
    if not p:
        raise ZeroFormError("zero polynomial")
    if len(p) == 1:
        return 0
    p = _primitive(p)
    chain = _chain(p)
    if len(chain[-1]) > 1:
        # the last element is gcd(p, p'): pass to the squarefree part and restart
        p = _exact_div(p, chain[-1])
        if len(p) == 1:
            return 0
        chain = _chain(p)
    at_pos = [_sign(q[-1]) for q in chain]
    at_neg = [_sign(q[-1]) * (-1) ** (len(q) - 1) for q in chain]
    return _variations(at_neg) - _variations(at_pos)


def sturm_count(f) -> int:
    """Exact number of distinct real projective roots of a binary form.

    Parameters
    ----------
    f : BinaryForm
        Exact or float coefficients. Floats are converted without rounding,
        so the count is exact for the binary numbers actually stored.
        Practical up to degree ~60.

    Returns
    -------
    int
    """
    coeffs = [Fraction(c) for c in f.coeffs]
    if not any(coeffs):
        raise ZeroFormError("zero form")
    den = lcm(*(c.denominator for c in coeffs))
    ints = [int(c * den) for c in coeffs]
    at_infinity = 0
    if ints[-1] == 0:
        at_infinity = 1
        ints = _trim(ints)
    return sturm_count_poly(ints) + at_infinity
