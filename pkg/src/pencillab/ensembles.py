"""Seeded samplers for Kostlan forms, symmetric Gaussian matrices and pencils.

Randomness is counter based. A stream is a value ``(seed, stream_id)``
which is hashed into a Philox key; sample ``i`` of the stream uses the
Philox counter block whose top word is ``i``. Draws for sample ``i``
therefore never depend on how many other samples were drawn, by which
worker, or in which order.
"""
from __future__ import annotations

import zlib
from dataclasses import dataclass
from math import comb, factorial

import numpy as np
from scipy.special import gammaln

from .forms import BinaryForm, TernaryForm, ternary_monomials

__all__ = [
    "RngStream",
    "make_stream",
    "stream_id_for",
    "SymMatrixSample",
    "PencilSample",
    "sample_kostlan_binary",
    "sample_kostlan_ternary",
    "sample_sym_matrix",
    "sample_pencil",
    "kostlan_binary_std",
    "kostlan_ternary_std",
]

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngStream:
    """Counter-based random stream identified by ``(seed, stream_id)``.

    Both fields are reduced modulo ``2**64``. Instances are hashable value
    objects and can be shipped to worker processes freely.
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        object.__setattr__(self, "seed", int(self.seed) & _MASK64)
        object.__setattr__(self, "stream_id", int(self.stream_id) & _MASK64)

    @property
    def key(self) -> np.ndarray:
        return np.random.SeedSequence([self.seed, self.stream_id]).generate_state(2, np.uint64)

    def generator(self, index: int = 0) -> np.random.Generator:
        """Generator for sample ``index``; bit-identical on every call."""
        if not 0 <= index <= _MASK64:
            raise ValueError("sample index must fit in 64 bits")
        counter = np.array([0, 0, 0, int(index)], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=self.key, counter=counter))

    def substream(self, stream_id: int) -> "RngStream":
        return RngStream(self.seed, stream_id)

    def doubles(self, n: int, index: int = 0) -> np.ndarray:
        """``n`` uniform doubles on ``[0, 1)`` for sample ``index``."""
        return self.generator(index).random(n)


def make_stream(seed: int, stream_id: int = 0) -> RngStream:
    return RngStream(seed, stream_id)


def stream_id_for(tag: str) -> int:
    """Stable 32-bit stream id derived from a text tag such as ``"pencil1d:64"``."""
    return zlib.crc32(tag.encode("utf-8"))


def _as_generator(rng, index=0):
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngStream):
        return rng.generator(index)
    raise TypeError(f"expected RngStream or numpy Generator, got {type(rng).__name__}")


def kostlan_binary_std(d: int) -> np.ndarray:
    """Coefficient standard deviations ``sqrt(C(d, k))``, ``k = 0..d``."""
    # float(comb) overflows past d ~ 1030, so go through logs
    k = np.arange(d + 1)
    return np.exp(0.5 * (gammaln(d + 1) - gammaln(k + 1) - gammaln(d - k + 1)))


def kostlan_ternary_std(d: int) -> np.ndarray:
    """Multinomial standard deviations in the canonical monomial order."""
    return np.sqrt([factorial(d) / (factorial(i) * factorial(j) * factorial(k))
                    for i, j, k in ternary_monomials(d)])


def _check_degree(d):
    if int(d) != d or d < 1:
        raise ValueError(f"degree must be an integer >= 1, got {d!r}")


def sample_kostlan_binary(d: int, rng, index: int = 0) -> BinaryForm:
    """Kostlan binary form: coefficient of ``x^k y^(d-k)`` is ``N(0, C(d, k))``.

    ``rng`` may be an :class:`RngStream` (then ``index`` selects the
    sample) or an already positioned :class:`numpy.random.Generator`.
    """
    _check_degree(d)
    g = _as_generator(rng, index).standard_normal(d + 1)
    return BinaryForm(g * kostlan_binary_std(d))


def sample_kostlan_ternary(d: int, rng, index: int = 0) -> TernaryForm:
    """Kostlan ternary form with multinomial coefficient variances."""
    _check_degree(d)
    g = _as_generator(rng, index).standard_normal(comb(d + 2, 2))
    return TernaryForm(g * kostlan_ternary_std(d), degree=d)


@dataclass(frozen=True)
class SymMatrixSample:
    """Symmetric matrix whose upper triangle holds iid ``N(0, 1)`` entries."""

    n: int
    entries: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=float)
        if e.shape != (self.n, self.n) or not np.array_equal(e, e.T):
            raise ValueError("entries must be a symmetric n x n array")


def sample_sym_matrix(n: int, rng, index: int = 0, size=None):
    """Draw from the symmetric ensemble with unit-variance coordinates.

    With ``size=None`` a single :class:`SymMatrixSample` is returned.
    With an integer ``size`` a plain array of shape ``(size, n, n)`` is
    returned instead; this is the path used by the Monte Carlo
    estimators.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    gen = _as_generator(rng, index)
    iu = np.triu_indices(n)
    m = 1 if size is None else int(size)
    vals = gen.standard_normal((m, len(iu[0])))
    out = np.zeros((m, n, n))
    out[:, iu[0], iu[1]] = vals
    out[:, iu[1], iu[0]] = vals
    if size is None:
        return SymMatrixSample(n, out[0])
    return out


@dataclass(frozen=True)
class PencilSample:
    """Two forms of the same degree spanning a pencil."""

    alpha: object
    beta: object
    d: int
    n: int

    def __post_init__(self):
        if self.alpha.degree != self.d or self.beta.degree != self.d or self.d < 1:
            raise ValueError("pencil forms must share the degree d >= 1")


def sample_pencil(n: int, d: int, rng, index: int = 0) -> PencilSample:
    """Independent Kostlan pair on ``CP^n`` for ``n`` in ``{1, 2}``.

    Both forms come from the same per-sample generator, alpha first.
    """
    gen = _as_generator(rng, index)
    if n == 1:
        a, b = sample_kostlan_binary(d, gen), sample_kostlan_binary(d, gen)
    elif n == 2:
        a, b = sample_kostlan_ternary(d, gen), sample_kostlan_ternary(d, gen)
    else:
        raise ValueError("pencils are sampled on CP^1 and CP^2 only")
    return PencilSample(a, b, d, n)
