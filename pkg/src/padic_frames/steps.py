"""Step functions on the p-adic group and on its dual, with exact transforms.

Both classes store a dense value array over a finite window of cosets.

``StepFunctionTime(p, level=a, support=b)`` is constant on cosets of
``G_a`` and vanishes outside ``G_b`` (``b <= a``).  The coset
``G_a + x`` sits at index ``sum x_n p**(n-b)`` over ``b <= n < a``; this
index map is an isomorphism ``G_b / G_a -> Z / p**(a-b)``, so translations
are cyclic shifts.

``StepFunctionFreq(p, level=l, support=s)`` is constant on cosets of
``G_l^perp`` and vanishes outside ``G_s^perp`` (``l <= s``).  The coset
``G_l^perp * w`` sits at index ``sum alpha_j p**(j-l)`` over ``l <= j < s``,
which is the Monna value of ``w`` in units of ``p**l``.

Under these layouts the pairing between window indices is
``exp(2 pi i X rev(k) / p**K)`` with ``rev`` the K-digit base-p reversal, so
the transforms below are digit-reversed DFTs.  All integrals are finite sums
``measure * value``.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterator, Mapping

import numpy as np

from .qp import (
    CharacterWord,
    DualCoset,
    GroupElement,
    TimeCoset,
    multiply_characters,
    pair,
)

__all__ = [
    "StepFunctionTime",
    "StepFunctionFreq",
    "digit_reverse",
    "fourier",
    "inverse_fourier",
    "inner_product",
    "inner_product_freq",
    "integral_of_product",
    "refine",
    "pointwise_product",
    "coset_gram",
    "DUST",
]

DUST = 1e-14


@functools.lru_cache(maxsize=64)
def digit_reverse(p: int, K: int) -> np.ndarray:
    """Permutation ``k -> rev_K(k)`` on ``range(p**K)``; an involution."""
    k = np.arange(p**K, dtype=np.int64)
    rev = np.zeros_like(k)
    for _ in range(K):
        rev = rev * p + k % p
        k = k // p
    rev.setflags(write=False)
    return rev


def _digits(k: int, p: int, count: int) -> list[int]:
    out = []
    for _ in range(count):
        k, d = divmod(k, p)
        out.append(d)
    return out


def _as_values(values, size: int) -> np.ndarray:
    arr = np.array(values, dtype=complex).reshape(-1)
    if arr.size != size:
        raise ValueError(f"expected {size} values, got {arr.size}")
    arr.setflags(write=False)
    return arr


def _dust(values: np.ndarray, tol: float) -> np.ndarray:
    if tol <= 0 or values.size == 0:
        return values
    scale = np.abs(values).max()
    if scale == 0:
        return values
    out = values.copy()
    out[np.abs(out) < tol * scale] = 0
    return out


@dataclass(frozen=True, eq=False)
class StepFunctionTime:
    p: int
    level: int
    support: int
    values: np.ndarray

    def __post_init__(self):
        if self.support > self.level:
            raise ValueError(f"support {self.support} above constancy level {self.level}")
        object.__setattr__(self, "values", _as_values(self.values, self.size))

    @property
    def size(self) -> int:
        return self.p ** (self.level - self.support)

    @property
    def measure(self) -> float:
        """Haar measure of one cell, ``p**(-level)``."""
        return float(Fraction(self.p) ** (-self.level))

    @classmethod
    def zeros(cls, p: int, level: int, support: int) -> StepFunctionTime:
        return cls(p, level, support, np.zeros(p ** (level - support), dtype=complex))

    @classmethod
    def indicator(cls, coset: TimeCoset) -> StepFunctionTime:
        return cls.from_cosets(coset.p, {coset: 1.0})

    @classmethod
    def from_cosets(cls, p: int, mapping: Mapping[TimeCoset, complex]) -> StepFunctionTime:
        """Build from ``{TimeCoset: value}``; all cosets must share one level."""
        levels = {c.level for c in mapping}
        if len(levels) > 1:
            raise ValueError(f"cosets at mixed levels {sorted(levels)}")
        if not mapping:
            raise ValueError("empty mapping; use zeros()")
        level = levels.pop()
        support = min([c.rep.lowest for c in mapping if not c.rep.is_zero] + [level])
        out = np.zeros(p ** (level - support), dtype=complex)
        f = cls(p, level, support, out)
        for c, v in mapping.items():
            out[f.index_of(c.rep)] += v
        return cls(p, level, support, out)

    def index_of(self, x: GroupElement) -> int | None:
        """Array index of the coset containing ``x``, or None outside the support."""
        k = 0
        for n, d in x.digits:
            if n < self.support:
                return None
            if n < self.level:
                k += d * self.p ** (n - self.support)
        return k

    def coset_at(self, k: int) -> TimeCoset:
        digits = _digits(k, self.p, self.level - self.support)
        rep = GroupElement.from_digits(self.p, {self.support + i: d for i, d in enumerate(digits)})
        return TimeCoset(self.level, rep)

    def cosets(self, tol: float = 0.0) -> Iterator[tuple[TimeCoset, complex]]:
        """Nonzero ``(coset, value)`` pairs in index order."""
        for k in np.flatnonzero(np.abs(self.values) > tol):
            yield self.coset_at(int(k)), complex(self.values[k])

    def __call__(self, x: GroupElement) -> complex:
        k = self.index_of(x)
        return 0j if k is None else complex(self.values[k])

    def window(self, level: int, support: int) -> StepFunctionTime:
        """Same function on a finer/wider window (``level >= self.level``, ``support <= self.support``)."""
        if level < self.level or support > self.support:
            raise ValueError("window can only refine the level and widen the support")
        p = self.p
        vals = self.values
        if support < self.support:
            stride = p ** (self.support - support)
            wide = np.zeros(vals.size * stride, dtype=complex)
            wide[::stride] = vals
            vals = wide
        if level > self.level:
            vals = np.tile(vals, p ** (level - self.level))
        return StepFunctionTime(p, level, support, vals)

    def translate(self, h: GroupElement) -> StepFunctionTime:
        """``x -> f(x - h)``."""
        low = h.lowest if not h.is_zero else self.support
        f = self.window(self.level, min(self.support, low))
        shift = f.index_of(h)
        return StepFunctionTime(self.p, f.level, f.support, np.roll(f.values, shift))

    def dilate(self, k: int = 1) -> StepFunctionTime:
        """``x -> f(A**k x)``."""
        return StepFunctionTime(self.p, self.level + k, self.support + k, self.values)

    def canonical(self, tol: float = DUST) -> StepFunctionTime:
        """Drop numerical dust, then shrink to the smallest window holding the function."""
        p, level, support = self.p, self.level, self.support
        vals = _dust(self.values, tol)
        while level > support and not vals[np.arange(vals.size) % p != 0].any():
            vals = vals[::p]
            support += 1
        while level > support:
            blocks = vals.reshape(p, -1)
            if not np.array_equal(blocks, np.broadcast_to(blocks[0], blocks.shape)):
                break
            vals = blocks[0]
            level -= 1
        return StepFunctionTime(p, level, support, vals)

    def norm2(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.measure)

    def integral(self) -> complex:
        return complex(self.values.sum() * self.measure)

    def _binary(self, other: StepFunctionTime, op) -> StepFunctionTime:
        a, b = _common_time(self, other)
        return StepFunctionTime(self.p, a.level, a.support, op(a.values, b.values))

    def __add__(self, other):
        return self._binary(other, np.add)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __mul__(self, c: complex):
        return StepFunctionTime(self.p, self.level, self.support, self.values * c)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def max_abs_diff(self, other: StepFunctionTime) -> float:
        a, b = _common_time(self, other)
        return float(np.max(np.abs(a.values - b.values)))

    def __repr__(self):
        return f"StepFunctionTime(p={self.p}, level={self.level}, support={self.support}, size={self.size})"


@dataclass(frozen=True, eq=False)
class StepFunctionFreq:
    p: int
    level: int
    support: int
    values: np.ndarray

    def __post_init__(self):
        if self.level > self.support:
            raise ValueError(f"refinement level {self.level} above support {self.support}")
        object.__setattr__(self, "values", _as_values(self.values, self.size))

    @property
    def size(self) -> int:
        return self.p ** (self.support - self.level)

    @property
    def measure(self) -> float:
        """Measure of one cell, ``p**level``."""
        return float(Fraction(self.p) ** self.level)

    @classmethod
    def zeros(cls, p: int, level: int, support: int) -> StepFunctionFreq:
        return cls(p, level, support, np.zeros(p ** (support - level), dtype=complex))

    @classmethod
    def indicator(cls, coset: DualCoset) -> StepFunctionFreq:
        return cls.from_cosets(coset.p, {coset: 1.0})

    @classmethod
    def from_cosets(cls, p: int, mapping: Mapping[DualCoset, complex]) -> StepFunctionFreq:
        levels = {c.level for c in mapping}
        if len(levels) > 1:
            raise ValueError(f"cosets at mixed levels {sorted(levels)}")
        if not mapping:
            raise ValueError("empty mapping; use zeros()")
        level = levels.pop()
        support = max([c.rep.highest + 1 for c in mapping if not c.rep.is_trivial] + [level])
        out = np.zeros(p ** (support - level), dtype=complex)
        F = cls(p, level, support, out)
        for c, v in mapping.items():
            out[F.index_of(c.rep)] += v
        return cls(p, level, support, out)

    def index_of(self, w: CharacterWord) -> int | None:
        """Array index of the coset containing ``w``, or None outside the support."""
        k = 0
        for j, e in w.exponents:
            if j >= self.support:
                return None
            if j >= self.level:
                k += e * self.p ** (j - self.level)
        return k

    def coset_at(self, k: int) -> DualCoset:
        digits = _digits(k, self.p, self.support - self.level)
        rep = CharacterWord.from_exponents(self.p, {self.level + i: d for i, d in enumerate(digits)})
        return DualCoset(self.level, rep)

    def cosets(self, tol: float = 0.0) -> Iterator[tuple[DualCoset, complex]]:
        """Nonzero ``(coset, value)`` pairs in Monna order."""
        for k in np.flatnonzero(np.abs(self.values) > tol):
            yield self.coset_at(int(k)), complex(self.values[k])

    def __call__(self, w: CharacterWord) -> complex:
        k = self.index_of(w)
        return 0j if k is None else complex(self.values[k])

    def window(self, level: int, support: int) -> StepFunctionFreq:
        """Same function on a finer/wider window (``level <= self.level``, ``support >= self.support``)."""
        if level > self.level or support < self.support:
            raise ValueError("window can only refine the level and widen the support")
        vals = np.repeat(self.values, self.p ** (self.level - level))
        if support > self.support:
            wide = np.zeros(vals.size * self.p ** (support - self.support), dtype=complex)
            wide[: vals.size] = vals
            vals = wide
        return StepFunctionFreq(self.p, level, support, vals)

    def dilate(self, k: int = 1) -> StepFunctionFreq:
        """``chi -> F(chi A**(-k))``."""
        return StepFunctionFreq(self.p, self.level + k, self.support + k, self.values)

    def canonical(self, tol: float = DUST) -> StepFunctionFreq:
        p, level, support = self.p, self.level, self.support
        vals = _dust(self.values, tol)
        while support > level and not vals[vals.size // p :].any():
            vals = vals[: vals.size // p]
            support -= 1
        while support > level:
            blocks = vals.reshape(-1, p)
            if not np.array_equal(blocks, np.repeat(blocks[:, :1], p, axis=1)):
                break
            vals = blocks[:, 0]
            level += 1
        return StepFunctionFreq(p, level, support, vals)

    def norm2(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.measure)

    def integral(self) -> complex:
        return complex(self.values.sum() * self.measure)

    def _binary(self, other: StepFunctionFreq, op) -> StepFunctionFreq:
        a, b = _common_freq(self, other)
        return StepFunctionFreq(self.p, a.level, a.support, op(a.values, b.values))

    def __add__(self, other):
        return self._binary(other, np.add)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __mul__(self, c):
        if isinstance(c, StepFunctionFreq):
            return pointwise_product(self, c)
        return StepFunctionFreq(self.p, self.level, self.support, self.values * c)

    __rmul__ = __mul__

    def max_abs_diff(self, other: StepFunctionFreq) -> float:
        a, b = _common_freq(self, other)
        return float(np.max(np.abs(a.values - b.values)))

    def __repr__(self):
        return f"StepFunctionFreq(p={self.p}, level={self.level}, support={self.support}, size={self.size})"


def _common_time(f: StepFunctionTime, g: StepFunctionTime):
    if f.p != g.p:
        raise ValueError("mixed primes")
    level, support = max(f.level, g.level), min(f.support, g.support)
    return f.window(level, support), g.window(level, support)


def _common_freq(F: StepFunctionFreq, G: StepFunctionFreq):
    if F.p != G.p:
        raise ValueError("mixed primes")
    level, support = min(F.level, G.level), max(F.support, G.support)
    return F.window(level, support), G.window(level, support)


def fourier(f: StepFunctionTime) -> StepFunctionFreq:
    """``F(chi) = integral f(x) conj((chi, x)) dmu(x)``.

    A function constant on ``G_a``-cosets inside ``G_b`` transforms into one
    constant on ``G_b^perp``-cosets inside ``G_a^perp``.
    """
    p, a, b = f.p, f.level, f.support
    rev = digit_reverse(p, a - b)
    vals = np.fft.fft(f.values)[rev] * float(Fraction(p) ** (-a))
    return StepFunctionFreq(p, b, a, vals)


def inverse_fourier(F: StepFunctionFreq) -> StepFunctionTime:
    """``f(x) = integral F(chi) (chi, x) dnu(chi)``."""
    p, l, s = F.p, F.level, F.support
    rev = digit_reverse(p, s - l)
    vals = np.fft.ifft(F.values[rev]) * float(Fraction(p) ** s)
    return StepFunctionTime(p, s, l, vals)


def inner_product(f: StepFunctionTime, g: StepFunctionTime) -> complex:
    """``integral f conj(g) dmu``."""
    a, b = _common_time(f, g)
    return complex(np.vdot(b.values, a.values) * a.measure)


def inner_product_freq(F: StepFunctionFreq, G: StepFunctionFreq) -> complex:
    """``integral F conj(G) dnu``."""
    a, b = _common_freq(F, G)
    return complex(np.vdot(b.values, a.values) * a.measure)


def integral_of_product(F: StepFunctionFreq, G: StepFunctionFreq) -> complex:
    """``integral F G dnu`` without expanding either factor.

    Both arrays are cut to the smaller support; the finer one is summed down
    to the coarser level.
    """
    if F.p != G.p:
        raise ValueError("mixed primes")
    p = F.p
    if F.level > G.level:
        F, G = G, F
    s = min(F.support, G.support)
    if s < G.level:
        return F.integral() * complex(G.values[0])
    fine = F.values[: p ** (s - F.level)].reshape(-1, p ** (G.level - F.level)).sum(axis=1)
    return complex(np.dot(fine, G.values[: p ** (s - G.level)]) * F.measure)


def refine(F: StepFunctionFreq, new_level: int) -> StepFunctionFreq:
    if new_level > F.level:
        raise ValueError(f"cannot refine level {F.level} to coarser level {new_level}")
    return F.window(new_level, F.support)


def pointwise_product(F: StepFunctionFreq, G: StepFunctionFreq) -> StepFunctionFreq:
    a, b = _common_freq(F, G)
    return StepFunctionFreq(F.p, a.level, a.support, a.values * b.values)


def coset_gram(coset: DualCoset, elements: list[GroupElement], scale: float = 1.0) -> np.ndarray:
    """Gram matrix ``[scale * integral_coset (chi,h1) conj((chi,h2)) dnu]``.

    The coset is split into subcosets fine enough for every ``(chi, h)`` to
    be constant, and the integral is summed cell by cell.
    """
    p = coset.p
    lows = [h.lowest for h in elements if not h.is_zero]
    L = min([coset.level] + lows)
    cell = float(Fraction(p) ** L)
    words = []
    for digits in product(range(p), repeat=coset.level - L):
        sub = CharacterWord.from_exponents(p, {L + i: d for i, d in enumerate(digits)})
        words.append(multiply_characters(coset.rep, sub))
    table = np.array([[pair(w, h) for h in elements] for w in words])
    return scale * cell * (table.T @ table.conj())
