"""Arithmetic on the additive group of p-adic numbers and its characters.

An element ``x = sum a_n g_n`` is stored as a sparse, sorted tuple of
``(n, a_n)`` pairs with ``0 < a_n < p``; ``g_n`` plays the role of ``p**n``,
so addition carries toward increasing index.  A character
``chi = prod r_j**alpha_j`` is stored the same way.  Products of Rademacher
characters carry toward *decreasing* index because ``r_j**p == r_{j-1}``.

Only finite words are representable.  Infinite tails appear only through
negation; :func:`subtract` truncates them at a caller-supplied floor.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

__all__ = [
    "GroupParams",
    "GroupElement",
    "CharacterWord",
    "TimeCoset",
    "DualCoset",
    "is_prime",
    "add",
    "subtract",
    "negate_trunc",
    "dilate_element",
    "dilate_character",
    "multiply_characters",
    "pair",
    "pair_phase",
    "unit_root",
    "monna",
    "monna_dual",
    "enumerate_H0",
    "rademacher_in_annihilator",
]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for d in range(2, math.isqrt(n) + 1):
        if n % d == 0:
            return False
    return True


@dataclass(frozen=True)
class GroupParams:
    """Prime ``p``, support level ``N`` and constancy level ``M``."""

    p: int
    N: int
    M: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"p must be prime, got {self.p}")
        if self.N < 1 or self.M < 1:
            raise ValueError(f"N and M must be positive, got N={self.N}, M={self.M}")

    @property
    def height(self) -> int:
        """Number of tree levels above the root, ``M + N + 1``."""
        return self.M + self.N + 1


def _canonical(p: int, digits) -> tuple[tuple[int, int], ...]:
    if isinstance(digits, Mapping):
        items = digits.items()
    else:
        items = digits
    out = {}
    for n, a in items:
        n, a = int(n), int(a)
        if not 0 <= a < p:
            raise ValueError(f"digit {a} at index {n} outside [0, {p})")
        if n in out:
            raise ValueError(f"duplicate index {n}")
        if a:
            out[n] = a
    return tuple(sorted(out.items()))


@dataclass(frozen=True)
class GroupElement:
    """Finite p-adic word ``sum a_n g_n``."""

    p: int
    digits: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "digits", _canonical(self.p, self.digits))

    @classmethod
    def from_digits(cls, p: int, digits: Mapping[int, int] | Iterable) -> GroupElement:
        return cls(p, tuple(digits.items()) if isinstance(digits, Mapping) else tuple(digits))

    @classmethod
    def basis(cls, p: int, n: int, a: int = 1) -> GroupElement:
        """``a * g_n``."""
        return cls(p, ((n, a),))

    def digit(self, n: int) -> int:
        return dict(self.digits).get(n, 0)

    def as_dict(self) -> dict[int, int]:
        return dict(self.digits)

    @property
    def is_zero(self) -> bool:
        return not self.digits

    @property
    def lowest(self) -> int | None:
        return self.digits[0][0] if self.digits else None

    @property
    def highest(self) -> int | None:
        return self.digits[-1][0] if self.digits else None

    def __add__(self, other: GroupElement) -> GroupElement:
        return add(self, other)

    def __str__(self):
        if not self.digits:
            return "0"
        return " + ".join(f"{a}g[{n}]" if a != 1 else f"g[{n}]" for n, a in self.digits)


@dataclass(frozen=True)
class CharacterWord:
    """Finite character ``prod r_j**alpha_j``."""

    p: int
    exponents: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "exponents", _canonical(self.p, self.exponents))

    @classmethod
    def from_exponents(cls, p: int, exps: Mapping[int, int] | Iterable) -> CharacterWord:
        return cls(p, tuple(exps.items()) if isinstance(exps, Mapping) else tuple(exps))

    @classmethod
    def rademacher(cls, p: int, j: int, alpha: int = 1) -> CharacterWord:
        """``r_j ** alpha``."""
        return cls(p, ((j, alpha),))

    def exponent(self, j: int) -> int:
        return dict(self.exponents).get(j, 0)

    def as_dict(self) -> dict[int, int]:
        return dict(self.exponents)

    @property
    def is_trivial(self) -> bool:
        return not self.exponents

    @property
    def lowest(self) -> int | None:
        return self.exponents[0][0] if self.exponents else None

    @property
    def highest(self) -> int | None:
        return self.exponents[-1][0] if self.exponents else None

    def __mul__(self, other: CharacterWord) -> CharacterWord:
        return multiply_characters(self, other)

    def __str__(self):
        if not self.exponents:
            return "1"
        return "".join(f"r[{j}]^{a}" if a != 1 else f"r[{j}]" for j, a in self.exponents)


def _check_same_p(*objs):
    ps = {o.p for o in objs}
    if len(ps) != 1:
        raise ValueError(f"mixed primes {sorted(ps)}")
    return ps.pop()


def add(a: GroupElement, b: GroupElement) -> GroupElement:
    """Digitwise addition with carries toward higher index (``p g_n = g_{n+1}``)."""
    p = _check_same_p(a, b)
    if a.is_zero:
        return b
    if b.is_zero:
        return a
    da, db = a.as_dict(), b.as_dict()
    n = min(a.lowest, b.lowest)
    top = max(a.highest, b.highest)
    carry = 0
    out = {}
    while n <= top or carry:
        s = da.get(n, 0) + db.get(n, 0) + carry
        out[n], carry = s % p, s // p
        n += 1
    return GroupElement.from_digits(p, out)


def subtract(a: GroupElement, b: GroupElement, floor: int) -> GroupElement:
    """``a - b`` restricted to digit indices below ``floor``.

    Borrows run toward higher index; the (possibly infinite) tail of the
    exact difference at indices ``>= floor`` is discarded, which is exact
    for any consumer constant on cosets of ``G_floor``.
    """
    p = _check_same_p(a, b)
    lows = [e.lowest for e in (a, b) if not e.is_zero]
    if not lows:
        return GroupElement(p)
    da, db = a.as_dict(), b.as_dict()
    borrow = 0
    out = {}
    for n in range(min(lows), floor):
        d = da.get(n, 0) - db.get(n, 0) - borrow
        borrow = 1 if d < 0 else 0
        out[n] = d + p * borrow
    return GroupElement.from_digits(p, out)


def negate_trunc(a: GroupElement, floor: int) -> GroupElement:
    """``-a`` truncated below ``floor``."""
    return subtract(GroupElement(a.p), a, floor)


def dilate_element(a: GroupElement, k: int = 1) -> GroupElement:
    """``A**k a``: every digit index moves down by ``k``."""
    return GroupElement(a.p, tuple((n - k, d) for n, d in a.digits))


def dilate_character(w: CharacterWord, k: int = 1) -> CharacterWord:
    """``w A**k``: every exponent index moves up by ``k``."""
    return CharacterWord(w.p, tuple((j + k, e) for j, e in w.exponents))


def multiply_characters(u: CharacterWord, v: CharacterWord) -> CharacterWord:
    """Product of characters; exponent overflow carries to the next lower index."""
    p = _check_same_p(u, v)
    if u.is_trivial:
        return v
    if v.is_trivial:
        return u
    du, dv = u.as_dict(), v.as_dict()
    j = max(u.highest, v.highest)
    bottom = min(u.lowest, v.lowest)
    carry = 0
    out = {}
    while j >= bottom or carry:
        s = du.get(j, 0) + dv.get(j, 0) + carry
        out[j], carry = s % p, s // p
        j -= 1
    return CharacterWord.from_exponents(p, out)


def pair_phase(w: CharacterWord, a: GroupElement) -> Fraction:
    """Phase ``theta`` in ``[0, 1)`` with ``(w, a) = exp(2 pi i theta)``."""
    p = _check_same_p(w, a)
    total = Fraction(0)
    for j, alpha in w.exponents:
        for n, d in a.digits:
            e = j - n + 1
            if e > 0:
                total += Fraction(alpha * d, p**e)
    return total - math.floor(total)


def unit_root(phase: Fraction) -> complex:
    """``exp(2 pi i phase)`` computed from the reduced exact fraction."""
    k, m = phase.numerator % phase.denominator, phase.denominator
    if k == 0:
        return 1 + 0j
    return cmath.exp(2j * math.pi * k / m)


def pair(w: CharacterWord, a: GroupElement) -> complex:
    """Character value ``(w, a)``."""
    return unit_root(pair_phase(w, a))


def monna(a: GroupElement) -> Fraction:
    """Monna map ``sum a_n p**(-n-1)``."""
    return sum((Fraction(d) * Fraction(a.p) ** (-n - 1) for n, d in a.digits), Fraction(0))


def monna_dual(w: CharacterWord) -> Fraction:
    """Dual Monna map ``sum alpha_j p**j``."""
    return sum((Fraction(e) * Fraction(w.p) ** j for j, e in w.exponents), Fraction(0))


def enumerate_H0(p: int, s: int) -> list[GroupElement]:
    """All of ``H_0^{(s)}`` ordered so that the Monna values are ``0..p**s-1``."""
    if s < 1:
        raise ValueError(f"s must be >= 1, got {s}")
    out = []
    for k in range(p**s):
        digits = {}
        for i in range(1, s + 1):
            k, digits[-i] = divmod(k, p)
        out.append(GroupElement.from_digits(p, digits))
    return out


def rademacher_in_annihilator(j: int, level: int) -> bool:
    """``r_j`` lies in ``G_level^perp`` iff ``j < level``."""
    return j < level


@dataclass(frozen=True)
class TimeCoset:
    """Coset ``G_level + rep`` with ``rep`` reduced to digits below ``level``."""

    level: int
    rep: GroupElement

    def __post_init__(self):
        reduced = GroupElement(self.rep.p, tuple((n, d) for n, d in self.rep.digits if n < self.level))
        object.__setattr__(self, "rep", reduced)

    @property
    def p(self) -> int:
        return self.rep.p

    @property
    def measure(self) -> Fraction:
        return Fraction(self.p) ** (-self.level)

    def contains(self, x: GroupElement) -> bool:
        return TimeCoset(self.level, x).rep == self.rep

    def __str__(self):
        return f"G[{self.level}] + ({self.rep})"


@dataclass(frozen=True)
class DualCoset:
    """Coset ``G_level^perp * rep`` with ``rep`` reduced to exponents at indices ``>= level``."""

    level: int
    rep: CharacterWord

    def __post_init__(self):
        reduced = CharacterWord(
            self.rep.p,
            tuple((j, e) for j, e in self.rep.exponents if not rademacher_in_annihilator(j, self.level)),
        )
        object.__setattr__(self, "rep", reduced)

    @property
    def p(self) -> int:
        return self.rep.p

    @property
    def measure(self) -> Fraction:
        return Fraction(self.p) ** self.level

    @property
    def top(self) -> int | None:
        """Highest exponent index of the representative (``None`` for the subgroup itself)."""
        return self.rep.highest

    def contains(self, w: CharacterWord) -> bool:
        return DualCoset(self.level, w).rep == self.rep

    def dilate(self, k: int = 1) -> DualCoset:
        """``self A**k``."""
        return DualCoset(self.level + k, dilate_character(self.rep, k))

    def monna_interval(self) -> tuple[Fraction, Fraction]:
        lo = monna_dual(self.rep)
        return lo, lo + self.measure

    def __str__(self):
        return f"G[{self.level}]^perp * {self.rep}"
