"""Wavelet frames from a solved mask tree.

Every wavelet has ``psi_hat = 1_E`` for a dual coset ``E`` on which
``phi_hat(chi A^-1)`` does not vanish, with mask ``m_E = 1 / phi_hat(chi A^-1)``
on ``E`` and 0 elsewhere.  The system is a tight frame as soon as the
dilates ``E A^t`` are disjoint, the ``E`` are disjoint, and the dilates tile
the top annulus ``G_{M+1}^perp \\ G_M^perp``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import FrameConstructionError
from .qp import CharacterWord, DualCoset, GroupParams
from .solver import MaskSpec, assemble_phi, assemble_phi_hat, solve_mask
from .steps import StepFunctionFreq, StepFunctionTime, inverse_fourier
from .tree import (
    MaskTree,
    apply_transforms,
    initial_tree,
    phi_hat_tree,
    shift_tree,
    shifted_zero_shadow,
)

__all__ = [
    "WaveletSpec",
    "FrameSystem",
    "Theorem31Report",
    "smallest_zero_level",
    "build_general",
    "build_n1",
    "build_custom",
    "construct_frame",
    "check_theorem31",
    "check_dilation_tiling",
    "coset_cells",
    "cosets_disjoint",
]


@dataclass(frozen=True, eq=False)
class WaveletSpec:
    E: DualCoset
    t: int
    psi_hat: StepFunctionFreq
    psi_time: StepFunctionTime
    mask_values: StepFunctionFreq

    @property
    def target(self) -> DualCoset:
        """``E A^t``."""
        return self.E.dilate(self.t)


@dataclass(frozen=True, eq=False)
class FrameSystem:
    params: GroupParams
    mask: MaskSpec
    phi_hat: StepFunctionFreq
    phi: StepFunctionTime
    wavelets: tuple[WaveletSpec, ...]
    branch: str
    n: int
    orthogonal: bool = False
    partition: dict = field(default_factory=dict)

    @property
    def tree(self) -> MaskTree:
        return self.mask.tree

    @property
    def shifted(self) -> np.ndarray:
        """Node values of ``phi_hat(chi A^-1)``."""
        return shift_tree(phi_hat_tree(self.tree), self.params.p)

    @property
    def shifted_zeros(self) -> np.ndarray:
        return shifted_zero_shadow(self.tree)

    @property
    def provenance(self) -> dict:
        return {"history": list(self.tree.history), "branch": self.branch, "n": self.n}


def smallest_zero_level(shifted_zeros: np.ndarray, p: int) -> int:
    """``n`` such that level ``n+1`` is the first level of the shifted tree holding a zero."""
    zeros = np.flatnonzero(np.asarray(shifted_zeros, dtype=bool))
    if zeros.size == 0:
        raise FrameConstructionError("the shifted tree has no zero; the mask tree is not valid")
    m = int(zeros[0])
    s = 0
    while m:
        m //= p
        s += 1
    return s - 1


def coset_cells(params: GroupParams, coset: DualCoset) -> range:
    """Indices of the level ``-N`` cells of a coset inside the ``(-N, M+1)`` window.

    Cells of a coset are contiguous in Monna order.
    """
    p, N = params.p, params.N
    if coset.level < -N:
        raise ValueError(f"{coset} is finer than the tree resolution G_{-N}^perp")
    if coset.top is not None and coset.top > params.M:
        raise ValueError(f"{coset} lies outside G_{params.M + 1}^perp")
    start = 0
    for j, e in coset.rep.exponents:
        start += e * p ** (j + N)
    return range(start, start + p ** (coset.level + N))


def cosets_disjoint(a: DualCoset, b: DualCoset) -> bool:
    """Cosets of nested subgroups are either nested or disjoint."""
    fine, coarse = (a, b) if a.level <= b.level else (b, a)
    return not coarse.contains(fine.rep)


def _wavelet(params: GroupParams, shifted: np.ndarray, E: DualCoset, t: int) -> WaveletSpec:
    N, M = params.N, params.M
    cells = coset_cells(params, E)
    mask = np.zeros(params.p**params.height, dtype=complex)
    mask[cells.start : cells.stop] = 1 / shifted[cells.start : cells.stop]
    psi_hat = StepFunctionFreq.indicator(E)
    return WaveletSpec(
        E=E,
        t=int(t),
        psi_hat=psi_hat,
        psi_time=inverse_fourier(psi_hat),
        mask_values=StepFunctionFreq(params.p, -N, M + 1, mask),
    )


def _shifted_or_raise(spec: MaskSpec, cosets: Iterable[DualCoset]) -> np.ndarray:
    shadow = shifted_zero_shadow(spec.tree)
    for E in cosets:
        cells = coset_cells(spec.params, E)
        if shadow[cells.start : cells.stop].any():
            raise FrameConstructionError(f"phi_hat(chi A^-1) has a zero on {E}")
    return shift_tree(phi_hat_tree(spec.tree), spec.params.p)


def _system(spec, pieces, branch, n, orthogonal=False, partition=None) -> FrameSystem:
    pieces = list(pieces)
    shifted = _shifted_or_raise(spec, [E for E, _ in pieces])
    return FrameSystem(
        params=spec.params,
        mask=spec,
        phi_hat=assemble_phi_hat(spec),
        phi=assemble_phi(spec),
        wavelets=tuple(_wavelet(spec.params, shifted, E, t) for E, t in pieces),
        branch=branch,
        n=n,
        orthogonal=orthogonal,
        partition=partition or {},
    )


def _monna_sorted(pieces):
    return sorted(pieces, key=lambda E: (E.monna_interval()[0], E.level))


def _top_t(params: GroupParams, E: DualCoset) -> int:
    return params.M - (E.top if E.top is not None else E.level - 1)


def build_general(spec: MaskSpec, n: int) -> FrameSystem:
    """``p - 1`` wavelets on the cosets ``G_l^perp r_l^alpha``, ``l = n - N - 1``.

    When ``l > 0`` the cosets are split into ``G_0^perp`` cosets, since the
    coefficient identity behind the frame property needs the translation set
    ``H_0`` to be complete on each wavelet support.
    """
    params = spec.params
    p, N, M = params.p, params.N, params.M
    if M != N:
        raise FrameConstructionError(f"the general branch needs M == N, got M={M}, N={N}")
    if n <= 1:
        raise FrameConstructionError(f"the general branch needs n > 1, got n={n}")
    level = n - N - 1
    pieces = []
    for alpha in range(1, p):
        top = CharacterWord.rademacher(p, level, alpha)
        if level <= 0:
            pieces.append(DualCoset(level, top))
            continue
        for k in range(p**level):
            low = {i: (k // p**i) % p for i in range(level)}
            pieces.append(DualCoset(0, top * CharacterWord.from_exponents(p, low)))
    pieces = [(E, _top_t(params, E)) for E in _monna_sorted(pieces)]
    return _system(spec, pieces, "general", n)


def build_n1(spec: MaskSpec, split: Iterable[int] | None = None, n: int = 1) -> FrameSystem:
    """The ``n = 1`` branch.

    ``J1`` holds the level-one mask nodes that are nonzero and ``J0`` those
    that are zero.  Each ``j`` in ``J1`` contributes the coset
    ``G_{-N+1}^perp r_{-N+1}^j``; listing ``j`` in ``split`` replaces it by
    its ``p`` subcosets ``G_{-N}^perp r_{-N}^k r_{-N+1}^j``.  Each ``j`` in
    ``J0`` contributes ``G_{-N}^perp r_{-N}^j``.  When ``J1`` is empty the
    scaling function already generates an orthogonal MRA and no wavelets are
    produced.
    """
    params = spec.params
    p, N = params.p, params.N
    split = sorted({int(j) for j in (split or ())})
    J1 = [j for j in range(1, p) if j not in spec.zeros]
    J0 = [j for j in range(1, p) if j in spec.zeros]
    bad = [j for j in split if j not in J1]
    if bad:
        raise FrameConstructionError(f"split indices {bad} are not in J1 = {J1}")
    partition = {"J1": J1, "J0": J0, "split": split}
    if not J1:
        return _system(spec, [], "n1-orthogonal", n, orthogonal=True, partition=partition)
    pieces = []
    for j in J1:
        if j in split:
            for k in range(p):
                pieces.append(DualCoset(-N, CharacterWord.from_exponents(p, {-N: k, -N + 1: j})))
        else:
            pieces.append(DualCoset(-N + 1, CharacterWord.rademacher(p, -N + 1, j)))
    for j in J0:
        pieces.append(DualCoset(-N, CharacterWord.rademacher(p, -N, j)))
    pieces = [(E, _top_t(params, E)) for E in _monna_sorted(pieces)]
    return _system(spec, pieces, "n1-custom" if split else "n1-default", n, partition=partition)


def build_custom(spec: MaskSpec, pieces: Sequence[tuple[DualCoset, int]]) -> FrameSystem:
    """User-supplied ``(E, t)`` pairs; validate them with :func:`check_theorem31`."""
    n = smallest_zero_level(shifted_zero_shadow(spec.tree), spec.params.p)
    return _system(spec, [(E, int(t)) for E, t in pieces], "custom", n)


def construct_frame(
    params: GroupParams,
    transforms: Sequence[tuple[str, int]] = (),
    tree: MaskTree | None = None,
    split: Iterable[int] | None = None,
    padding: Sequence[int] | None = None,
    pieces: Sequence[tuple[DualCoset, int]] | None = None,
) -> FrameSystem:
    """Tree, transforms, mask solve, then the branch picked by the shifted tree."""
    if tree is None:
        tree = initial_tree(params)
    tree = apply_transforms(tree, transforms)
    spec = solve_mask(tree, padding)
    if pieces is not None:
        return build_custom(spec, pieces)
    n = smallest_zero_level(shifted_zero_shadow(spec.tree), params.p)
    if n > 1:
        if split:
            raise FrameConstructionError(f"a J-partition only applies when n = 1, here n = {n}")
        return build_general(spec, n)
    return build_n1(spec, split, n)


@dataclass
class Theorem31Report:
    applicable: bool = True
    failures: list[str] = field(default_factory=list)
    checks: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def as_dict(self) -> dict:
        return {
            "applicable": self.applicable,
            "passed": self.passed,
            "failures": list(self.failures),
            "checks": dict(self.checks),
        }


def check_theorem31(fs: FrameSystem, tol: float = 1e-12) -> Theorem31Report:
    """Check the tiling hypotheses and the per-wavelet mask identities.

    Cosets are refined to the tree's ``G_{-N}^perp`` cells inside
    ``G_{M+1}^perp``; every cell of the top annulus must be covered by
    exactly one dilate and no cell outside it by any.
    """
    report = Theorem31Report()
    if fs.orthogonal:
        report.applicable = False
        report.checks["orthogonal"] = True
        return report
    params = fs.params
    p, N, M = params.p, params.N, params.M
    fail = report.failures
    if not fs.wavelets:
        fail.append("no wavelets")
        return report
    Es = [w.E for w in fs.wavelets]
    targets = [w.target for w in fs.wavelets]

    for w in fs.wavelets:
        if w.t < 0:
            fail.append(f"negative dilation t={w.t} for {w.E}")
        if w.E.level > 0:
            fail.append(f"{w.E} is coarser than G_0^perp, so H_0 shifts do not span L2(E)")
    for i in range(len(Es)):
        for k in range(i + 1, len(Es)):
            if not cosets_disjoint(Es[i], Es[k]):
                fail.append(f"supports overlap: {Es[i]} and {Es[k]}")
            if not cosets_disjoint(targets[i], targets[k]):
                fail.append(f"dilates overlap: {targets[i]} and {targets[k]}")

    cover = np.zeros(p**params.height, dtype=np.int64)
    for T in targets:
        try:
            cells = coset_cells(params, T)
        except ValueError as exc:
            fail.append(f"dilate {T} escapes the tree window: {exc}")
            continue
        cover[cells.start : cells.stop] += 1
    annulus = np.zeros_like(cover, dtype=bool)
    annulus[p ** (M + N) :] = True
    outside = np.flatnonzero(~annulus & (cover > 0))
    missing = np.flatnonzero(annulus & (cover == 0))
    double = np.flatnonzero(cover > 1)
    if outside.size:
        fail.append(f"dilates leave the top annulus, e.g. on {_cell(params, outside[0])}")
    if missing.size:
        fail.append(f"top annulus not covered, e.g. {_cell(params, missing[0])}")
    if double.size:
        fail.append(f"cell {_cell(params, double[0])} covered {cover[double[0]]} times")
    measure = sum(Fraction(p) ** T.level for T in targets)
    report.checks["measure"] = str(measure)
    report.checks["annulus_measure"] = str(Fraction(p) ** (M + 1) - Fraction(p) ** M)

    shadow = fs.shifted_zeros
    shifted = fs.shifted
    worst = 0.0
    for w in fs.wavelets:
        try:
            cells = coset_cells(params, w.E)
        except ValueError as exc:
            fail.append(str(exc))
            continue
        if shadow[cells.start : cells.stop].any():
            fail.append(f"phi_hat(chi A^-1) vanishes on part of {w.E}")
            continue
        inside = np.zeros(shifted.size, dtype=bool)
        inside[cells.start : cells.stop] = True
        m = w.mask_values.window(-N, M + 1).values
        worst = max(worst, float(np.max(np.abs(m[inside] * shifted[inside] - 1))))
        if np.any(m[~inside] != 0):
            fail.append(f"mask of {w.E} is nonzero outside its coset")
    report.checks["mask_identity_max_error"] = worst
    if worst > tol:
        fail.append(f"m_j * phi_hat(chi A^-1) differs from 1 by {worst:.3e}")
    report.checks["dilation_tiling"] = check_dilation_tiling(fs)
    if not report.checks["dilation_tiling"]:
        fail.append(f"dilates E A^(t+k) do not tile the window of width {M + 3}")
    return report


def _cell(params: GroupParams, k: int) -> DualCoset:
    return StepFunctionFreq.zeros(params.p, -params.N, params.M + 1).coset_at(int(k))


def check_dilation_tiling(fs: FrameSystem, K: int | None = None) -> bool:
    """The family ``E_j A^{t_j + k}``, ``k`` in Z, tiles ``G_K^perp \\ G_{-K}^perp`` once.

    Works on Monna intervals with exact rationals: the dilates whose top
    index lies in ``[-K, K)`` must abut exactly from ``p**-K`` to ``p**K``.
    """
    p = fs.params.p
    if K is None:
        K = fs.params.M + 3
    intervals = []
    for w in fs.wavelets:
        T = w.target
        if T.top is None:
            return False
        for k in range(-K - T.top, K - T.top):
            intervals.append(T.dilate(k).monna_interval())
    intervals.sort()
    edge = Fraction(p) ** (-K)
    for lo, hi in intervals:
        if lo != edge:
            return False
        edge = hi
    return edge == Fraction(p) ** K
