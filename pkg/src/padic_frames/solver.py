"""Mask coefficients from a zero-placement tree.

The mask ``m_0(chi) = sum_h beta_h conj((chi A^-1, h))`` over
``h in H_0^{(N+1)}`` takes the value ``sum_n beta_n q_m**n`` on the coset of
node ``m``, where ``q_m = exp(-2 pi i rev(m) / p**H)`` and ``rev`` reverses
the ``H`` base-p digits of ``m``.  The coefficient index is
``n = a_{-N-1} + a_{-N} p + ... + a_{-1} p**N`` for
``h = a_{-1} g_{-1} + ... + a_{-N-1} g_{-N-1}``.

Row 0 (value 1) together with one row per zero node gives a square
Vandermonde system on distinct unit-circle nodes.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleTreeError, InternalContradictionError
from .qp import GroupElement, GroupParams, dilate_element
from .steps import StepFunctionFreq, StepFunctionTime, digit_reverse, inverse_fourier
from .tree import Feasibility, MaskTree, classify, pad, phi_hat_tree, zero_shadow

__all__ = [
    "MaskSpec",
    "q_exponent",
    "q_node",
    "q_nodes",
    "beta_element",
    "beta_index",
    "vandermonde",
    "evaluate_mask",
    "solve_mask",
    "mask_on_window",
    "assemble_phi_hat",
    "assemble_phi",
    "refinement_residual",
    "frequency_refinement_residual",
    "support_propagation",
    "SYSTEM_TOL",
    "NONZERO_TOL",
]

SYSTEM_TOL = 1e-10
NONZERO_TOL = 1e-9


def q_exponent(params: GroupParams, m: int) -> int:
    """``rev_H(m)``, so that ``q_m = exp(-2 pi i q_exponent / p**H)``."""
    H = params.height
    if not 0 <= m < params.p**H:
        raise ValueError(f"node {m} outside [0, {params.p ** H})")
    return int(digit_reverse(params.p, H)[m])


def q_node(params: GroupParams, m: int) -> complex:
    k, P = q_exponent(params, m), params.p**params.height
    return cmath.exp(-2j * math.pi * k / P) if k else 1 + 0j


def q_nodes(params: GroupParams) -> np.ndarray:
    P = params.p**params.height
    return np.exp(-2j * np.pi * digit_reverse(params.p, params.height) / P)


def beta_element(params: GroupParams, n: int) -> GroupElement:
    """The shift ``h in H_0^{(N+1)}`` carried by coefficient ``beta_n``."""
    p, N = params.p, params.N
    digits = {}
    for i in range(N + 1):
        n, digits[i - N - 1] = divmod(n, p)
    if n:
        raise ValueError("coefficient index out of range")
    return GroupElement.from_digits(p, digits)


def beta_index(params: GroupParams, h: GroupElement) -> int:
    p, N = params.p, params.N
    n = 0
    for idx, d in h.digits:
        if not -N - 1 <= idx <= -1:
            raise ValueError(f"{h} is not in H_0^({N + 1})")
        n += d * p ** (idx + N + 1)
    return n


def _phase_matrix(p: int, K: int, rows: np.ndarray, ncoef: int) -> np.ndarray:
    P = p**K
    rev = digit_reverse(p, K)[rows]
    expo = np.outer(rev, np.arange(ncoef, dtype=np.int64)) % P
    return np.exp(-2j * np.pi * expo / P)


_TWO_PI = 2 * np.longdouble("3.14159265358979323846264338327950288")


def _evaluate(p: int, K: int, rows: np.ndarray, beta: np.ndarray) -> np.ndarray:
    """``sum_n beta_n q**n`` per row, accumulated in extended precision.

    Node values are multiplied along tree paths, so rounding in the plain
    complex128 sum grows with the size of ``phi_hat``.
    """
    P = p**K
    rev = digit_reverse(p, K)[rows]
    expo = np.outer(rev, np.arange(beta.size, dtype=np.int64)) % P
    theta = _TWO_PI * expo.astype(np.longdouble) / P
    c, s = np.cos(theta), np.sin(theta)
    br = beta.real.astype(np.longdouble)
    bi = beta.imag.astype(np.longdouble)
    # (c - i s)(br + i bi)
    re = c @ br + s @ bi
    im = c @ bi - s @ br
    return re.astype(np.float64) + 1j * im.astype(np.float64)


def _residual_ld(p: int, K: int, rows, beta, rhs) -> np.ndarray:
    return _evaluate(p, K, np.asarray(rows, dtype=np.int64), beta) - rhs


def evaluate_mask(params: GroupParams, rows, beta: np.ndarray) -> np.ndarray:
    """Mask values on the given tree nodes from the coefficients."""
    return _evaluate(params.p, params.height, np.asarray(rows, dtype=np.int64), np.asarray(beta, dtype=complex))


def vandermonde(params: GroupParams, rows) -> np.ndarray:
    """Rows ``[q_m**0, ..., q_m**(p**(N+1)-1)]`` for the given node indices."""
    rows = np.asarray(rows, dtype=np.int64)
    return _phase_matrix(params.p, params.height, rows, params.p ** (params.N + 1))


@dataclass(frozen=True, eq=False)
class MaskSpec:
    """A solved mask: padded tree (with node values), coefficients and node values."""

    params: GroupParams
    tree: MaskTree
    beta: np.ndarray
    lam: np.ndarray
    residual: float

    @property
    def zeros(self) -> frozenset[int]:
        return self.tree.zeros

    def min_nonzero(self) -> float:
        free = np.ones(self.lam.size, dtype=bool)
        free[sorted(self.zeros)] = False
        return float(np.abs(self.lam[free]).min())

    def max_abs(self) -> float:
        return float(np.abs(self.lam).max())


def solve_mask(t: MaskTree, padding=None) -> MaskSpec:
    """Solve for ``beta`` and every node value.

    Trees with too few zeros are padded first (``padding`` overrides the
    default choice of nodes).  Raises :class:`InfeasibleTreeError` when the
    zero set is too large.
    """
    c = classify(t)
    if c.kind is Feasibility.INFEASIBLE:
        raise InfeasibleTreeError(
            f"{len(t.zeros)} zeros >= p^(N+1) = {t.p ** (t.params.N + 1)}: "
            "the Vandermonde system on any p^(N+1) zero rows forces beta = 0, hence lambda_0 = 0"
        )
    if c.kind is Feasibility.NEEDS_PADDING:
        t = pad(t, padding)
    params = t.params
    rows = [0] + sorted(t.zeros)
    V = vandermonde(params, rows)
    rhs = np.zeros(len(rows), dtype=complex)
    rhs[0] = 1
    beta = np.linalg.solve(V, rhs)
    # one step of iterative refinement against an extended-precision residual
    beta = beta - np.linalg.solve(V, _residual_ld(params.p, params.height, rows, beta, rhs))
    lam = _evaluate(params.p, params.height, np.arange(t.size, dtype=np.int64), beta)
    residual = float(np.max(np.abs(_residual_ld(params.p, params.height, rows, beta, rhs))))
    if residual > SYSTEM_TOL:
        raise InternalContradictionError(f"Vandermonde solve residual {residual:.3e} exceeds {SYSTEM_TOL}")
    zero_rows = sorted(t.zeros)
    lam[zero_rows] = 0
    lam[0] = 1
    free = np.ones(t.size, dtype=bool)
    free[zero_rows] = False
    tol = NONZERO_TOL * float(np.abs(lam).max())
    small = np.flatnonzero(free & (np.abs(lam) <= tol))
    if small.size:
        raise InternalContradictionError(
            f"nodes {small.tolist()} outside the zero set evaluated below {tol:.3e}; "
            "this signals numerical trouble in the solve"
        )
    for m, v in t.expected:
        if abs(lam[m] - v) > tol:
            raise ValueError(f"node {m} solved to {lam[m]:.6g}, expected {v:.6g}")
    solved = MaskTree(params, t.zeros, lam, t.history, t.expected)
    return MaskSpec(params, solved, beta, lam, residual)


def mask_on_window(spec: MaskSpec, support: int) -> StepFunctionFreq:
    """``m_0`` from its coefficients, on cosets of ``G_{-N}^perp`` inside ``G_support^perp``."""
    p, N = spec.params.p, spec.params.N
    K = support + N
    rows = np.arange(p**K, dtype=np.int64)
    vals = _evaluate(p, K, rows, spec.beta)
    return StepFunctionFreq(p, -N, support, vals)


def assemble_phi_hat(spec: MaskSpec) -> StepFunctionFreq:
    """``phi_hat`` on cosets of ``G_{-N}^perp`` inside ``G_M^perp``."""
    params = spec.params
    vals = phi_hat_tree(spec.tree)
    inner = params.p ** (params.M + params.N)
    if np.any(vals[inner:]):
        raise InternalContradictionError("phi_hat does not vanish on the top annulus")
    return StepFunctionFreq(params.p, -params.N, params.M, vals[:inner])


def assemble_phi(spec: MaskSpec) -> StepFunctionTime:
    """The refinable function: supported on ``G_{-N}``, constant on ``G_M``-cosets."""
    return inverse_fourier(assemble_phi_hat(spec))


def refinement_residual(spec: MaskSpec, phi: StepFunctionTime | None = None) -> float:
    """``max |phi(x) - p sum_h beta_h phi(A x - h)|`` over ``G_{M+1}``-cosets of ``G_{-N-1}``."""
    params = spec.params
    p, N, M = params.p, params.N, params.M
    if phi is None:
        phi = assemble_phi(spec)
    level, support = M + 1, -N - 1
    lhs = phi.window(level, support)
    scaled = phi.dilate(1).window(level, support)
    rhs = np.zeros(lhs.size, dtype=complex)
    for n, b in enumerate(spec.beta):
        shift = dilate_element(beta_element(params, n), -1)
        rhs += b * scaled.translate(shift).values
    return float(np.max(np.abs(lhs.values - p * rhs)))


def frequency_refinement_residual(spec: MaskSpec) -> float:
    """``max |phi_hat(chi) - m_0(chi) phi_hat(chi A^-1)|`` over ``G_{M+1}^perp``."""
    params = spec.params
    level, support = -params.N, params.M + 1
    phi_hat = assemble_phi_hat(spec).window(level, support)
    shifted = assemble_phi_hat(spec).dilate(1).window(level, support)
    m0 = mask_on_window(spec, support)
    return float(np.max(np.abs(phi_hat.values - m0.values * shifted.values)))


def support_propagation(spec: MaskSpec) -> dict:
    """Evaluate ``m_0 phi_hat(. A^-1)`` one annulus past the tree.

    Returns the largest value on ``G_{M+2}^perp \\ G_{M+1}^perp``, whether the
    vanishing is structural (every leaf path holds a zero, so ``phi_hat`` is
    supported in ``G_M^perp``), and the mask's own size there for contrast.
    """
    params = spec.params
    p, N, M = params.p, params.N, params.M
    support = M + 2
    m0 = mask_on_window(spec, support)
    shifted = assemble_phi_hat(spec).dilate(1).window(-N, support)
    product = m0.values * shifted.values
    inner = p ** (M + 1 + N)
    leaves = zero_shadow(spec.tree)[p ** (params.height - 1):]
    return {
        "max_abs": float(np.abs(product[inner:]).max()),
        "structural": bool(leaves.all()) and assemble_phi_hat(spec).dilate(1).support <= M + 1,
        "mask_max_abs": float(np.abs(m0.values[inner:]).max()),
    }
