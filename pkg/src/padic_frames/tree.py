"""The p-adic mask tree.

Node ``m`` of a tree with height ``H = M + N + 1`` holds the mask value on
the dual coset ``G_{-N}^perp r_{-N}^{d_0} r_{-N+1}^{d_1} ...`` where
``d_i`` are the base-p digits of ``m``.  The parent of ``m`` is ``m // p``,
node ``m`` sits at level ``s`` = number of base-p digits of ``m``, and the
leaves (level ``H``) cover the annulus ``G_{M+1}^perp \\ G_M^perp``.

Because the node index equals the coset's position in a
:class:`~padic_frames.steps.StepFunctionFreq` window ``(level=-N,
support=M+1)``, a tree of node values is directly a step function.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidTreeError, TransformError, UnsolvedTreeError
from .qp import CharacterWord, DualCoset, GroupParams

__all__ = [
    "MaskTree",
    "Feasibility",
    "Classification",
    "node_level",
    "node_coset",
    "coset_node",
    "initial_tree",
    "transform_i",
    "transform_ii",
    "apply_transforms",
    "classify",
    "pad",
    "padding_candidates",
    "zero_shadow",
    "phi_hat_tree",
    "shift_tree",
    "shifted_zero_shadow",
    "tree_from_literal",
]


def node_level(m: int, p: int) -> int:
    s = 0
    while m:
        m //= p
        s += 1
    return s


def node_coset(params: GroupParams, m: int) -> DualCoset:
    """Dual coset of level ``-N`` encoded by node ``m``."""
    p, N = params.p, params.N
    exps = {}
    i = 0
    while m:
        m, exps[-N + i] = divmod(m, p)
        i += 1
    return DualCoset(-N, CharacterWord.from_exponents(p, exps))


def coset_node(params: GroupParams, coset: DualCoset) -> int:
    p, N = params.p, params.N
    if coset.level != -N:
        raise ValueError(f"node cosets have level {-N}, got {coset.level}")
    m = 0
    for j, e in coset.rep.exponents:
        if j > params.M:
            raise ValueError(f"coset {coset} lies outside G_{params.M + 1}^perp")
        m += e * p ** (j + N)
    return m


@dataclass(frozen=True, eq=False)
class MaskTree:
    """Tree structure (zero set) plus, once solved, concrete node values.

    Nodes not in ``zeros`` are symbolic-nonzero until ``values`` is set.
    ``history`` records the operations that produced the tree; ``expected``
    holds user-prescribed node values that the solved mask must reproduce.
    """

    params: GroupParams
    zeros: frozenset[int]
    values: np.ndarray | None = None
    history: tuple[str, ...] = field(default=())
    expected: tuple[tuple[int, complex], ...] = field(default=())

    def __post_init__(self):
        zeros = frozenset(int(m) for m in self.zeros)
        bad = [m for m in zeros if not 0 < m < self.size]
        if bad:
            raise ValueError(f"zero indices out of range (0, {self.size}): {sorted(bad)}")
        object.__setattr__(self, "zeros", zeros)
        if self.values is not None:
            vals = np.array(self.values, dtype=complex)
            if vals.shape != (self.size,):
                raise ValueError(f"expected {self.size} node values")
            vals.setflags(write=False)
            object.__setattr__(self, "values", vals)

    @property
    def p(self) -> int:
        return self.params.p

    @property
    def height(self) -> int:
        return self.params.height

    @property
    def size(self) -> int:
        return self.p**self.height

    @property
    def solved(self) -> bool:
        return self.values is not None

    def level_range(self, s: int) -> range:
        """Node indices on level ``s``."""
        if s == 0:
            return range(0, 1)
        return range(self.p ** (s - 1), self.p**s)

    def children(self, m: int) -> range:
        return range(m * self.p, m * self.p + self.p)

    def is_leaf(self, m: int) -> bool:
        return m >= self.p ** (self.height - 1)

    @property
    def is_valid(self) -> bool:
        """Every root-to-leaf path carries a zero."""
        return bool(zero_shadow(self)[self.p ** (self.height - 1):].all())

    def with_zeros(self, zeros: Iterable[int], note: str) -> MaskTree:
        return MaskTree(self.params, frozenset(zeros), None, self.history + (note,), self.expected)

    def state(self, m: int) -> str:
        if m in self.zeros:
            return "zero"
        return "solved" if self.solved else "free"


def zero_shadow(t: MaskTree) -> np.ndarray:
    """``out[m]`` is True when ``m`` or one of its ancestors is a zero node."""
    out = np.zeros(t.size, dtype=bool)
    out[sorted(t.zeros)] = True
    for m in range(1, t.size):
        out[m] |= out[m // t.p]
    return out


def initial_tree(params: GroupParams) -> MaskTree:
    """Starting tree: zeros on all of level ``N+1`` but its last node, and on that node's last ``p**N`` leaves."""
    if params.M != params.N:
        raise ValueError(f"the initial tree needs M == N, got M={params.M}, N={params.N}")
    p, N = params.p, params.N
    first = range(p**N, p ** (N + 1) - 1)
    top = p ** (2 * N + 1)
    second = range(top - p**N, top)
    return MaskTree(params, frozenset(first) | frozenset(second), history=("initial",))


def transform_i(t: MaskTree, j: int) -> MaskTree:
    """Move a zero up: node ``p**(N-1) + j`` becomes zero, its (all-zero) children become nonzero."""
    p, N = t.p, t.params.N
    node = p ** (N - 1) + j
    if not 0 < node < p ** (t.height - 1):
        raise TransformError(f"transform i:{j} targets node {node}, which has no children", node)
    if node in t.zeros:
        raise TransformError(f"transform i:{j}: node {node} is already zero", node)
    kids = t.children(node)
    nonzero = [c for c in kids if c not in t.zeros]
    if nonzero:
        raise TransformError(f"transform i:{j}: children {nonzero} of node {node} are not zero", nonzero[0])
    return t.with_zeros((t.zeros - set(kids)) | {node}, f"i:{j}")


def transform_ii(t: MaskTree, l: int) -> MaskTree:
    """Move a zero down: node ``p**N + l`` becomes nonzero, its children become zero."""
    p, N = t.p, t.params.N
    node = p**N + l
    if not 0 < node < p ** (t.height - 1):
        raise TransformError(f"transform ii:{l} targets node {node}, which has no children", node)
    if node not in t.zeros:
        raise TransformError(f"transform ii:{l}: node {node} is not zero", node)
    kids = t.children(node)
    zero_kids = [c for c in kids if c in t.zeros]
    if zero_kids:
        raise TransformError(f"transform ii:{l}: children {zero_kids} of node {node} are already zero", zero_kids[0])
    return t.with_zeros((t.zeros - {node}) | set(kids), f"ii:{l}")


def apply_transforms(t: MaskTree, transforms: Sequence[tuple[str, int]]) -> MaskTree:
    for kind, arg in transforms:
        if kind == "i":
            t = transform_i(t, arg)
        elif kind == "ii":
            t = transform_ii(t, arg)
        else:
            raise TransformError(f"unknown transform kind {kind!r}")
    return t


class Feasibility(enum.Enum):
    DETERMINES = "determines"
    NEEDS_PADDING = "determines-after-padding"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class Classification:
    kind: Feasibility
    deficit: int = 0


def classify(t: MaskTree) -> Classification:
    if not t.is_valid:
        uncovered = np.flatnonzero(~zero_shadow(t))
        leaf = int(uncovered[uncovered >= t.p ** (t.height - 1)][0])
        raise InvalidTreeError(
            f"path from leaf {leaf} to the root has no zero; "
            f"the scaling function would not vanish on G_{t.params.M + 1}^perp minus G_{t.params.M}^perp"
        )
    target = t.p ** (t.params.N + 1) - 1
    count = len(t.zeros)
    if count == target:
        return Classification(Feasibility.DETERMINES)
    if count < target:
        return Classification(Feasibility.NEEDS_PADDING, target - count)
    return Classification(Feasibility.INFEASIBLE)


def padding_candidates(t: MaskTree) -> list[int]:
    """Nonzero non-root nodes in padding order.

    Nodes already shadowed by a zero ancestor come first (zeroing them leaves
    the scaling function's zero pattern unchanged), then the rest; each group
    by ascending index.
    """
    shadow = zero_shadow(t)
    free = [m for m in range(1, t.size) if m not in t.zeros]
    return [m for m in free if shadow[m]] + [m for m in free if not shadow[m]]


def pad(t: MaskTree, indices: Sequence[int] | None = None) -> MaskTree:
    """Add zeros until the tree has exactly ``p**(N+1) - 1`` of them."""
    c = classify(t)
    if c.kind is not Feasibility.NEEDS_PADDING:
        return t
    if indices is None:
        indices = padding_candidates(t)[: c.deficit]
    indices = [int(m) for m in indices]
    if len(indices) != c.deficit or len(set(indices)) != c.deficit:
        raise ValueError(f"padding needs {c.deficit} distinct nodes, got {indices}")
    clash = [m for m in indices if m in t.zeros or not 0 < m < t.size]
    if clash:
        raise ValueError(f"padding nodes {clash} are already zero or out of range")
    return t.with_zeros(t.zeros | set(indices), "pad:" + ",".join(map(str, indices)))


def phi_hat_tree(t: MaskTree) -> np.ndarray:
    """Products of node values along each path to the root."""
    if not t.solved:
        raise UnsolvedTreeError("tree has symbolic nodes; solve the mask first")
    out = np.array(t.values, dtype=complex)
    for m in range(1, t.size):
        out[m] *= out[m // t.p]
    return out


def shift_tree(phi_hat: np.ndarray, p: int) -> np.ndarray:
    """Values of ``chi -> phi_hat(chi A**-1)``: each node takes its parent's value."""
    phi_hat = np.asarray(phi_hat)
    out = phi_hat[np.arange(phi_hat.size) // p].copy()
    out[0] = 1
    return out


def shifted_zero_shadow(t: MaskTree) -> np.ndarray:
    """Structural zeros of the shifted tree."""
    shadow = zero_shadow(t)
    return shadow[np.arange(t.size) // t.p]


def tree_from_literal(params: GroupParams, entries: Iterable) -> MaskTree:
    """Tree from ``[(index, "0" | "free" | [re, im]), ...]``.

    Unlisted nodes are symbolic-nonzero.  Complex entries are recorded as
    checks on the solved value (see :func:`padic_frames.solver.solve_mask`),
    not as extra constraints.
    """
    zeros, prescribed = set(), {}
    for idx, val in entries:
        idx = int(idx)
        if val in ("0", "zero", 0):
            zeros.add(idx)
        elif val == "free":
            continue
        else:
            re, im = val
            prescribed[idx] = complex(re, im)
    clash = sorted(zeros & prescribed.keys())
    if clash:
        raise ValueError(f"nodes {clash} are both zero and prescribed")
    return MaskTree(params, frozenset(zeros), history=("literal",), expected=tuple(sorted(prescribed.items())))
