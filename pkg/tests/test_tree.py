import numpy as np
import pytest

from padic_frames.errors import InvalidTreeError, TransformError, UnsolvedTreeError
from padic_frames.qp import CharacterWord, DualCoset, GroupParams, dilate_character
from padic_frames.solver import solve_mask
from padic_frames.tree import (
    Feasibility,
    MaskTree,
    apply_transforms,
    classify,
    coset_node,
    initial_tree,
    node_coset,
    node_level,
    pad,
    padding_candidates,
    phi_hat_tree,
    shift_tree,
    transform_i,
    transform_ii,
    tree_from_literal,
    zero_shadow,
)

P31 = GroupParams(3, 1, 1)


def leaves_covered(t: MaskTree) -> bool:
    """Independent path scan from every leaf to the root."""
    for leaf in range(t.p ** (t.height - 1), t.size):
        m, hit = leaf, False
        while True:
            hit |= m in t.zeros
            if m == 0:
                break
            m //= t.p
        if not hit:
            return False
    return True


def test_initial_trees():
    assert initial_tree(P31).zeros == {3, 4, 5, 6, 7, 24, 25, 26}
    assert initial_tree(GroupParams(2, 1, 1)).zeros == {2, 6, 7}
    for p in (2, 3, 5):
        for N in (1, 2):
            t = initial_tree(GroupParams(p, N, N))
            assert len(t.zeros) == p ** (N + 1) - 1
            assert leaves_covered(t) and t.is_valid
            assert classify(t).kind is Feasibility.DETERMINES
    with pytest.raises(ValueError):
        initial_tree(GroupParams(3, 1, 2))


def test_node_coset_bijection_and_levels():
    p, N, M = 3, 1, 1
    params = GroupParams(p, N, M)
    seen = set()
    for m in range(p**params.height):
        c = node_coset(params, m)
        assert c.level == -N
        assert coset_node(params, c) == m
        seen.add(c)
    assert len(seen) == p**params.height
    counts = np.bincount([node_level(m, p) for m in range(p**params.height)])
    assert counts[0] == 1
    assert all(counts[s] == p**s - p ** (s - 1) for s in range(1, params.height + 1))
    assert node_coset(params, 5) == DualCoset(-1, CharacterWord.from_exponents(3, {-1: 2, 0: 1}))


def test_transform_i_example_and_counts():
    t = transform_i(initial_tree(P31), 0)
    assert t.zeros == {1, 6, 7, 24, 25, 26}
    assert len(t.zeros) == 8 - 2
    assert t.is_valid and leaves_covered(t)
    assert t.history == ("initial", "i:0")


def test_transform_ii_example_and_inverse():
    t0 = initial_tree(P31)
    t = transform_ii(t0, 0)
    assert t.zeros == {4, 5, 6, 7, 9, 10, 11, 24, 25, 26}
    assert len(t.zeros) == len(t0.zeros) + 2
    assert t.is_valid
    # transform_i on node 3 = p**(N-1) + 2 undoes it
    back = transform_i(t, 2)
    assert back.zeros == t0.zeros


def test_transform_errors():
    t0 = initial_tree(P31)
    with pytest.raises(TransformError):
        transform_i(t0, 9)
    with pytest.raises(TransformError):
        transform_i(t0, 1)  # node 2 has children 6, 7, 8 and 8 is not zero
    with pytest.raises(TransformError):
        transform_ii(t0, 100)
    with pytest.raises(TransformError):
        transform_ii(transform_i(t0, 0), 0)
    with pytest.raises(TransformError):
        apply_transforms(t0, [("iii", 0)])


def test_random_transform_sequences_preserve_validity():
    rng = np.random.default_rng(0)
    for p, N in [(2, 1), (3, 1), (2, 2), (3, 2)]:
        t = initial_tree(GroupParams(p, N, N))
        for _ in range(40):
            kind = "i" if rng.random() < 0.5 else "ii"
            base = p ** (N - 1) if kind == "i" else p**N
            arg = int(rng.integers(-base + 1, p ** (2 * N) - base))
            try:
                new = apply_transforms(t, [(kind, arg)])
            except TransformError:
                continue
            assert new.is_valid and leaves_covered(new)
            t = new


def test_classify_trichotomy_and_invalid():
    t0 = initial_tree(P31)
    extra = t0.with_zeros(t0.zeros | {8}, "extra")
    assert classify(extra).kind is Feasibility.INFEASIBLE
    with pytest.raises(InvalidTreeError):
        classify(t0.with_zeros(t0.zeros - {24}, "drop"))
    fewer = transform_i(t0, 0)
    c = classify(fewer)
    assert c.kind is Feasibility.NEEDS_PADDING and c.deficit == 2
    assert classify(pad(fewer)).kind is Feasibility.DETERMINES


def test_padding_prefers_shadowed_nodes():
    t = transform_i(initial_tree(P31), 0)
    assert padding_candidates(t)[:3] == [3, 4, 5]
    padded = pad(t)
    assert padded.zeros == {1, 3, 4, 6, 7, 24, 25, 26}
    assert np.array_equal(zero_shadow(padded), zero_shadow(t))
    explicit = pad(t, [8, 9])
    assert explicit.zeros == t.zeros | {8, 9}
    with pytest.raises(ValueError):
        pad(t, [3])


def test_phi_hat_tree_and_shift():
    spec = solve_mask(initial_tree(P31))
    phi = phi_hat_tree(spec.tree)
    assert phi[0] == 1
    lam = spec.tree.values
    for m in range(1, phi.size):
        assert phi[m] == lam[m] * phi[m // 3]
    assert np.all(phi[9:] == 0)
    shifted = shift_tree(phi, 3)
    assert np.all(shifted[:3] == 1)
    assert np.all(shifted[9:] == phi[np.arange(9, 27) // 3])
    with pytest.raises(UnsolvedTreeError):
        phi_hat_tree(initial_tree(P31))


def test_shift_tree_matches_dilated_evaluation():
    params = GroupParams(3, 1, 1)
    phi = phi_hat_tree(solve_mask(transform_i(initial_tree(params), 0)).tree)
    shifted = shift_tree(phi, 3)
    for m in range(27):
        w = node_coset(params, m).rep
        parent = dilate_character(w, -1)
        # the exponent falling below -N is absorbed by the level -N coset
        parent = DualCoset(-1, parent)
        assert shifted[m] == phi[coset_node(params, parent)]


def test_tree_from_literal():
    t = tree_from_literal(P31, [(3, "0"), (4, "zero"), (5, 0), (8, "free"), (2, [0.5, 0.25])])
    assert t.zeros == {3, 4, 5}
    assert t.expected == ((2, 0.5 + 0.25j),)
    with pytest.raises(ValueError):
        tree_from_literal(P31, [(3, "0"), (3, [1, 0])])
