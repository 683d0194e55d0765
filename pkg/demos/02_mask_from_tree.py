"""From a tree of zero placements to a refinable step function.

Run with ``python demos/02_mask_from_tree.py``.
"""

import numpy as np

from padic_frames import (
    GroupParams,
    apply_transforms,
    assemble_phi,
    assemble_phi_hat,
    classify,
    initial_tree,
    refinement_residual,
    solve_mask,
)

params = GroupParams(p=3, N=1, M=1)

tree = initial_tree(params)
print("initial zeros:", sorted(tree.zeros), "->", classify(tree).kind.value)

# transform (i) moves zeros up a level; the tree then has room for padding
moved = apply_transforms(tree, [("i", 0)])
print("after i:0:", sorted(moved.zeros), "->", classify(moved))

spec = solve_mask(moved)
print("padded zeros:", sorted(spec.zeros))
print("beta =", np.round(spec.beta, 4))
print("solve residual:", spec.residual)

lam = spec.lam
free = np.setdiff1d(np.arange(lam.size), sorted(spec.zeros))
print("smallest |lambda| off the zero set:", np.abs(lam[free]).min())

# phi_hat is the product of node values along each root path
phi_hat = assemble_phi_hat(spec)
print("phi_hat on G_1^perp cells:", np.round(np.abs(phi_hat.values), 3))

phi = assemble_phi(spec)
print("phi lives on", phi, " integral =", np.round(phi.integral(), 12))
print("refinement equation residual:", refinement_residual(spec))
