"""The p = 3, M = N = 1 example: wavelets, their tiling and a Parseval check.

Run with ``python demos/03_tight_frame_example.py``.
"""

import numpy as np

from padic_frames import GroupParams, check_theorem31, construct_frame, parseval, random_test_function
from padic_frames.render import render_ascii

params = GroupParams(3, 1, 1)
fs = construct_frame(params, [("i", 0), ("ii", 4)])

print(render_ascii(fs, "phi-hat"))
print(render_ascii(fs, "phi-hat-shifted"))

print(f"branch {fs.branch}, n = {fs.n}, J-sets {fs.partition}")
for j, w in enumerate(fs.wavelets, 1):
    print(f"psi{j}: psi_hat = 1 on {w.E}, dilated by A^{w.t} onto {w.target}")

report = check_theorem31(fs)
print("tiling hypotheses hold:", report.passed, report.checks["measure"], "=", report.checks["annulus_measure"])

# splitting j = 2 into three finer pieces gives a second valid frame
split = construct_frame(params, [("i", 0), ("ii", 4)], split=[2])
print("with j = 2 split:", [str(w.E) for w in split.wavelets], check_theorem31(split).passed)

rng = np.random.default_rng(0)
residuals = [parseval(random_test_function(params, rng), fs).residual for _ in range(20)]
print(f"Parseval: max relative residual over 20 random f = {max(residuals):.2e}")
