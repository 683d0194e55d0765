"""A tour of the group arithmetic that everything else sits on.

Run with ``python demos/01_digits_and_characters.py``.
"""

import numpy as np

from padic_frames import (
    CharacterWord,
    GroupElement,
    StepFunctionTime,
    TimeCoset,
    add,
    dilate_element,
    enumerate_H0,
    fourier,
    inverse_fourier,
    monna,
    pair,
    subtract,
)

p = 3

# elements are finite digit words sum a_n g_n; addition carries upward
x = GroupElement.from_digits(p, {-1: 2, 0: 1})
y = GroupElement.from_digits(p, {-1: 2, 0: 2})
print("x =", x.as_dict(), " y =", y.as_dict())
print("x + y =", add(x, y).as_dict())  # 2+2 at index -1 carries into index 0, then again into 1
print("x - y, digits below index 3:", subtract(x, y, floor=3).as_dict())

# the dilation shifts digits down one place and scales the measure by p
print("A x =", dilate_element(x, 1).as_dict())

# H_0 is the translation set; its Monna values run through 0, 1, 2, ...
print("Monna values of H_0^(2):", [int(monna(h)) for h in enumerate_H0(p, 2)])

# characters are Rademacher words; (r_j, g_n) is a p^(j-n+1)-th root of unity
r = CharacterWord.rademacher(p, 0)
for n in (0, -1, -2):
    g = GroupElement.basis(p, n)
    print(f"(r_0, g_{n}) =", np.round(pair(r, g), 6))

# step functions: an indicator of G_0 + g_{-1} and its transform
f = StepFunctionTime.indicator(TimeCoset(0, GroupElement.basis(p, -1)))
F = fourier(f)
print("f_hat lives on", F, "with values", np.round(F.values, 4))
print("round trip error:", inverse_fourier(F).max_abs_diff(f))
