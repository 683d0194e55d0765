from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from padic_frames.qp import (
    CharacterWord,
    DualCoset,
    GroupElement,
    TimeCoset,
    dilate_element,
    enumerate_H0,
    subtract,
)
from padic_frames.steps import (
    StepFunctionFreq,
    StepFunctionTime,
    coset_gram,
    fourier,
    inner_product,
    inner_product_freq,
    integral_of_product,
    inverse_fourier,
    pointwise_product,
    refine,
)

import oracles


def random_time(rng, p, level, support):
    size = p ** (level - support)
    return StepFunctionTime(p, level, support, rng.standard_normal(size) + 1j * rng.standard_normal(size))


def random_freq(rng, p, level, support):
    size = p ** (support - level)
    return StepFunctionFreq(p, level, support, rng.standard_normal(size) + 1j * rng.standard_normal(size))


def random_window(rng):
    p = int(rng.choice([2, 3, 5]))
    depth = {2: 6, 3: 4, 5: 3}[p]
    support = int(rng.integers(-3, 2))
    level = support + int(rng.integers(1, depth + 1))
    return p, level, support


def test_indicator_transforms():
    for p in (2, 3):
        one = StepFunctionTime.indicator(TimeCoset(0, GroupElement(p)))
        assert fourier(one).canonical().max_abs_diff(StepFunctionFreq.indicator(DualCoset(0, CharacterWord(p)))) < 1e-15
        for n in (-2, -1, 1, 2):
            f = StepFunctionTime.indicator(TimeCoset(n, GroupElement(p)))
            F = fourier(f)
            want = StepFunctionFreq.indicator(DualCoset(n, CharacterWord(p))) * float(Fraction(p) ** -n)
            assert F.max_abs_diff(want) < 1e-14
            back = inverse_fourier(StepFunctionFreq.indicator(DualCoset(n, CharacterWord(p))))
            assert back.max_abs_diff(StepFunctionTime.indicator(TimeCoset(n, GroupElement(p))) * float(p) ** n) < 1e-12


def test_shifted_indicator_transform():
    # 1_{G_0 + g_{-1}} transforms to conj((chi, g_{-1})) on G_0^perp
    f = StepFunctionTime.indicator(TimeCoset(0, GroupElement.basis(2, -1)))
    F = fourier(f)
    assert (F.level, F.support) == (-1, 0)
    assert F(CharacterWord(2)) == pytest.approx(1)
    assert F(CharacterWord.rademacher(2, -1)) == pytest.approx(-1)


@pytest.mark.parametrize("seed", range(6))
def test_fourier_matches_direct_coset_sum(seed):
    rng = np.random.default_rng(seed)
    p, level, support = random_window(rng)
    f = random_time(rng, p, level, support)
    F = fourier(f)
    cells = [(f.coset_at(k).rep.as_dict(), complex(v)) for k, v in enumerate(f.values)]
    for k in rng.choice(F.size, size=min(F.size, 12), replace=False):
        chi = F.coset_at(int(k)).rep.as_dict()
        assert abs(F.values[k] - oracles.fourier_direct(cells, level, p, chi)) < 1e-12 * max(1, np.abs(F.values).max())


def test_inverse_fourier_matches_closed_form():
    p = 3
    w = CharacterWord.from_exponents(p, {-1: 2, 0: 1})
    E = DualCoset(-1, w)
    f = inverse_fourier(StepFunctionFreq.indicator(E))
    for k in range(f.size):
        x = f.coset_at(k).rep
        want = float(Fraction(p) ** -1) * oracles.pair(w.as_dict(), x.as_dict(), p)
        assert abs(f.values[k] - want) < 1e-12


def test_round_trip_and_plancherel_on_100_functions():
    rng = np.random.default_rng(7)
    worst_trip = worst_plan = 0.0
    for _ in range(100):
        p, level, support = random_window(rng)
        f = random_time(rng, p, level, support)
        g = random_time(rng, p, level, support)
        worst_trip = max(worst_trip, inverse_fourier(fourier(f)).max_abs_diff(f))
        a, b = inner_product(f, g), inner_product_freq(fourier(f), fourier(g))
        worst_plan = max(worst_plan, abs(a - b) / max(abs(a), 1e-300))
    assert worst_trip <= 1e-12
    assert worst_plan <= 1e-10


def test_inner_product_examples():
    one = StepFunctionTime.indicator(TimeCoset(-1, GroupElement(3)))
    assert inner_product(one, one) == pytest.approx(3)
    a = StepFunctionTime.indicator(TimeCoset(0, GroupElement(2)))
    b = StepFunctionTime.indicator(TimeCoset(0, GroupElement.basis(2, -1)))
    assert inner_product(a, b) == 0


def test_refine_and_products():
    F = StepFunctionFreq.indicator(DualCoset(0, CharacterWord(2)))
    assert refine(F, 0) is not None and refine(F, 0).max_abs_diff(F) == 0
    R = refine(F, -1)
    assert R.size == 2 and np.all(R.values == 1)
    assert R.integral() == F.integral()
    with pytest.raises(ValueError):
        refine(F, 1)
    rng = np.random.default_rng(1)
    A, B, C = (random_freq(rng, 3, lv, 1) for lv in (-1, -2, 0))
    assert pointwise_product(A, B).max_abs_diff(pointwise_product(B, A)) < 1e-12
    assert pointwise_product(pointwise_product(A, B), C).max_abs_diff(
        pointwise_product(A, pointwise_product(B, C))
    ) < 1e-12
    support = StepFunctionFreq(3, -1, 1, (np.abs(A.values) > 0).astype(float))
    assert pointwise_product(A, support).max_abs_diff(A) == 0
    assert np.all(pointwise_product(A, A * 0).values == 0)


def test_integral_of_product_matches_dense():
    rng = np.random.default_rng(3)
    for la, sa, lb, sb in [(-2, 1, 0, 2), (-1, 3, -3, 0), (0, 1, -2, -1), (1, 2, -2, 0)]:
        A, B = random_freq(rng, 2, la, sa), random_freq(rng, 2, lb, sb)
        dense = pointwise_product(A, B).integral()
        assert abs(integral_of_product(A, B) - dense) < 1e-12


def test_translate_and_dilate_semantics():
    rng = np.random.default_rng(2)
    f = random_time(rng, 3, 1, -2)
    h = GroupElement.from_digits(3, {-2: 2, -1: 1})
    g = f.translate(h)
    x = GroupElement.from_digits(3, {-1: 2, 0: 1})
    assert g(x) == f(subtract(x, h, 1))
    assert f.dilate(1)(x) == f(dilate_element(x, 1))


def _gram_oracle(coset_level, word, elements, p, scale):
    """Cell-by-cell sum with the rational pairing."""
    lows = [min(h) for h in elements if h]
    L = min([coset_level] + lows)
    total = np.zeros((len(elements), len(elements)), dtype=complex)
    for digits in product(range(p), repeat=coset_level - L):
        chi = dict(word)
        for i, d in enumerate(digits):
            if d:
                chi[L + i] = d
        vals = np.array([oracles.pair(chi, h, p) for h in elements])
        total += np.outer(vals, vals.conj())
    return scale * float(Fraction(p) ** L) * total


@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("s", [1, 2, 3])
def test_H0_is_orthonormal_on_coset(p, s):
    for word in ({0: 1}, {0: p - 1, 1: 1, 2: 1}):
        coset = DualCoset(0, CharacterWord.from_exponents(p, word))
        hs = enumerate_H0(p, s)
        G = coset_gram(coset, hs)
        assert np.max(np.abs(G - np.eye(len(hs)))) <= 1e-12
        assert np.max(np.abs(G - _gram_oracle(0, word, [h.as_dict() for h in hs], p, 1.0))) <= 1e-12


@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("s", [1, 2, 3])
def test_dilated_H0_is_orthonormal_on_finer_coset(p, s):
    for word in ({-s: 1}, {-s: 1, 0: p - 1, 1: 1}):
        coset = DualCoset(-s, CharacterWord.from_exponents(p, word))
        elems = [dilate_element(h, s) for h in enumerate_H0(p, 2)]
        G = coset_gram(coset, elems, scale=float(p) ** s)
        assert np.max(np.abs(G - np.eye(len(elems)))) <= 1e-12
