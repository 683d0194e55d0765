import numpy as np
import pytest

from padic_frames.frames import construct_frame
from padic_frames.qp import GroupElement, GroupParams, TimeCoset, enumerate_H0
from padic_frames.steps import StepFunctionTime, inverse_fourier
from padic_frames.verify import (
    coefficient,
    coefficient_grid,
    coefficient_time,
    gram_check_phi,
    lemma31_check,
    parseval,
    parseval_residual,
    random_test_function,
    shift_gram,
    verify_frame,
    wavelet_hats,
)
from padic_frames.steps import fourier

FRAMES = {
    "p2N1": (GroupParams(2, 1, 1), []),
    "p3N1": (GroupParams(3, 1, 1), [("i", 0)]),
    "p2N2": (GroupParams(2, 2, 2), [("i", 0)]),
}


@pytest.fixture(scope="module", params=sorted(FRAMES))
def frame(request):
    params, tr = FRAMES[request.param]
    return construct_frame(params, tr)


def indicator(p, level, digits=None):
    return StepFunctionTime.indicator(TimeCoset(level, GroupElement.from_digits(p, digits or {})))


def test_dual_route_coefficients(frame):
    rng = np.random.default_rng(1)
    p = frame.params.p
    for _ in range(6):
        f = random_test_function(frame.params, rng)
        for w in frame.wavelets:
            n = int(rng.integers(-1, frame.params.M + 2))
            for h in enumerate_H0(p, 2)[:: max(1, p - 1)]:
                a = coefficient(f, w, n, h)
                b = coefficient_time(f, w, n, h)
                bound = np.sqrt(f.norm2() * w.psi_hat.norm2())
                assert abs(a - b) <= 1e-10 * bound


def test_coefficient_of_psi_itself(frame):
    zero = GroupElement.from_digits(frame.params.p, {})
    for w in frame.wavelets:
        assert coefficient(w.psi_time, w, 0, zero) == pytest.approx(w.E.measure, abs=1e-12)
        assert coefficient_time(w.psi_time, w, 0, zero) == pytest.approx(w.E.measure, abs=1e-12)


def test_coefficient_zero_for_disjoint_frequency_support():
    fs = construct_frame(GroupParams(2, 1, 1))
    w = fs.wavelets[0]
    f = indicator(2, -3)  # f_hat is supported on G_{-3}^perp, far from E
    zero = GroupElement.from_digits(2, {})
    assert abs(coefficient(f, w, 0, zero)) < 1e-15
    lhs, rhs, _ = lemma31_check(f, w, 0)
    assert lhs == 0 and rhs == 0


@pytest.mark.parametrize("p", [2, 3])
def test_energy_identity_grid(p):
    fs = construct_frame(GroupParams(p, 1, 1), [("i", 0)] if p == 3 else [])
    rng = np.random.default_rng(p)
    worst = 0.0
    for _ in range(20):
        f = random_test_function(fs.params, rng)
        w = fs.wavelets[int(rng.integers(len(fs.wavelets)))]
        n = int(rng.integers(-3, 4))
        worst = max(worst, lemma31_check(f, w, n)[2])
    assert worst <= 1e-9


def test_energy_identity_time_route():
    fs = construct_frame(GroupParams(2, 1, 1))
    rng = np.random.default_rng(7)
    f = random_test_function(fs.params, rng)
    for n in (-1, 0, 1, 2):
        lhs_t, rhs, res_t = lemma31_check(f, fs.wavelets[0], n, method="time")
        lhs_f, _, _ = lemma31_check(f, fs.wavelets[0], n)
        assert res_t <= 1e-9
        assert abs(lhs_t - lhs_f) <= 1e-10 * f.norm2()


def test_energy_identity_scaling(frame):
    rng = np.random.default_rng(3)
    f = random_test_function(frame.params, rng)
    w = frame.wavelets[0]
    lhs, rhs, _ = lemma31_check(f, w, 1)
    lhs2, rhs2, _ = lemma31_check(f * 2, w, 1)
    assert lhs2 == pytest.approx(4 * lhs, rel=1e-14)
    assert rhs2 == 4 * rhs


def test_extra_h_layer_is_zero(frame):
    rng = np.random.default_rng(5)
    f = random_test_function(frame.params, rng)
    f_hat = fourier(f)
    for psi_hat in wavelet_hats(frame):
        for n in range(-2, frame.params.M + 3):
            grid = coefficient_grid(f_hat, psi_hat, n)
            assert grid.extra_layer < 1e-12 * np.sqrt(f.norm2())


def test_parseval_random(frame):
    rng = np.random.default_rng(11)
    for _ in range(10):
        f = random_test_function(frame.params, rng)
        res = parseval(f, frame)
        assert res.residual <= 1e-9
        assert max(res.truncation.values()) < 1e-12 * res.norm2


def test_parseval_coefficient_route_matches(frame):
    rng = np.random.default_rng(12)
    f = random_test_function(frame.params, rng)
    a = parseval(f, frame)
    b = parseval(f, frame, method="coefficients")
    assert b.residual <= 1e-9
    assert abs(a.total - b.total) <= 1e-10 * a.norm2
    assert b.truncation["extra_h_layer"] < 1e-12 * np.sqrt(a.norm2)
    with pytest.raises(ValueError):
        parseval(f, frame, method="guess")


def test_parseval_mean_zero_controls(frame):
    p = frame.params.p
    f = indicator(p, 0, {-1: 1}) - indicator(p, 0)
    res = parseval(f, frame)
    assert res.residual <= 1e-10
    assert all(w["tail"] == 0 for w in res.windows)
    rng = np.random.default_rng(13)
    g = random_test_function(frame.params, rng, mean_zero=True)
    assert abs(g.integral()) < 1e-12
    assert parseval_residual(g, frame) <= 1e-10


def test_parseval_translation_invariant(frame):
    p = frame.params.p
    rng = np.random.default_rng(17)
    f = random_test_function(frame.params, rng)
    base = parseval(f, frame)
    for h in enumerate_H0(p, 2)[1:3]:
        moved = parseval(f.translate(h), frame)
        assert moved.norm2 == pytest.approx(base.norm2, rel=1e-13)
        assert moved.total == pytest.approx(base.total, rel=1e-12)


def test_incomplete_system_is_not_tight():
    fs = construct_frame(GroupParams(3, 1, 1), [("i", 0)])
    crippled = type(fs)(**{**fs.__dict__, "wavelets": fs.wavelets[:1]})
    f = random_test_function(fs.params, np.random.default_rng(0))
    assert parseval_residual(f, crippled) > 1e-3


def test_gram_indicator_is_identity():
    for p in (2, 3):
        G = gram_check_phi(indicator(p, 0), 2)
        assert np.max(np.abs(G - np.eye(p**2))) < 1e-15


@pytest.mark.parametrize("p,N,tr", [(2, 1, []), (3, 1, [("i", 0)]), (3, 2, [])])
def test_gram_generic_phi(p, N, tr):
    fs = construct_frame(GroupParams(p, N, N), tr)
    G = shift_gram(fs, 2)
    assert np.max(np.abs(G - G.conj().T)) <= 1e-10
    assert np.linalg.eigvalsh((G + G.conj().T) / 2).min() >= -1e-10
    # a generic tree gives a non-orthogonal MRA; the size of the defect is logged
    print(f"p={p} N={N} shift-Gram deviation from identity: {np.abs(G - np.eye(len(G))).max():.3f}")
    with pytest.raises(ValueError):
        shift_gram(fs.phi, 2, renormalize=True)


def test_verify_frame_report(frame):
    report = verify_frame(frame, tests=5, seed=2)
    assert report["passed"], report["failures"]
    assert len(report["parseval"]["residuals"]) == 5
    assert report["parseval"]["max"] <= 1e-9
    assert report["lemma31_max"] <= 1e-9
    again = verify_frame(frame, tests=5, seed=2)
    assert again["parseval"] == report["parseval"]


def test_verify_frame_detects_tampering():
    fs = construct_frame(GroupParams(3, 1, 1), [("i", 0)])
    lam = np.array(fs.tree.values)
    lam[2] += 1e-3
    tree = type(fs.tree)(fs.params, fs.tree.zeros, lam, fs.tree.history)
    mask = type(fs.mask)(fs.params, tree, fs.mask.beta, lam, fs.mask.residual)
    tampered = type(fs)(**{**fs.__dict__, "mask": mask})
    report = verify_frame(tampered, tests=3, seed=0)
    assert not report["passed"]
    assert report["mask"]["max_abs_residual"] > 1e-4


def test_psi_time_round_trip(frame):
    for w in frame.wavelets:
        back = fourier(w.psi_time)
        assert np.max(np.abs(back.window(w.psi_hat.level, w.psi_hat.support).values - w.psi_hat.values)) < 1e-12
        assert inverse_fourier(w.psi_hat).max_abs_diff(w.psi_time) == 0
