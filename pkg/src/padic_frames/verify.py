"""Brute-force checks that a frame system is tight.

Frame elements are ``psi_{n,h}(x) = p**(n/2) psi(A**n x - h)`` for ``n`` in Z
and ``h`` in ``H_0``.  Their coefficients are computed directly, either as
time-domain integrals or as finite frequency-domain sums, and their squared
sums are compared with ``||f||**2``.

The wavelet transforms used here are rebuilt from the stored masks and the
stored mask-tree values (``psi_hat = m_j * phi_hat(. A^-1)``), so a corrupted
node value shows up as a Parseval defect.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import PadicFramesError
from .frames import FrameSystem, check_theorem31
from .qp import GroupElement, enumerate_H0
from .solver import (
    MaskSpec,
    NONZERO_TOL,
    refinement_residual,
    support_propagation,
    evaluate_mask,
)
from .steps import (
    StepFunctionFreq,
    StepFunctionTime,
    digit_reverse,
    fourier,
    inner_product,
    integral_of_product,
    inverse_fourier,
)
from .tree import phi_hat_tree, shift_tree

__all__ = [
    "CoefficientGrid",
    "ParsevalResult",
    "wavelet_hats",
    "random_test_function",
    "coefficient",
    "coefficient_time",
    "coefficient_grid",
    "lemma31_check",
    "parseval",
    "parseval_residual",
    "gram_check_phi",
    "shift_gram",
    "mask_consistency",
    "verify_frame",
]


def _as_freq(F: StepFunctionFreq) -> StepFunctionFreq:
    """Trim a function to its exact support (no tolerance)."""
    return F.canonical(0.0)


def wavelet_hats(fs: FrameSystem) -> list[StepFunctionFreq]:
    """``psi_hat_j = m_j * phi_hat(chi A^-1)`` from the stored node values."""
    params = fs.params
    shifted = StepFunctionFreq(
        params.p, -params.N, params.M + 1, shift_tree(phi_hat_tree(fs.tree), params.p)
    )
    return [_as_freq(w.mask_values * shifted) for w in fs.wavelets]


def random_test_function(params, rng: np.random.Generator, mean_zero: bool = False) -> StepFunctionTime:
    """Complex Gaussian step function, constant on ``G_{M+2}``, supported on ``G_{-N-1}``."""
    level, support = params.M + 2, -params.N - 1
    size = params.p ** (level - support)
    vals = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    if mean_zero:
        vals -= vals.mean()
    return StepFunctionTime(params.p, level, support, vals)


def _psi_hat(w) -> StepFunctionFreq:
    return w if isinstance(w, StepFunctionFreq) else w.psi_hat


@dataclass
class CoefficientGrid:
    """All coefficients ``c_{n,h}`` for one wavelet and one ``n``.

    ``values[k]`` belongs to ``h`` with Monna value ``k`` in ``H_0^{(depth)}``;
    every other ``h`` gives exactly zero.  ``extra_layer`` is the largest
    coefficient found one digit deeper, computed without that shortcut.
    """

    n: int
    depth: int
    values: np.ndarray
    extra_layer: float

    @property
    def energy(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2))


def _restrict(F: StepFunctionFreq, level: int, support: int) -> np.ndarray:
    """Values of ``F`` on the ``(level, support)`` window, ``level <= F.level``."""
    p = F.p
    if F.level >= support:
        return np.full(p ** (support - level), F.values[0])
    if F.support < support:
        F = F.window(F.level, support)
    cut = StepFunctionFreq(p, F.level, support, F.values[: p ** (support - F.level)])
    return cut.window(level, support).values


def _product_on_support(f_hat: StepFunctionFreq, psi_hat: StepFunctionFreq, n: int) -> StepFunctionFreq:
    """``eta -> f_hat(eta A**n) conj(psi_hat(eta))`` on a window holding ``psi_hat``.

    The window support is at least 0 so that every ``h`` in ``H_0`` is
    resolved by the inverse transform.
    """
    g = f_hat.dilate(-n)
    level = min(g.level, psi_hat.level)
    support = max(psi_hat.support, 0)
    gv = _restrict(g, level, support)
    pv = psi_hat.window(level, support).values
    return StepFunctionFreq(psi_hat.p, level, support, gv * pv.conj())


def coefficient_grid(f_hat: StepFunctionFreq, psi_hat: StepFunctionFreq, n: int) -> CoefficientGrid:
    """``c_{n,h} = p**(n/2) integral f_hat(eta A**n) conj(psi_hat(eta)) (eta, h) dnu(eta)``.

    The substitution ``chi = eta A**n`` turns the coefficient into the
    inverse transform of a step function constant on ``G_L^perp`` cosets,
    which vanishes off ``G_L``; hence only ``h`` in ``H_0^{(-L)}`` matter.
    """
    p = psi_hat.p
    P = _product_on_support(f_hat, psi_hat, n)
    scale = float(p) ** (n / 2)
    depth = max(-P.level, 0)
    if P.level > 0:
        P = P.window(0, P.support)
    c = inverse_fourier(P)
    vals = c.values[digit_reverse(p, depth)] * scale if depth else c.values[:1] * scale
    finer = inverse_fourier(P.window(P.level - 1, P.support))
    keep = np.zeros(finer.size, dtype=bool)
    keep[::p] = True
    extra = float(np.abs(finer.values[~keep]).max()) * scale
    return CoefficientGrid(n, depth, np.asarray(vals), extra)


def coefficient(f: StepFunctionTime, w, n: int, h: GroupElement) -> complex:
    """One coefficient by the frequency route."""
    psi_hat = _psi_hat(w)
    P = _product_on_support(fourier(f), psi_hat, n)
    if P.level > 0:
        P = P.window(0, P.support)
    return complex(inverse_fourier(P)(h)) * float(psi_hat.p) ** (n / 2)


def coefficient_time(f: StepFunctionTime, w, n: int, h: GroupElement) -> complex:
    """``p**(n/2) integral f(x) conj(psi(A**n x - h)) dmu(x)`` by direct summation."""
    psi = w if isinstance(w, StepFunctionTime) else inverse_fourier(_psi_hat(w))
    if not h.is_zero and h.lowest < psi.support:
        psi = psi.window(psi.level, h.lowest)
    g = psi.translate(h).dilate(n)
    return inner_product(f, g) * float(psi.p) ** (n / 2)


def _energy(F2: StepFunctionFreq, g2: StepFunctionFreq, n: int) -> float:
    """``integral |f_hat|^2 |psi_hat(chi A^-n)|^2 dnu``."""
    return float(integral_of_product(F2, g2.dilate(n)).real)


def lemma31_check(f: StepFunctionTime, w, n: int, method: str = "frequency") -> tuple[float, float, float]:
    """``sum_h |c_{n,h}|^2`` against ``integral |f_hat(chi)|^2 |psi_hat(chi A^-n)|^2 dnu``.

    ``method="time"`` sums time-domain coefficients over ``h`` in
    ``H_0^{(depth+1)}`` instead; it is slow and meant for small cases.
    """
    psi_hat = _psi_hat(w)
    f_hat = fourier(f)
    grid = coefficient_grid(f_hat, psi_hat, n)
    if method == "frequency":
        lhs = grid.energy
    elif method == "time":
        psi = inverse_fourier(psi_hat)
        lhs = sum(abs(coefficient_time(f, psi, n, h)) ** 2 for h in enumerate_H0(f.p, grid.depth + 1))
    else:
        raise ValueError(f"unknown method {method!r}")
    F2 = _abs2(f_hat)
    rhs = _energy(F2, _abs2(psi_hat), n)
    residual = abs(lhs - rhs) / max(rhs, f.norm2() * 1e-6)
    return lhs, rhs, residual


def _abs2(F: StepFunctionFreq) -> StepFunctionFreq:
    return StepFunctionFreq(F.p, F.level, F.support, np.abs(F.values) ** 2)


@dataclass
class ParsevalResult:
    residual: float
    total: float
    norm2: float
    windows: list = field(default_factory=list)
    truncation: dict = field(default_factory=dict)


def parseval(f: StepFunctionTime, fs: FrameSystem, method: str = "lemma") -> ParsevalResult:
    """``sum_j sum_n sum_h |c|^2`` against ``||f||^2``.

    For each wavelet (``psi_hat`` supported in a coset with top index ``e``)
    the scales ``n`` with ``e + n >= f_hat.level - 1`` are summed explicitly,
    one extra scale on each side included; below that ``f_hat`` is constant
    on ``supp psi_hat(. A^-n)``, so the remaining terms form a geometric
    series ``|f_hat(1)|^2 ||psi_hat||^2 p**n`` summed in closed form.  Above
    ``f_hat``'s support every term is zero.

    ``method="lemma"`` evaluates each scale as an annulus integral of
    ``|f_hat|^2``; ``method="coefficients"`` sums the individual ``|c_{n,h}|^2``.
    """
    if method not in ("lemma", "coefficients"):
        raise ValueError(f"unknown method {method!r}")
    p = f.p
    f_hat = fourier(f)
    F2 = _abs2(f_hat)
    norm2 = f.norm2()
    const = abs(complex(f_hat.values[0])) ** 2
    total = 0.0
    windows = []
    boundary = 0.0
    top_extra = 0.0
    extra_layer = 0.0
    for psi_hat in wavelet_hats(fs):
        g2 = _abs2(psi_hat)
        e = psi_hat.support - 1
        n0 = f_hat.level - 2 - e
        n1 = f_hat.support - 1 - e
        mass = g2.integral().real
        for n in range(n0, n1 + 2):
            if method == "lemma":
                term = _energy(F2, g2, n)
            else:
                grid = coefficient_grid(f_hat, psi_hat, n)
                term = grid.energy
                extra_layer = max(extra_layer, grid.extra_layer)
            if n == n0:
                boundary = max(boundary, abs(term - const * mass * float(p) ** n))
            if n == n1 + 1:
                top_extra = max(top_extra, abs(term))
            total += term
        tail = const * mass * float(Fraction(p) ** (n0 - 1)) * p / (p - 1)
        total += tail
        windows.append({"n_min": n0, "n_max": n1 + 1, "tail": tail})
    residual = abs(total - norm2) / norm2
    truncation = {"lower_boundary_mismatch": boundary, "upper_extra_scale": top_extra}
    if method == "coefficients":
        truncation["extra_h_layer"] = extra_layer
    return ParsevalResult(residual, total, norm2, windows, truncation)


def parseval_residual(f: StepFunctionTime, fs: FrameSystem, method: str = "lemma") -> float:
    return parseval(f, fs, method).residual


def gram_check_phi(phi: StepFunctionTime, s: int) -> np.ndarray:
    """Gram matrix of ``phi(. - h)`` over ``h`` in ``H_0^{(s)}``."""
    hs = enumerate_H0(phi.p, s)
    base = phi.window(phi.level, min(phi.support, -s))
    shifts = np.array([base.translate(h).values for h in hs])
    return shifts @ shifts.conj().T * base.measure


def shift_gram(fs_or_phi, s: int, renormalize: bool = False) -> np.ndarray:
    """Shift Gram of ``phi``, or of ``p**N phi(A**N .)`` when ``renormalize``."""
    if isinstance(fs_or_phi, StepFunctionTime):
        phi, N = fs_or_phi, None
    else:
        phi, N = fs_or_phi.phi, fs_or_phi.params.N
    if renormalize:
        if N is None:
            raise ValueError("renormalisation needs the frame's N")
        phi = phi.dilate(N) * float(phi.p) ** N
    return gram_check_phi(phi, s)


def mask_consistency(spec: MaskSpec) -> dict:
    """Stored node values against the stored coefficients."""
    t = spec.tree
    params = spec.params
    lam = np.asarray(t.values if t.values is not None else spec.lam)
    model = evaluate_mask(params, np.arange(t.size), spec.beta)
    zeros = sorted(t.zeros)
    free = np.ones(t.size, dtype=bool)
    free[zeros] = False
    return {
        "max_abs_residual": float(np.max(np.abs(model - lam))),
        "root": complex(lam[0]),
        "zero_nodes_max_abs": float(np.max(np.abs(lam[zeros]))) if zeros else 0.0,
        "min_nonzero": float(np.abs(lam[free]).min()),
        "max_abs": float(np.abs(lam).max()),
    }


def verify_frame(fs: FrameSystem, tests: int = 50, seed: int = 0, tol: float = 1e-9) -> dict:
    """Full verification report; ``report["passed"]`` is the verdict."""
    rng = np.random.default_rng(seed)
    failures = []
    report: dict = {"tests": tests, "seed": seed, "tol": tol, "branch": fs.branch, "n": fs.n}

    cons = mask_consistency(fs.mask)
    report["mask"] = cons
    if cons["max_abs_residual"] > tol or cons["zero_nodes_max_abs"] > 0 or cons["root"] != 1:
        failures.append("stored node values disagree with the stored coefficients")
    if cons["min_nonzero"] <= NONZERO_TOL * cons["max_abs"]:
        failures.append("a node outside the zero set is numerically zero")

    try:
        ref = refinement_residual(fs.mask)
        prop = support_propagation(fs.mask)
    except PadicFramesError as exc:
        failures.append(str(exc))
        ref, prop = math.inf, {"max_abs": math.inf, "structural": False}
    report["refinement_residual"] = ref
    report["support_propagation"] = prop
    if not ref <= tol:
        failures.append(f"refinement equation residual {ref:.3e}")
    if not (prop["max_abs"] == 0 and prop["structural"]):
        failures.append("m_0 phi_hat(. A^-1) does not vanish beyond the tree")

    th = check_theorem31(fs)
    report["theorem31"] = th.as_dict()
    failures.extend(th.failures)

    if fs.orthogonal:
        G = shift_gram(fs, 2, renormalize=True)
        err = float(np.max(np.abs(G - np.eye(G.shape[0]))))
        report["orthogonal_gram_error"] = err
        if not err <= tol:
            failures.append(f"shift Gram differs from the identity by {err:.3e}")
    else:
        residuals, lemma = [], []
        for k in range(tests):
            f = random_test_function(fs.params, rng)
            res = parseval(f, fs)
            residuals.append(res.residual)
            trunc = max(res.truncation.values()) / res.norm2
            if trunc > 1e-12:
                failures.append(f"test {k}: truncation margin {trunc:.3e}")
            if k < 4:
                hats = wavelet_hats(fs)
                for psi_hat in hats:
                    n = int(rng.integers(-2, fs.params.M + 2))
                    lemma.append(lemma31_check(f, psi_hat, n)[2])
        report["parseval"] = {
            "max": max(residuals, default=0.0),
            "mean": float(np.mean(residuals)) if residuals else 0.0,
            "residuals": residuals,
        }
        report["lemma31_max"] = max(lemma, default=0.0)
        worst = max(residuals + lemma, default=0.0)
        if not worst <= tol:
            failures.append(f"residual {worst:.3e} exceeds tolerance {tol:.1e}")
    report["failures"] = failures
    report["passed"] = not failures
    return report
