"""JSON frame documents.

A document records the inputs (parameters, tree literal, transforms,
branch options) next to the solved data (node values, coefficients,
wavelets) and a check summary.  Complex numbers are ``[re, im]`` pairs,
character words are sorted ``[index, exponent]`` pairs, and output is
canonical: sorted keys, shortest round-trip floats.  ``dumps(loads(s)) == s``
for any string produced by :func:`dumps_document`.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import PadicFramesError
from .frames import FrameSystem, WaveletSpec, check_theorem31
from .qp import CharacterWord, DualCoset, GroupParams
from .solver import MaskSpec, evaluate_mask, refinement_residual, support_propagation
from .steps import StepFunctionFreq, inverse_fourier
from .tree import MaskTree, phi_hat_tree

__all__ = [
    "SCHEMA_VERSION",
    "DocumentError",
    "frame_to_document",
    "document_to_frame",
    "dumps_document",
    "loads_document",
    "save_document",
    "load_document",
    "coset_to_json",
    "coset_from_json",
    "tree_literal_from_json",
]

SCHEMA_VERSION = "1"


class DocumentError(PadicFramesError):
    """Unreadable, malformed or internally inconsistent document."""


def _c(z) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def _carray(values) -> list[list[float]]:
    return [_c(z) for z in np.asarray(values).ravel()]


def coset_to_json(E: DualCoset) -> dict:
    return {"level": E.level, "word": [[j, e] for j, e in E.rep.exponents]}


def coset_from_json(p: int, obj) -> DualCoset:
    try:
        word = CharacterWord.from_exponents(p, [(int(j), int(e)) for j, e in obj["word"]])
        return DualCoset(int(obj["level"]), word)
    except (KeyError, TypeError, ValueError) as exc:
        raise DocumentError(f"bad coset {obj!r}: {exc}") from exc


def tree_literal_from_json(entries) -> list[tuple[int, object]]:
    """Normalise ``[[index, "0" | "zero" | "free" | [re, im]], ...]``."""
    out = []
    for item in entries:
        try:
            idx, val = item
        except (TypeError, ValueError) as exc:
            raise ValueError(f"tree entry {item!r} is not an [index, value] pair") from exc
        if isinstance(val, str):
            if val not in ("0", "zero", "free"):
                raise ValueError(f"tree entry {item!r}: unknown marker {val!r}")
            out.append((int(idx), "0" if val == "zero" else val))
        elif isinstance(val, (list, tuple)) and len(val) == 2:
            out.append((int(idx), [float(val[0]), float(val[1])]))
        elif val == 0:
            out.append((int(idx), "0"))
        else:
            raise ValueError(f"tree entry {item!r}: value must be '0', 'free' or [re, im]")
    return sorted(out, key=lambda e: e[0])


def frame_to_document(
    fs: FrameSystem,
    tree_literal=None,
    transforms=(),
    split=None,
    pieces=None,
    padding=None,
) -> dict:
    """Serialisable description of a frame plus its build inputs."""
    params = fs.params
    spec = fs.mask
    if tree_literal is None:
        tree_literal = [[m, "0"] for m in sorted(fs.tree.zeros)]
    report = check_theorem31(fs)
    prop = support_propagation(spec)
    lam = np.asarray(fs.tree.values)
    free = np.ones(lam.size, dtype=bool)
    free[sorted(fs.tree.zeros)] = False
    return {
        "schema_version": SCHEMA_VERSION,
        "params": {"p": params.p, "N": params.N, "M": params.M},
        "tree": [[int(m), v] for m, v in tree_literal],
        "transforms": [{"kind": k, "arg": int(a)} for k, a in transforms],
        "branch": {
            "kind": fs.branch,
            "n": fs.n,
            "orthogonal": fs.orthogonal,
            "split": sorted(int(j) for j in (split or ())),
            "pieces": None if pieces is None else [{"E": coset_to_json(E), "t": int(t)} for E, t in pieces],
            "padding": None if padding is None else [int(m) for m in padding],
            "partition": {k: list(v) for k, v in sorted(fs.partition.items())},
        },
        "history": list(fs.tree.history),
        "zeros": sorted(int(m) for m in fs.tree.zeros),
        "lambda": _carray(lam),
        "beta": _carray(spec.beta),
        "wavelets": [
            {
                "E": coset_to_json(w.E),
                "t": w.t,
                "mask": {
                    "level": w.mask_values.level,
                    "support": w.mask_values.support,
                    "values": _carray(w.mask_values.values),
                },
            }
            for w in fs.wavelets
        ],
        "checks": {
            "theorem31": report.as_dict(),
            "solve_residual": spec.residual,
            "refinement_residual": refinement_residual(spec),
            "support_propagation": prop,
            "min_nonzero_lambda": float(np.abs(lam[free]).min()),
            "max_abs_lambda": float(np.abs(lam).max()),
        },
    }


def _require(doc, key, kind):
    if key not in doc:
        raise DocumentError(f"missing field {key!r}")
    if not isinstance(doc[key], kind):
        raise DocumentError(f"field {key!r} has type {type(doc[key]).__name__}")
    return doc[key]


def _complex_array(rows, name: str) -> np.ndarray:
    try:
        arr = np.array([complex(float(re), float(im)) for re, im in rows], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise DocumentError(f"field {name!r} is not a list of [re, im] pairs") from exc
    if not np.all(np.isfinite(arr)):
        raise DocumentError(f"field {name!r} has non-finite entries")
    return arr


def document_to_frame(doc: dict) -> FrameSystem:
    """Rebuild a frame from stored values only (nothing is re-solved)."""
    if not isinstance(doc, dict):
        raise DocumentError("document is not a JSON object")
    version = _require(doc, "schema_version", str)
    if version != SCHEMA_VERSION:
        raise DocumentError(f"unsupported schema_version {version!r}")
    pr = _require(doc, "params", dict)
    try:
        params = GroupParams(int(pr["p"]), int(pr["N"]), int(pr["M"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise DocumentError(f"bad params: {exc}") from exc
    p, N, M = params.p, params.N, params.M
    size = p**params.height
    lam = _complex_array(_require(doc, "lambda", list), "lambda")
    beta = _complex_array(_require(doc, "beta", list), "beta")
    if lam.size != size or beta.size != p ** (N + 1):
        raise DocumentError(f"expected {size} node values and {p ** (N + 1)} coefficients")
    branch = _require(doc, "branch", dict)
    history = tuple(str(h) for h in _require(doc, "history", list))
    try:
        tree = MaskTree(params, frozenset(int(m) for m in _require(doc, "zeros", list)), lam, history)
    except ValueError as exc:
        raise DocumentError(str(exc)) from exc
    rows = [0] + sorted(tree.zeros)
    rhs = np.zeros(len(rows), dtype=complex)
    rhs[0] = 1
    spec = MaskSpec(params, tree, beta, lam, float(np.max(np.abs(evaluate_mask(params, rows, beta) - rhs))))

    inner = p ** (M + N)
    phi_hat = StepFunctionFreq(p, -N, M, phi_hat_tree(tree)[:inner])
    wavelets = []
    for w in _require(doc, "wavelets", list):
        try:
            E = coset_from_json(p, w["E"])
            m = w["mask"]
            mask = StepFunctionFreq(p, int(m["level"]), int(m["support"]), _complex_array(m["values"], "mask"))
            t = int(w["t"])
        except (KeyError, TypeError, ValueError) as exc:
            raise DocumentError(f"bad wavelet entry: {exc}") from exc
        psi_hat = StepFunctionFreq.indicator(E)
        wavelets.append(WaveletSpec(E, t, psi_hat, inverse_fourier(psi_hat), mask))
    try:
        partition = {str(k): [int(x) for x in v] for k, v in dict(branch.get("partition", {})).items()}
        return FrameSystem(
            params=params,
            mask=spec,
            phi_hat=phi_hat,
            phi=inverse_fourier(phi_hat),
            wavelets=tuple(wavelets),
            branch=str(branch["kind"]),
            n=int(branch["n"]),
            orthogonal=bool(branch.get("orthogonal", False)),
            partition=partition,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DocumentError(f"bad branch record: {exc}") from exc


def _check_floats(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        raise DocumentError("non-finite number in document")
    if isinstance(obj, dict):
        for v in obj.values():
            _check_floats(v)
    elif isinstance(obj, list):
        for v in obj:
            _check_floats(v)


def dumps_document(doc: dict) -> str:
    _check_floats(doc)
    return json.dumps(doc, sort_keys=True, indent=1, allow_nan=False) + "\n"


def loads_document(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise DocumentError("document is not a JSON object")
    return doc


def save_document(doc: dict, path) -> None:
    Path(path).write_text(dumps_document(doc), encoding="utf-8")


def load_document(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from exc
    return loads_document(text)
