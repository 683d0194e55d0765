"""Pictures of dual-group functions on the Monna line.

A dual coset ``G_l^perp w`` is drawn as the interval
``[lambda'(w), lambda'(w) + p**l]``.  Values are labelled ``1``, ``0`` or
``≠0``; zeros are the structural zeros of the tree, never small floats.
"""

from __future__ import annotations

from fractions import Fraction
from xml.sax.saxutils import escape

from .frames import FrameSystem
from .steps import StepFunctionFreq
from .tree import phi_hat_tree, shift_tree, shifted_zero_shadow, zero_shadow

__all__ = ["segments", "render_ascii", "render_svg", "WHAT"]

WHAT = ("phi-hat", "phi-hat-shifted", "wavelets")


def _label(value: complex, zero: bool) -> str:
    if zero:
        return "0"
    if value == 1:
        return "1"
    return "≠0"


def segments(fs: FrameSystem, what: str) -> list[dict]:
    """``[{lo, hi, coset, label, ...}]`` in Monna order."""
    params = fs.params
    p, N, M = params.p, params.N, params.M
    grid = StepFunctionFreq.zeros(p, -N, M + 1)
    out = []
    if what in ("phi-hat", "phi-hat-shifted"):
        vals = phi_hat_tree(fs.tree)
        zeros = zero_shadow(fs.tree)
        if what == "phi-hat-shifted":
            vals = shift_tree(vals, p)
            zeros = shifted_zero_shadow(fs.tree)
        for k in range(grid.size):
            c = grid.coset_at(k)
            lo, hi = c.monna_interval()
            out.append({"lo": lo, "hi": hi, "coset": str(c), "label": _label(vals[k], bool(zeros[k]))})
    elif what == "wavelets":
        for j, w in enumerate(fs.wavelets, 1):
            lo, hi = w.E.monna_interval()
            out.append(
                {"lo": lo, "hi": hi, "coset": str(w.E), "label": f"psi{j}", "t": w.t, "target": str(w.target)}
            )
        out.sort(key=lambda s: s["lo"])
    else:
        raise ValueError(f"unknown picture {what!r}; choose from {', '.join(WHAT)}")
    return out


def _frac(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def render_ascii(fs: FrameSystem, what: str) -> str:
    lines = [f"# {what}  p={fs.params.p} N={fs.params.N} M={fs.params.M}"]
    for s in segments(fs, what):
        extra = f"  t={s['t']} -> {s['target']}" if "t" in s else ""
        lines.append(f"[{_frac(s['lo'])}, {_frac(s['hi'])}]  {s['coset']}  {s['label']}{extra}")
    return "\n".join(lines) + "\n"


def render_svg(fs: FrameSystem, what: str, width: int = 900) -> str:
    """Monna-line figure: value bars above the axis, annulus arcs below."""
    params = fs.params
    p, N, M = params.p, params.N, params.M
    segs = segments(fs, what)
    total = Fraction(p) ** (M + 1)
    margin, axis_y = 20, 80
    scale = Fraction(width - 2 * margin) / total

    def X(v: Fraction) -> str:
        return f"{float(margin + v * scale):.3f}"

    heights = {"1": 40, "≠0": 30, "0": 10}
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="170" '
        f'viewBox="0 0 {width} 170" font-family="sans-serif" font-size="11">',
        f'<title>{escape(what)} p={p} N={N} M={M}</title>',
        f'<line x1="{X(Fraction(0))}" y1="{axis_y}" x2="{X(total)}" y2="{axis_y}" stroke="black"/>',
    ]
    for s in segs:
        y = axis_y - heights.get(s["label"], 25)
        x0, x1 = X(s["lo"]), X(s["hi"])
        parts.append(f'<line x1="{x0}" y1="{y}" x2="{x1}" y2="{y}" stroke="#1f4e9c" stroke-width="2"/>')
        mid = f"{(float(x0) + float(x1)) / 2:.3f}"
        parts.append(f'<text x="{mid}" y="{y - 4}" text-anchor="middle">{escape(s["label"])}</text>')
    for k in range(-N, M + 2):
        hi = Fraction(p) ** k
        depth = 14 + 12 * (k + N)
        x1 = X(hi)
        mid = f"{float(margin + hi * scale / 2):.3f}"
        parts.append(
            f'<path d="M {X(Fraction(0))} {axis_y} Q {mid} {axis_y + 2 * depth} {x1} {axis_y}" '
            'fill="none" stroke="#888"/>'
        )
        parts.append(f'<text x="{mid}" y="{axis_y + depth + 12}" text-anchor="middle">G[{k}]^perp</text>')
    for k in range(p ** (M + 1) + 1):
        x = X(Fraction(k))
        parts.append(f'<line x1="{x}" y1="{axis_y - 3}" x2="{x}" y2="{axis_y + 3}" stroke="black"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
