"""Hand-written SVG of the critical values of f_H in the complex plane.

Every coordinate is printed with a fixed number of decimals, so identical
inputs give byte-identical files.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

SIZE = 480
MARGIN = 40
BASE_TOL = 1e-9


def base_value(values, tol: float = BASE_TOL) -> complex:
    """0 when it is a regular value, otherwise a point just above the real axis."""
    values = [complex(v) for v in values]
    if all(abs(v) > tol for v in values):
        return 0j
    spread = max((abs(v) for v in values), default=1.0) or 1.0
    candidate = 0.1j * spread
    while any(abs(v - candidate) <= tol for v in values):
        candidate *= 1.5
    return candidate


def _fmt(v: float) -> str:
    s = f"{v:.3f}"
    return "0.000" if s == "-0.000" else s


def render_svg(critical_values, trajectories=(), title: str = "critical values of f_H") -> str:
    """SVG with critical values, straight matching paths from the base value
    and optional polylines of f along flow trajectories."""
    values = [complex(v) for v in critical_values]
    base = base_value(values)
    curves = [[complex(z) for z in t] for t in trajectories if len(t)]
    pts = values + [base] + [z for c in curves for z in c]
    re = [z.real for z in pts]
    im = [z.imag for z in pts]
    span = max(max(re) - min(re), max(im) - min(im), 1.0) * 1.1
    cx = (max(re) + min(re)) / 2
    cy = (max(im) + min(im)) / 2
    scale = (SIZE - 2 * MARGIN) / span

    def xy(z):
        return _fmt(SIZE / 2 + (z.real - cx) * scale), _fmt(SIZE / 2 - (z.imag - cy) * scale)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
        f'viewBox="0 0 {SIZE} {SIZE}">',
        f"<title>{escape(title)}</title>",
        f'<rect width="{SIZE}" height="{SIZE}" fill="white"/>',
    ]
    _, ay = xy(0j)
    out.append(f'<line id="real-axis" x1="0" y1="{ay}" x2="{SIZE}" y2="{ay}" stroke="#ccc"/>')
    bx, by = xy(base)
    out.append('<g id="matching-paths" stroke="#36c" stroke-width="1.5">')
    for v in values:
        x, y = xy(v)
        out.append(f'<line x1="{bx}" y1="{by}" x2="{x}" y2="{y}"/>')
    out.append("</g>")
    if curves:
        out.append('<g id="trajectories" fill="none" stroke="#2a2" stroke-width="1">')
        for c in curves:
            coords = " ".join(",".join(xy(z)) for z in c)
            out.append(f'<polyline points="{coords}"/>')
        out.append("</g>")
    out.append('<g id="critical-values" fill="#c33">')
    for v in values:
        x, y = xy(v)
        label = escape(f"{_fmt(v.real)}{'+' if v.imag >= 0 else '-'}{_fmt(abs(v.imag))}i")
        out.append(f'<circle cx="{x}" cy="{y}" r="4"><title>{label}</title></circle>')
    out.append("</g>")
    out.append(f'<circle id="base-value" cx="{bx}" cy="{by}" r="3" fill="#36c"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def trajectories_from_records(records) -> list:
    """Group JSON-lines flow records by sample into lists of f-values."""
    groups = {}
    for rec in records:
        f = rec["f_value"]
        groups.setdefault(rec.get("sample", 0), []).append(complex(f["re"], f["im"]))
    return [groups[k] for k in sorted(groups)]
