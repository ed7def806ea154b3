"""
Figure emitters: connectivity webs on a ring and adjacency bitmaps.

All output is plain text with fixed float formatting, so identical inputs
give byte-identical files.
"""

from dataclasses import dataclass
import math

import numpy as np
import scipy.sparse as sp

from .errors import ValidationError
from .graph import SUPPORT_TOL, Digraph, support_digraph, to_dot

__all__ = [
    "PARTS",
    "FORMATS",
    "WebLayout",
    "web_digraph",
    "render_web",
    "web_dot",
    "web_svg",
    "web_tikz",
    "pbm_text",
    "parse_pbm_text",
]

PARTS = ("lindblad", "hamiltonian", "union")
FORMATS = ("dot", "svg", "tikz")


@dataclass(frozen=True)
class WebLayout:
    """Vertex n sits at angle (n-1) 2 pi / V on the unit circle."""
    vertex_count: int

    def angle(self, v):
        return (v - 1) * 2 * math.pi / self.vertex_count

    def position(self, v):
        t = self.angle(v)
        # snap so that exact quarter turns print as 0, not 6e-17
        x, y = round(math.cos(t), 12) + 0.0, round(math.sin(t), 12) + 0.0
        return x, y

    @property
    def positions(self):
        return {v: self.position(v) for v in range(1, self.vertex_count + 1)}


def web_digraph(gs, part="lindblad", tol=SUPPORT_TOL):
    """Support digraph of the jumps, of K, or of both."""
    if part == "lindblad":
        mats = list(gs.jumps)
        if not mats:
            return Digraph(gs.dim, [], [])
    elif part == "hamiltonian":
        mats = [gs.effective]
    elif part == "union":
        mats = [gs.effective, *gs.jumps]
    else:
        raise ValidationError(
            f"part must be one of {', '.join(PARTS)}, got {part!r}")
    return support_digraph(mats, tol)


def web_dot(g, layout=None):
    layout = layout or WebLayout(g.vertex_count)
    return to_dot(g, name="web", positions=layout.positions,
                  attrs={"layout": "neato"})


def _missing_link(g, annotate):
    n = g.vertex_count
    return annotate and n > 1 and (1, n) not in g.edges


def web_svg(g, layout=None, annotate=False, size=400):
    """Ring drawing with arrowed edges.  ``annotate`` adds the red
    first-to-last vertex arrow for the missing link."""
    layout = layout or WebLayout(g.vertex_count)
    c = size / 2
    r = 0.4 * size

    def pt(v):
        x, y = layout.position(v)
        return c + r * x, c - r * y

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" '
        f'height="{size}" viewBox="0 0 {size} {size}">',
        "<defs>",
        '<marker id="arrow" viewBox="0 0 10 10" refX="10" refY="5" '
        'markerWidth="6" markerHeight="6" orient="auto">'
        '<path d="M0,0 L10,5 L0,10 z" fill="black"/></marker>',
        '<marker id="arrow-red" viewBox="0 0 10 10" refX="10" refY="5" '
        'markerWidth="6" markerHeight="6" orient="auto">'
        '<path d="M0,0 L10,5 L0,10 z" fill="red"/></marker>',
        "</defs>",
    ]
    shrink = 8.0

    def line(i, j, colour, marker):
        (x1, y1), (x2, y2) = pt(i), pt(j)
        dx, dy = x2 - x1, y2 - y1
        norm = math.hypot(dx, dy) or 1.0
        x1, y1 = x1 + shrink * dx / norm, y1 + shrink * dy / norm
        x2, y2 = x2 - shrink * dx / norm, y2 - shrink * dy / norm
        return (f'<line x1="{x1:.3f}" y1="{y1:.3f}" x2="{x2:.3f}" '
                f'y2="{y2:.3f}" stroke="{colour}" '
                f'marker-end="url(#{marker})"/>')

    for i, j in sorted(g.edges):
        out.append(line(i, j, "black", "arrow"))
    if _missing_link(g, annotate):
        out.append(line(1, g.vertex_count, "red", "arrow-red"))
    for v in range(1, g.vertex_count + 1):
        x, y = pt(v)
        out.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="{shrink - 2:.1f}" '
                   f'fill="white" stroke="black"/>')
        out.append(f'<text x="{x:.3f}" y="{y - shrink - 2:.3f}" '
                   f'font-size="10" text-anchor="middle">{v}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def web_tikz(g, layout=None, annotate=False, radius=3.0):
    layout = layout or WebLayout(g.vertex_count)
    out = [r"\begin{tikzpicture}[>=stealth]"]
    for v in range(1, g.vertex_count + 1):
        x, y = layout.position(v)
        out.append(rf"\node[circle,draw,inner sep=1pt] (v{v}) at "
                   f"({radius * x:.4f},{radius * y:.4f}) {{{v}}};")
    for i, j in sorted(g.edges):
        out.append(rf"\draw[->] (v{i}) -- (v{j});")
    if _missing_link(g, annotate):
        out.append(rf"\draw[->,red] (v1) -- (v{g.vertex_count});")
    out.append(r"\end{tikzpicture}")
    return "\n".join(out) + "\n"


def render_web(g, fmt="dot", annotate=False):
    if fmt == "dot":
        return web_dot(g)
    if fmt == "svg":
        return web_svg(g, annotate=annotate)
    if fmt == "tikz":
        return web_tikz(g, annotate=annotate)
    raise ValidationError(
        f"format must be one of {', '.join(FORMATS)}, got {fmt!r}")


def pbm_text(pattern):
    """Plain PBM: ``P1``, width and height, then one 0/1 row per line.
    Row 1 of the matrix is the first bitmap row."""
    m = pattern.toarray() if sp.issparse(pattern) else np.asarray(pattern)
    bits = (m != 0).astype(np.uint8)
    h, w = bits.shape
    rows = ["".join("1" if b else "0" for b in row) for row in bits]
    return f"P1\n{w} {h}\n" + "\n".join(rows) + "\n"


def parse_pbm_text(text):
    lines = text.split("\n")
    if lines[0] != "P1":
        raise ValidationError("not a plain PBM bitmap")
    w, h = (int(x) for x in lines[1].split())
    rows = lines[2:2 + h]
    return np.array([[c == "1" for c in row] for row in rows],
                    dtype=bool).reshape(h, w)
