"""Static SVG diagrams of arc data and chord matchings on the unit disk.

The drawing uses the viewBox ``-1.1 -1.1 2.2 2.2`` with the y axis flipped
by hand (SVG y grows downward), so counterclockwise arcs are drawn with
sweep flag 0.
"""

from __future__ import annotations

import math

from .solver import region_labels

VIEWBOX = "-1.1 -1.1 2.2 2.2"


def _xy(theta):
    return f"{math.cos(theta):.9f} {-math.sin(theta):.9f}"


def _arc_path(t0, width):
    large = 1 if width > math.pi else 0
    return f"M {_xy(t0)} A 1 1 0 {large} 0 {_xy(t0 + width)}"


def face_path(face, datum):
    parts = []
    for k, a in enumerate(face.arcs):
        t0 = datum.angles[a]
        w = datum.gap_after(a)
        large = 1 if w > math.pi else 0
        parts.append(("M " if k == 0 else "L ") + _xy(t0))
        parts.append(f"A 1 1 0 {large} 0 {_xy(t0 + w)}")
    return " ".join(parts) + " Z"


def render_svg(datum, pairs=(), title=None, size=480, fill="#9ecae1", chord_color="#08519c"):
    """SVG text: unit circle, arcs of ``F`` stroked, chords drawn, in-faces shaded."""
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="{VIEWBOX}">',
    ]
    if title:
        out.append(f"<title>{title}</title>")
    out.append('<rect x="-1.1" y="-1.1" width="2.2" height="2.2" fill="white"/>')
    if pairs:
        region = region_labels(pairs, datum)
        for face in region.faces:
            if face.label == "in":
                out.append(f'<path d="{face_path(face, datum)}" fill="{fill}" stroke="none"/>')
    out.append('<circle cx="0" cy="0" r="1" fill="none" stroke="#888888" stroke-width="0.004"/>')
    for k in range(0, len(datum.angles), 2):
        t0 = datum.angles[k]
        w = datum.gap_after(k)
        out.append(f'<path d="{_arc_path(t0, w)}" fill="none" stroke="#d62728" stroke-width="0.02"/>')
    for i, j in pairs:
        a, b = datum.angles[i], datum.angles[j]
        out.append(
            f'<line x1="{math.cos(a):.9f}" y1="{-math.sin(a):.9f}" x2="{math.cos(b):.9f}" y2="{-math.sin(b):.9f}" '
            f'stroke="{chord_color}" stroke-width="0.006"/>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
