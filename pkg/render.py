"""
Deterministic SVG and DOT emitters.

Everything is built as plain strings from sorted inputs with rounded
coordinates and a fixed viewBox, so identical inputs give byte-identical
files.
"""
import math

import numpy as np

from config import SVG_HEIGHT, SVG_PRECISION, SVG_WIDTH

ns_svg = "http://www.w3.org/2000/svg"

UPPER_COLOR = "#1f77b4"
LOWER_COLOR = "#d62728"
PATH_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"]


##
## basic tools
##

def demangle(k):
    return k.replace("_", "-")


def rounder(x, prec=SVG_PRECISION):
    if isinstance(x, (float, np.floating)):
        xr = round(float(x), ndigits=prec)
        if (xr % 1) == 0:
            return int(xr)
        return xr
    return x


def props_repr(d):
    return " ".join(f'{demangle(k)}="{rounder(v)}"' for k, v in d.items())


def element(tag, text=None, **props):
    if text is None:
        return f"<{tag} {props_repr(props)} />"
    return f"<{tag} {props_repr(props)}>{text}</{tag}>"


def document(children, width=SVG_WIDTH, height=SVG_HEIGHT):
    head = f'<svg {props_repr(dict(width=width, height=height, viewBox=f"0 0 {width} {height}", xmlns=ns_svg))}>'
    return "\n".join([head, *("  " + c for c in children), "</svg>"]) + "\n"


def polyline_points(points):
    return " ".join(f"{rounder(x)},{rounder(y)}" for x, y in points)


##
## meanders
##

def meander_svg(n, upper, lower, width=SVG_WIDTH, height=SVG_HEIGHT):
    """Vertices on a horizontal axis, upper arches above it and lower arches below."""
    margin = 20
    step = (width - 2 * margin) / max(n - 1, 1)
    axis_y = height / 2

    def x(v):
        return margin + (v - 1) * step

    children = [element("line", x1=0, y1=axis_y, x2=width, y2=axis_y, stroke="black", stroke_width=1)]
    for arches, sweep, color in ((upper, 1, UPPER_COLOR), (lower, 0, LOWER_COLOR)):
        for a, b in sorted(arches):
            r = (x(b) - x(a)) / 2
            d = f"M {rounder(x(a))} {rounder(axis_y)} A {rounder(r)} {rounder(r)} 0 0 {sweep} {rounder(x(b))} {rounder(axis_y)}"
            children.append(element("path", d=d, fill="none", stroke=color, stroke_width=1.5))
    for v in range(1, n + 1):
        children.append(element("circle", cx=x(v), cy=axis_y, r=3, fill="black"))
    return document(children, width, height)


def meander_dot(n, upper, lower, cycles=None, name="meander"):
    """Graphviz DOT: vertices, upper/lower arch edges, one cluster per component."""
    lines = [f"graph {name} {{", "  node [shape=circle];"]
    for k, cycle in enumerate(cycles or [list(range(1, n + 1))]):
        lines.append(f"  subgraph cluster_{k} {{")
        lines.append(f'    label="component {k + 1}";')
        lines.append("    " + " ".join(f"v{v};" for v in sorted(cycle)))
        lines.append("  }")
    for a, b in sorted(upper):
        lines.append(f'  v{a} -- v{b} [color="{UPPER_COLOR}", label="upper"];')
    for a, b in sorted(lower):
        lines.append(f'  v{a} -- v{b} [color="{LOWER_COLOR}", label="lower"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


##
## billiards
##

def billiard_svg(cells, paths, width=SVG_WIDTH, height=SVG_HEIGHT):
    """Grid cells as squares (row 1 at the bottom) and each flight path as a closed polyline."""
    cells = sorted(cells)
    k = max(max(r for r, _ in cells), max(c for _, c in cells))
    margin = 20
    unit = (min(width, height) - 2 * margin) / k

    def point(x, y):
        return margin + x * unit, height - margin - y * unit

    children = []
    for r, c in cells:
        px, py = point(c - 1, r)
        children.append(element("rect", x=px, y=py, width=unit, height=unit,
                                fill="#eeeeee", stroke="#999999", stroke_width=1))
    for idx, path in enumerate(paths):
        pts = [point(x, y) for x, y in path] + [point(*path[0])]
        children.append(element("polyline", points=polyline_points(pts), fill="none",
                                stroke=PATH_COLORS[idx % len(PATH_COLORS)], stroke_width=2))
    return document(children, width, height)


##
## shooting curve
##

def shooting_svg(v1, w1, width=SVG_WIDTH, height=SVG_HEIGHT):
    """The shooting meander in the (v, v_x) plane at x = 1; NaN samples split the curve."""
    v1 = np.asarray(v1, dtype=float)
    w1 = np.asarray(w1, dtype=float)
    finite = np.isfinite(v1) & np.isfinite(w1)
    margin = 20
    if finite.any():
        vmax = max(np.max(np.abs(v1[finite])), 1e-12)
        wmax = max(np.max(np.abs(w1[finite])), 1e-12)
    else:
        vmax = wmax = 1.0

    def point(v, w):
        return (width / 2 + v / vmax * (width / 2 - margin),
                height / 2 - w / wmax * (height / 2 - margin))

    children = [
        element("line", x1=0, y1=height / 2, x2=width, y2=height / 2, stroke="black", stroke_width=1),
        element("line", x1=width / 2, y1=0, x2=width / 2, y2=height, stroke="#999999", stroke_width=1),
    ]
    segment = []
    for ok, v, w in zip(finite, v1, w1):
        if ok:
            segment.append(point(v, w))
            continue
        if len(segment) > 1:
            children.append(element("polyline", points=polyline_points(segment), fill="none",
                                    stroke=UPPER_COLOR, stroke_width=1.5))
        segment = []
    if len(segment) > 1:
        children.append(element("polyline", points=polyline_points(segment), fill="none",
                                stroke=UPPER_COLOR, stroke_width=1.5))
    return document(children, width, height)


##
## Kasner circle
##

def kasner_svg(d, corner_angles, near_arcs=None, thetas=None, corners=None,
               width=SVG_WIDTH, height=SVG_HEIGHT):
    """
    Unit circle, the three emanation points, optional arcs (drawn thick on
    the circle) and orbit chords through the corner that produced each step.
    """
    size = min(width, height)
    scale = (size / 2 - 20) / max(d, 1.0)
    cx, cy = width / 2, height / 2

    def point(z):
        return cx + scale * z.real, cy - scale * z.imag

    px, py = point(0j)
    children = [element("circle", cx=px, cy=py, r=scale, fill="none", stroke="black", stroke_width=1)]
    for angle in corner_angles:
        qx, qy = point(d * complex(math.cos(angle), math.sin(angle)))
        children.append(element("circle", cx=qx, cy=qy, r=4, fill="black"))

    for lo, hi in (near_arcs or []):
        a, b = point(complex(math.cos(lo), math.sin(lo))), point(complex(math.cos(hi), math.sin(hi)))
        large = 1 if hi - lo > math.pi else 0
        path = f"M {rounder(a[0])} {rounder(a[1])} A {rounder(scale)} {rounder(scale)} 0 {large} 0 {rounder(b[0])} {rounder(b[1])}"
        children.append(element("path", d=path, fill="none", stroke=LOWER_COLOR, stroke_width=4))

    if thetas is not None and len(thetas) > 1:
        for k in range(len(thetas) - 1):
            a = point(complex(math.cos(thetas[k]), math.sin(thetas[k])))
            b = point(complex(math.cos(thetas[k + 1]), math.sin(thetas[k + 1])))
            color = PATH_COLORS[(corners[k] - 1) % len(PATH_COLORS)] if corners else UPPER_COLOR
            children.append(element("line", x1=a[0], y1=a[1], x2=b[0], y2=b[1], stroke=color, stroke_width=1))
    return document(children, width, height)
