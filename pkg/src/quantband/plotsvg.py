"""Static SVG rendering of step bands.

Hand-rolled so that identical inputs give byte-identical files.  Each band
bound is drawn as one horizontal segment per grid point (the step pieces);
values outside the viewport, including infinities, are clamped to its
edges.
"""

from __future__ import annotations

import numpy as np

MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 50.0, 15.0, 15.0, 35.0


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def _finite(*arrays):
    vals = []
    for a in arrays:
        if a is None:
            continue
        a = np.asarray(a, dtype=np.float64)
        vals.append(a[np.isfinite(a)])
    return np.concatenate(vals) if vals else np.empty(0)


def render_svg(
    z,
    lower,
    upper,
    data_xy=None,
    refined=None,
    curve_xy=None,
    width: int = 800,
    height: int = 500,
) -> str:
    """SVG for a band (z, lower, upper) with optional overlays.

    data_xy: (x, y) observations; refined: (lower, upper) arrays on the
    same grid; curve_xy: (x, y) reference curve.
    """
    z = np.asarray(z, dtype=np.float64)
    lower = np.asarray(lower, dtype=np.float64)
    upper = np.asarray(upper, dtype=np.float64)
    if len(z) == 0:
        raise ValueError("band is empty")

    xs = [z]
    ys = [lower, upper]
    if data_xy is not None:
        xs.append(np.asarray(data_xy[0], dtype=np.float64))
        ys.append(np.asarray(data_xy[1], dtype=np.float64))
    if refined is not None:
        ys.extend([np.asarray(refined[0], dtype=np.float64), np.asarray(refined[1], dtype=np.float64)])
    if curve_xy is not None:
        xs.append(np.asarray(curve_xy[0], dtype=np.float64))
        ys.append(np.asarray(curve_xy[1], dtype=np.float64))

    xv = _finite(*xs)
    yv = _finite(*ys)
    x0, x1 = (float(xv.min()), float(xv.max())) if len(xv) else (0.0, 1.0)
    y0, y1 = (float(yv.min()), float(yv.max())) if len(yv) else (0.0, 1.0)
    if x1 <= x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 <= y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    xpad = 0.02 * (x1 - x0)
    ypad = 0.05 * (y1 - y0)
    x0, x1 = x0 - xpad, x1 + xpad
    y0, y1 = y0 - ypad, y1 + ypad

    px0, px1 = MARGIN_L, width - MARGIN_R
    py0, py1 = height - MARGIN_B, MARGIN_T  # y axis grows upward

    def sx(v):
        return px0 + (v - x0) / (x1 - x0) * (px1 - px0)

    def sy(v):
        if v == np.inf or v > y1:
            v = y1
        elif v == -np.inf or v < y0:
            v = y0
        return py0 + (v - y0) / (y1 - y0) * (py1 - py0)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="{_fmt(px0)}" y="{_fmt(py1)}" width="{_fmt(px1 - px0)}" '
        f'height="{_fmt(py0 - py1)}" fill="none" stroke="#999" stroke-width="1"/>',
    ]
    d = len(z)

    def hseg(cls, xa, xb, yv, color):
        out.append(
            f'<line class="{cls}" x1="{_fmt(sx(xa) if np.isfinite(xa) else px0)}" '
            f'y1="{_fmt(sy(yv))}" x2="{_fmt(sx(xb) if np.isfinite(xb) else px1)}" '
            f'y2="{_fmt(sy(yv))}" stroke="{color}" stroke-width="1.4"/>'
        )

    # lower is constant on [z_j, z_{j+1}); upper on (z_{j-1}, z_j]
    for j in range(d):
        xa = z[j]
        xb = z[j + 1] if j + 1 < d else np.inf
        hseg("band-lower", xa, xb, lower[j], "#000")
    for j in range(d):
        xa = z[j - 1] if j >= 1 else -np.inf
        xb = z[j]
        hseg("band-upper", xa, xb, upper[j], "#000")
    if refined is not None:
        rl, ru = refined
        for j in range(d):
            hseg("refined-lower", z[j], z[j + 1] if j + 1 < d else np.inf, rl[j], "#15c")
        for j in range(d):
            hseg("refined-upper", z[j - 1] if j >= 1 else -np.inf, z[j], ru[j], "#15c")
    if data_xy is not None:
        dx, dy = data_xy
        for xi, yi in zip(dx, dy):
            out.append(
                f'<circle class="obs" cx="{_fmt(sx(xi))}" cy="{_fmt(sy(yi))}" '
                f'r="1.6" fill="#c33" fill-opacity="0.55"/>'
            )
    if curve_xy is not None:
        cx, cy = curve_xy
        pts = " ".join(f"{_fmt(sx(a))},{_fmt(sy(b))}" for a, b in zip(cx, cy))
        out.append(
            f'<polyline class="ref-curve" points="{pts}" fill="none" '
            f'stroke="#292" stroke-width="1.2" stroke-dasharray="4 3"/>'
        )
    # axis extent labels
    out.append(
        f'<text x="{_fmt(px0)}" y="{_fmt(py0 + 16)}" font-size="11" '
        f'fill="#333">{_fmt(x0)}</text>'
    )
    out.append(
        f'<text x="{_fmt(px1 - 40)}" y="{_fmt(py0 + 16)}" font-size="11" '
        f'fill="#333">{_fmt(x1)}</text>'
    )
    out.append(
        f'<text x="4" y="{_fmt(py0)}" font-size="11" fill="#333">{_fmt(y0)}</text>'
    )
    out.append(
        f'<text x="4" y="{_fmt(py1 + 10)}" font-size="11" fill="#333">{_fmt(y1)}</text>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"
