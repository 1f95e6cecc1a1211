"""Static SVG charts rendered directly from artifact arrays.

No external plotting dependency and no timestamps: identical inputs yield
byte-identical files, so plots can be checksummed in regression tests.
"""

from __future__ import annotations

import numpy as np

from .errors import ArgumentError

_W, _H = 720, 480
_MARGIN = {"left": 70, "right": 20, "top": 40, "bottom": 50}
_FONT = "font-family=\"Helvetica, Arial, sans-serif\""


def _fmt(v: float) -> str:
    return format(float(v), ".6g")


class _Canvas:
    """Accumulates SVG elements over a data-space to pixel-space mapping."""

    def __init__(self, x_range, y_range, title=""):
        x_lo, x_hi = (float(v) for v in x_range)
        y_lo, y_hi = (float(v) for v in y_range)
        if x_hi <= x_lo:
            x_hi = x_lo + 1.0
        if y_hi <= y_lo:
            y_hi = y_lo + 1.0
        self.x_lo, self.x_hi, self.y_lo, self.y_hi = x_lo, x_hi, y_lo, y_hi
        self.parts: list[str] = []
        if title:
            self.parts.append(
                f'<text x="{_W // 2}" y="24" text-anchor="middle" '
                f'{_FONT} font-size="16">{_escape(title)}</text>'
            )

    def px(self, x: float) -> float:
        span = _W - _MARGIN["left"] - _MARGIN["right"]
        return _MARGIN["left"] + (x - self.x_lo) / (self.x_hi - self.x_lo) * span

    def py(self, y: float) -> float:
        span = _H - _MARGIN["top"] - _MARGIN["bottom"]
        return _H - _MARGIN["bottom"] - (y - self.y_lo) / (self.y_hi - self.y_lo) * span

    def axes(self, x_label="", y_label=""):
        x0, x1 = _MARGIN["left"], _W - _MARGIN["right"]
        y0, y1 = _H - _MARGIN["bottom"], _MARGIN["top"]
        self.parts.append(
            f'<path d="M {x0} {y1} L {x0} {y0} L {x1} {y0}" '
            'fill="none" stroke="#222" stroke-width="1"/>'
        )
        for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
            xv = self.x_lo + frac * (self.x_hi - self.x_lo)
            yv = self.y_lo + frac * (self.y_hi - self.y_lo)
            self.parts.append(
                f'<text x="{_fmt(self.px(xv))}" y="{y0 + 16}" text-anchor="middle" '
                f'{_FONT} font-size="10">{_fmt(xv)}</text>'
            )
            self.parts.append(
                f'<text x="{x0 - 6}" y="{_fmt(self.py(yv) + 3)}" text-anchor="end" '
                f'{_FONT} font-size="10">{_fmt(yv)}</text>'
            )
        if x_label:
            self.parts.append(
                f'<text x="{_W // 2}" y="{_H - 12}" text-anchor="middle" '
                f'{_FONT} font-size="12">{_escape(x_label)}</text>'
            )
        if y_label:
            self.parts.append(
                f'<text x="16" y="{_H // 2}" text-anchor="middle" {_FONT} '
                f'font-size="12" transform="rotate(-90 16 {_H // 2})">'
                f'{_escape(y_label)}</text>'
            )

    def render(self) -> str:
        body = "\n".join(self.parts)
        return (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
            f'viewBox="0 0 {_W} {_H}">\n'
            f'<rect width="{_W}" height="{_H}" fill="white"/>\n'
            f"{body}\n</svg>\n"
        )


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def bar_chart(labels, values, title="", x_label="") -> str:
    """Horizontal bars, drawn top-down in the order given."""
    values = np.asarray(values, dtype=float)
    if len(labels) != values.shape[0] or values.shape[0] == 0:
        raise ArgumentError("labels and values must be equal-length and non-empty")
    c = _Canvas((0.0, float(values.max()) or 1.0), (0.0, 1.0), title)
    c.axes(x_label=x_label)
    n = len(labels)
    span = _H - _MARGIN["top"] - _MARGIN["bottom"]
    bar_h = span / n * 0.7
    for i, (lab, v) in enumerate(zip(labels, values)):
        yc = _MARGIN["top"] + span * (i + 0.5) / n
        c.parts.append(
            f'<rect x="{_MARGIN["left"]}" y="{_fmt(yc - bar_h / 2)}" '
            f'width="{_fmt(c.px(v) - _MARGIN["left"])}" height="{_fmt(bar_h)}" '
            'fill="#4878b0"/>'
        )
        c.parts.append(
            f'<text x="{_MARGIN["left"] - 6}" y="{_fmt(yc + 3)}" text-anchor="end" '
            f'{_FONT} font-size="10">{_escape(str(lab))}</text>'
        )
    return c.render()


def grouped_bar_chart(labels, series: dict, title="", x_label="") -> str:
    """Two-or-more series of horizontal bars per label (side-by-side)."""
    names = list(series)
    mats = np.asarray([series[k] for k in names], dtype=float)
    if mats.shape[1] != len(labels) or mats.size == 0:
        raise ArgumentError("series lengths must match labels")
    colors = ["#c0504d", "#4878b0", "#6aa56e", "#8064a2"]
    c = _Canvas((0.0, float(mats.max()) or 1.0), (0.0, 1.0), title)
    c.axes(x_label=x_label)
    n, g = len(labels), len(names)
    span = _H - _MARGIN["top"] - _MARGIN["bottom"]
    slot = span / n
    bar_h = slot * 0.8 / g
    for i, lab in enumerate(labels):
        for k in range(g):
            yc = _MARGIN["top"] + slot * i + slot * 0.1 + bar_h * (k + 0.5)
            v = mats[k, i]
            c.parts.append(
                f'<rect x="{_MARGIN["left"]}" y="{_fmt(yc - bar_h / 2)}" '
                f'width="{_fmt(c.px(v) - _MARGIN["left"])}" '
                f'height="{_fmt(bar_h * 0.9)}" fill="{colors[k % len(colors)]}"/>'
            )
        yc = _MARGIN["top"] + slot * (i + 0.5)
        c.parts.append(
            f'<text x="{_MARGIN["left"] - 6}" y="{_fmt(yc + 3)}" text-anchor="end" '
            f'{_FONT} font-size="10">{_escape(str(lab))}</text>'
        )
    for k, name in enumerate(names):
        c.parts.append(
            f'<rect x="{_W - 150}" y="{40 + 16 * k}" width="10" height="10" '
            f'fill="{colors[k % len(colors)]}"/>'
        )
        c.parts.append(
            f'<text x="{_W - 135}" y="{49 + 16 * k}" {_FONT} font-size="11">'
            f"{_escape(str(name))}</text>"
        )
    return c.render()


def line_chart(x, y, title="", x_label="", y_label="", points=None) -> str:
    """Polyline over (x, y); optional faint scatter behind it."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.size < 2:
        raise ArgumentError("need matching x/y with at least 2 points")
    ys = [y]
    if points is not None:
        ys.append(np.asarray(points[1], dtype=float))
    y_all = np.concatenate([v.ravel() for v in ys])
    c = _Canvas((x.min(), x.max()), (y_all.min(), y_all.max()), title)
    c.axes(x_label=x_label, y_label=y_label)
    if points is not None:
        px_, py_ = (np.asarray(v, dtype=float) for v in points)
        for i in range(px_.shape[0]):
            c.parts.append(
                f'<circle cx="{_fmt(c.px(px_[i]))}" cy="{_fmt(c.py(py_[i]))}" '
                'r="1.5" fill="#b0b8c8"/>'
            )
    d = " ".join(
        f"{'M' if i == 0 else 'L'} {_fmt(c.px(x[i]))} {_fmt(c.py(y[i]))}"
        for i in range(x.shape[0])
    )
    c.parts.append(f'<path d="{d}" fill="none" stroke="#c0504d" stroke-width="2"/>')
    return c.render()


def scatter_chart(x, y, color_values=None, title="", x_label="", y_label="") -> str:
    """Scatter with an optional blue-to-red color channel in [0, 1]."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.size == 0:
        raise ArgumentError("need matching, non-empty x/y")
    c = _Canvas((x.min(), x.max()), (y.min(), y.max()), title)
    c.axes(x_label=x_label, y_label=y_label)
    for i in range(x.shape[0]):
        if color_values is None:
            fill = "#4878b0"
        else:
            t = min(max(float(color_values[i]), 0.0), 1.0)
            r = int(round(30 + t * (220 - 30)))
            b = int(round(220 - t * (220 - 60)))
            fill = f"rgb({r},60,{b})"
        c.parts.append(
            f'<circle cx="{_fmt(c.px(x[i]))}" cy="{_fmt(c.py(y[i]))}" '
            f'r="2" fill="{fill}" fill-opacity="0.7"/>'
        )
    return c.render()


def histogram_with_normal(values, bins=30, title="", x_label="") -> str:
    """Density histogram with a same-mean, same-variance normal overlay."""
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        raise ArgumentError("need at least 2 values")
    counts, edges = np.histogram(values, bins=bins, density=True)
    mu, sd = float(values.mean()), float(values.std())
    grid = np.linspace(edges[0], edges[-1], 200)
    pdf = (np.exp(-0.5 * ((grid - mu) / sd) ** 2) / (sd * np.sqrt(2 * np.pi))
           if sd > 0 else np.zeros_like(grid))
    top = max(float(counts.max()), float(pdf.max()) if sd > 0 else 0.0) or 1.0
    c = _Canvas((edges[0], edges[-1]), (0.0, top), title)
    c.axes(x_label=x_label, y_label="density")
    y0 = c.py(0.0)
    for k in range(len(counts)):
        x_left, x_right = c.px(edges[k]), c.px(edges[k + 1])
        y_top = c.py(counts[k])
        c.parts.append(
            f'<rect x="{_fmt(x_left)}" y="{_fmt(y_top)}" '
            f'width="{_fmt(x_right - x_left)}" height="{_fmt(y0 - y_top)}" '
            'fill="#4878b0" fill-opacity="0.6" stroke="#2f5580" stroke-width="0.5"/>'
        )
    if sd > 0:
        d = " ".join(
            f"{'M' if i == 0 else 'L'} {_fmt(c.px(grid[i]))} {_fmt(c.py(pdf[i]))}"
            for i in range(grid.shape[0])
        )
        c.parts.append(f'<path d="{d}" fill="none" stroke="#c0504d" stroke-width="2"/>')
    return c.render()
