"""Small deterministic SVG emitter for regions and point clouds.

Output is plain text built with fixed-precision formatting, so rendering
the same scene twice yields byte-identical files.
"""

from __future__ import annotations

import numpy as np

from .errors import EmptyInput

_PALETTE = {
    "region": ("#1f77b4", "none"),
    "fill": ("#1f77b4", "#1f77b422"),
    "accent": ("#d62728", "none"),
    "cloud": ("#2ca02c", "#2ca02c"),
    "muted": ("#7f7f7f", "#7f7f7f"),
}


def _fmt(x: float) -> str:
    return f"{x:.3f}"


class Scene:
    """Collects polygons and point clouds, then renders one SVG document."""

    def __init__(self, width: int = 640, height: int = 640, margin: float = 0.08):
        self.width = width
        self.height = height
        self.margin = margin
        self._items: list[tuple[str, np.ndarray, str]] = []

    def add_polygon(self, vertices, style: str = "region") -> "Scene":
        pts = np.asarray(vertices, dtype=np.complex128).ravel()
        if pts.size:
            self._items.append(("polygon", pts, style))
        return self

    def add_points(self, points, style: str = "cloud") -> "Scene":
        pts = np.asarray(points, dtype=np.complex128).ravel()
        if pts.size:
            self._items.append(("points", pts, style))
        return self

    def render(self) -> str:
        if not self._items:
            raise EmptyInput("nothing to render")
        allpts = np.concatenate([p for _, p, _ in self._items])
        x0, x1 = float(allpts.real.min()), float(allpts.real.max())
        y0, y1 = float(allpts.imag.min()), float(allpts.imag.max())
        span = max(x1 - x0, y1 - y0, 1e-9)
        pad = self.margin * span
        x0, x1 = x0 - pad, x1 + pad
        y0, y1 = y0 - pad, y1 + pad
        span_x, span_y = x1 - x0, y1 - y0
        scale = min(self.width / span_x, self.height / span_y)
        off_x = (self.width - scale * span_x) / 2.0
        off_y = (self.height - scale * span_y) / 2.0

        def to_px(z: complex) -> tuple[float, float]:
            return (
                off_x + (z.real - x0) * scale,
                self.height - off_y - (z.imag - y0) * scale,
            )

        lines = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
            f'height="{self.height}" viewBox="0 0 {self.width} {self.height}">',
            f'<rect width="{self.width}" height="{self.height}" fill="#ffffff"/>',
        ]
        if x0 < 0 < x1:
            px = to_px(0j)[0]
            lines.append(
                f'<line x1="{_fmt(px)}" y1="0" x2="{_fmt(px)}" y2="{self.height}" '
                'stroke="#dddddd" stroke-width="1"/>'
            )
        if y0 < 0 < y1:
            py = to_px(0j)[1]
            lines.append(
                f'<line x1="0" y1="{_fmt(py)}" x2="{self.width}" y2="{_fmt(py)}" '
                'stroke="#dddddd" stroke-width="1"/>'
            )
        for kind, pts, style in self._items:
            stroke, fill = _PALETTE.get(style, _PALETTE["region"])
            if kind == "polygon":
                coords = " ".join(
                    f"{_fmt(px)},{_fmt(py)}" for px, py in (to_px(z) for z in pts)
                )
                lines.append(
                    f'<polygon points="{coords}" stroke="{stroke}" fill="{fill}" '
                    'stroke-width="1.5"/>'
                )
            else:
                for z in pts:
                    px, py = to_px(z)
                    lines.append(
                        f'<circle cx="{_fmt(px)}" cy="{_fmt(py)}" r="2" '
                        f'fill="{fill}" stroke="none"/>'
                    )
        lines.append("</svg>")
        return "\n".join(lines) + "\n"
