"""Minimal SVG 1.1 trajectory plots with byte-stable output."""

from __future__ import annotations

import numpy as np

__all__ = ["PALETTE", "render_trajectories"]

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")


def _fmt(x):
    s = f"{x:.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def render_trajectories(positions, blocks=None, size: int = 480, margin: float = 0.05,
                        title: str | None = None) -> str:
    """One polyline per particle; members of a block share a colour.

    ``positions`` has shape ``(samples, n, 2)``.  ``blocks`` is a list of
    1-based particle label groups; by default every particle is its own
    block.  The view box is the data bounding box padded by ``margin``.
    """
    pos = np.asarray(positions, dtype=float)
    if pos.ndim != 3 or pos.shape[2] != 2 or pos.shape[0] == 0:
        raise ValueError("positions must have shape (samples, n, 2) with samples >= 1")
    n = pos.shape[1]
    if blocks is None:
        blocks = [[i] for i in range(1, n + 1)]
    colour = {}
    for b, members in enumerate(blocks):
        for i in members:
            colour[int(i)] = PALETTE[b % len(PALETTE)]

    lo = pos.reshape(-1, 2).min(axis=0)
    hi = pos.reshape(-1, 2).max(axis=0)
    span = float(max(hi[0] - lo[0], hi[1] - lo[1], 1e-9))
    pad = margin * span
    x0, y0 = lo[0] - pad, lo[1] - pad
    w = (hi[0] - lo[0]) + 2 * pad
    h = (hi[1] - lo[1]) + 2 * pad
    scale = size / max(w, h)
    W, H = w * scale, h * scale
    stroke = _fmt(max(W, H) / 300)
    dot = _fmt(max(W, H) / 120)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_fmt(W)}" height="{_fmt(H)}" '
        f'viewBox="0 0 {_fmt(W)} {_fmt(H)}">',
    ]
    if title:
        esc = title.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
        out.append(f"<title>{esc}</title>")
    out.append('<rect width="100%" height="100%" fill="white"/>')
    for i in range(1, n + 1):
        xs = (pos[:, i - 1, 0] - x0) * scale
        ys = H - (pos[:, i - 1, 1] - y0) * scale
        pts = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in zip(xs, ys))
        out.append(f'<polyline id="p{i}" fill="none" stroke="{colour.get(i, "#000000")}" '
                   f'stroke-width="{stroke}" points="{pts}"/>')
        out.append(f'<circle cx="{_fmt(xs[0])}" cy="{_fmt(ys[0])}" r="{dot}" '
                   f'fill="{colour.get(i, "#000000")}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
