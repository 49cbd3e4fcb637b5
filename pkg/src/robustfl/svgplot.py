"""Minimal static SVG line plots (no plotting dependency)."""

from __future__ import annotations

from html import escape

import numpy as np

COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** np.floor(np.log10(raw))
    step = min((s * mag for s in (1, 2, 5, 10) if s * mag >= raw), default=raw)
    start = np.ceil(lo / step) * step
    return [float(v) for v in np.arange(start, hi + step * 1e-9, step)]


def _panel(series, labels, y_label, x0, y0, w, h, ylim=None) -> list[str]:
    out = []
    tmax = max((len(s) - 1 for s in series), default=1) or 1
    finite = np.concatenate([np.asarray(s)[np.isfinite(s)] for s in series]) if series else np.zeros(1)
    lo, hi = (float(finite.min()), float(finite.max())) if ylim is None else ylim
    if hi - lo < 1e-12:
        lo, hi = lo - 1, hi + 1
    pad = 0.05 * (hi - lo)
    lo, hi = lo - pad, hi + pad

    def px(t):
        return x0 + w * t / tmax

    def py(v):
        return y0 + h * (1 - (np.clip(v, lo, hi) - lo) / (hi - lo))

    out.append(f'<rect x="{x0}" y="{y0}" width="{w}" height="{h}" fill="none" stroke="#444"/>')
    for v in _ticks(lo, hi):
        y = py(v)
        out.append(f'<line x1="{x0 - 4}" y1="{y:.1f}" x2="{x0}" y2="{y:.1f}" stroke="#444"/>')
        out.append(f'<text x="{x0 - 6}" y="{y + 4:.1f}" font-size="11" text-anchor="end">{v:g}</text>')
    for v in _ticks(0, tmax):
        x = px(v)
        out.append(f'<line x1="{x:.1f}" y1="{y0 + h}" x2="{x:.1f}" y2="{y0 + h + 4}" stroke="#444"/>')
        out.append(f'<text x="{x:.1f}" y="{y0 + h + 16}" font-size="11" text-anchor="middle">{v:g}</text>')
    out.append(
        f'<text x="{x0 - 42}" y="{y0 + h / 2}" font-size="13" text-anchor="middle" '
        f'transform="rotate(-90 {x0 - 42} {y0 + h / 2})">{escape(y_label)}</text>'
    )
    for i, s in enumerate(series):
        s = np.asarray(s, dtype=float)
        pts = " ".join(f"{px(t):.2f},{py(v):.2f}" for t, v in enumerate(s) if np.isfinite(v))
        out.append(f'<polyline fill="none" stroke="{COLORS[i % len(COLORS)]}" stroke-width="1.6" points="{pts}"/>')
    for i, lab in enumerate(labels):
        ly = y0 + 14 + 16 * i
        c = COLORS[i % len(COLORS)]
        out.append(f'<line x1="{x0 + w - 190}" y1="{ly - 4}" x2="{x0 + w - 170}" y2="{ly - 4}" stroke="{c}" stroke-width="2"/>')
        out.append(f'<text x="{x0 + w - 165}" y="{ly}" font-size="11">{escape(lab)}</text>')
    return out


def state_trajectories_svg(trajectories, labels, reference=None, title="", ylim_pad: float = 4.0) -> str:
    """One panel per state coordinate, one polyline per trajectory.

    ``trajectories`` are ``(steps+1, n)`` arrays. The y-range is clipped to a
    window around the reference so one diverging run cannot flatten the rest.
    """
    trajectories = [np.asarray(t, dtype=float) for t in trajectories]
    n = trajectories[0].shape[1]
    W, ph, left, top = 720, 220, 70, 40
    H = top + n * (ph + 40) + 10
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<text x="{W / 2}" y="22" font-size="14" text-anchor="middle">{escape(title)}</text>',
    ]
    for i in range(n):
        ylim = None
        if reference is not None:
            r = float(reference[i])
            span = ylim_pad * max(1.0, abs(r))
            ylim = (r - span, r + span)
            data = np.concatenate([t[:, i] for t in trajectories])
            data = data[np.isfinite(data)]
            if data.size:
                ylim = (max(ylim[0], float(data.min())), min(ylim[1], float(data.max())))
                if ylim[1] <= ylim[0]:
                    ylim = None
        parts += _panel([t[:, i] for t in trajectories], labels, f"x{i + 1}(t)", left, top + i * (ph + 40), W - left - 20, ph, ylim)
    parts.append(f'<text x="{W / 2}" y="{H - 4}" font-size="12" text-anchor="middle">t</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
