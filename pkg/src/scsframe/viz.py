"""Dissimilarity histograms and cluster superimposition drawings, written as plain SVG."""
import csv
from collections import Counter
from pathlib import Path

import numpy as np

from .generators import problem_of

N_BINS = 100
# diverging ramp endpoints (cool blue, neutral, warm red)
RAMP = ((59, 76, 192), (221, 221, 221), (180, 4, 38))
# SP edges show when shared by anyone; tours and packings need a majority
VISIBLE_ABOVE = {"sp-grid": 0.0, "sp-eud": 0.0, "sp-graph": 0.0, "tsp": 0.5, "spp": 0.5}


def histogram_percentages(matrix):
    """Share of all unordered pairs per 0.01-wide bin; the last bin is closed at 1."""
    matrix = np.asarray(matrix, dtype=float)
    n = matrix.shape[0]
    if n < 2:
        raise ValueError("histogram needs at least two solutions")
    d = matrix[np.triu_indices(n, k=1)]
    # Jaccard values are ratios; the epsilon keeps e.g. 0.29 from landing in bin 28
    idx = np.minimum(np.floor(d * N_BINS + 1e-9).astype(np.int64), N_BINS - 1)
    counts = np.bincount(idx, minlength=N_BINS)
    return 100.0 * counts / len(d), len(d)


def _svg(width, height, body):
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">\n'
        f'<rect width="{width}" height="{height}" fill="white"/>\n'
    )
    return head + "\n".join(body) + "\n</svg>\n"


def histogram_svg(pct, title=""):
    w, h, left, bottom, top = 640, 360, 50, 40, 30
    pw, ph = w - left - 20, h - bottom - top
    ymax = max(float(np.max(pct)), 1e-12)
    body = [f'<text x="{w / 2:.1f}" y="20" text-anchor="middle" font-size="14">{title}</text>']
    bw = pw / N_BINS
    for k, p in enumerate(pct):
        if p <= 0:
            continue
        bh = ph * p / ymax
        body.append(
            f'<rect x="{left + k * bw:.2f}" y="{top + ph - bh:.2f}" width="{bw:.2f}" '
            f'height="{bh:.2f}" fill="#4c72b0"/>'
        )
    body.append(f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>')
    body.append(f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>')
    for t in (0.0, 0.25, 0.5, 0.75, 1.0):
        x = left + t * pw
        body.append(f'<text x="{x:.1f}" y="{top + ph + 15}" text-anchor="middle" font-size="10">{t:.2f}</text>')
    body.append(f'<text x="{left + pw / 2:.1f}" y="{h - 5}" text-anchor="middle" font-size="11">dissimilarity</text>')
    body.append(f'<text x="12" y="{top - 8}" font-size="10">{ymax:.2f}%</text>')
    return _svg(w, h, body)


def export_histogram(matrix, path, title=None):
    """Write ``path`` (CSV: bin_lo, bin_hi, pct) and a sibling .svg; returns the percentages."""
    pct, pairs = histogram_percentages(matrix)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["bin_lo", "bin_hi", "pct"])
        for k in range(N_BINS):
            w.writerow([f"{k / N_BINS:.2f}", f"{(k + 1) / N_BINS:.2f}", f"{pct[k]:.12g}"])
    title = title if title is not None else f"{pairs} pairs"
    path.with_suffix(".svg").write_text(histogram_svg(pct, title))
    return pct


def sharing_ratios(element_sets):
    """Fraction of the cluster's solutions containing each element."""
    element_sets = list(element_sets)
    if not element_sets:
        raise ValueError("empty cluster")
    cnt = Counter(e for s in element_sets for e in set(s))
    k = len(element_sets)
    return {e: c / k for e, c in cnt.items()}


def ramp_color(r):
    """Cool-to-warm colour for r in [0, 1]."""
    r = min(max(float(r), 0.0), 1.0)
    if r <= 0.5:
        a, b, f = RAMP[0], RAMP[1], r / 0.5
    else:
        a, b, f = RAMP[1], RAMP[2], (r - 0.5) / 0.5
    rgb = [round(x + (y - x) * f) for x, y in zip(a, b)]
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def _colorbar(x, y, w, lo):
    body = []
    steps = 50
    for k in range(steps):
        r = lo + (1 - lo) * (k + 0.5) / steps
        body.append(
            f'<rect x="{x + k * w / steps:.2f}" y="{y}" width="{w / steps + 0.05:.2f}" height="12" fill="{ramp_color(r)}"/>'
        )
    body.append(f'<text x="{x}" y="{y + 26}" font-size="10" text-anchor="middle">{lo:.1f}</text>')
    body.append(f'<text x="{x + w}" y="{y + 26}" font-size="10" text-anchor="middle">1.0</text>')
    body.append(f'<text x="{x + w / 2:.1f}" y="{y + 26}" font-size="10" text-anchor="middle">sharing ratio</text>')
    return body


def visible_elements(ratios, kind):
    cut = VISIBLE_ABOVE[kind]
    return {e: r for e, r in ratios.items() if r > cut}


def export_superimposition(instance, element_sets, path, title=None, spp_view="sets"):
    """Overlay a cluster's solutions on the instance, coloured by sharing ratio.

    SPP elements are set indices, or grid cells with ``spp_view='cells'``.
    """
    try:
        kind = problem_of(instance)
    except TypeError:
        raise ValueError("superimposition needs an SP, TSP or SPP instance") from None
    if kind.startswith("sp-") and instance.coords is None:
        raise ValueError("graph has no coordinates to draw")
    element_sets = list(element_sets)
    ratios = sharing_ratios(element_sets)
    shown = visible_elements(ratios, kind)
    size, pad, bar = 480, 30, 50
    w, h = size + 2 * pad, size + 2 * pad + bar + 20
    title = title if title is not None else f"cluster of {len(element_sets)} solutions"
    body = [f'<text x="{w / 2:.1f}" y="20" text-anchor="middle" font-size="14">{title}</text>']

    def place(xy, lo, hi):
        span = np.where(hi - lo > 0, hi - lo, 1.0)
        q = (np.asarray(xy, dtype=float) - lo) / span
        return pad + q[..., 0] * size, pad + 20 + (1 - q[..., 1]) * size

    if kind.startswith("sp-") or kind == "tsp":
        pts = np.asarray(instance.coords if kind.startswith("sp-") else instance.points, dtype=float)
        lo, hi = pts.min(axis=0), pts.max(axis=0)
        xs, ys = place(pts, lo, hi)
        if kind.startswith("sp-"):
            for u, v in instance.edges.tolist():
                body.append(
                    f'<line x1="{xs[u]:.2f}" y1="{ys[u]:.2f}" x2="{xs[v]:.2f}" y2="{ys[v]:.2f}" '
                    f'stroke="#e6e6e6" stroke-width="1"/>'
                )
        for (u, v), r in sorted(shown.items(), key=lambda kv: (kv[1], kv[0])):
            body.append(
                f'<line x1="{xs[u]:.2f}" y1="{ys[u]:.2f}" x2="{xs[v]:.2f}" y2="{ys[v]:.2f}" '
                f'stroke="{ramp_color(r)}" stroke-width="3" data-ratio="{r:.6f}"/>'
            )
        rad = 2.5 if len(pts) <= 200 else 1.5
        for k in range(len(pts)):
            body.append(f'<circle cx="{xs[k]:.2f}" cy="{ys[k]:.2f}" r="{rad}" fill="#555555"/>')
        if kind.startswith("sp-"):
            for v, lab in ((instance.s, "s"), (instance.t, "t")):
                body.append(f'<text x="{xs[v] + 4:.2f}" y="{ys[v] - 4:.2f}" font-size="12">{lab}</text>')
    else:
        cw, ch = size / instance.n2, size / instance.n1
        for x in range(instance.n1 + 1):
            body.append(f'<line x1="{pad}" y1="{pad + 20 + x * ch:.2f}" x2="{pad + size}" y2="{pad + 20 + x * ch:.2f}" stroke="#e6e6e6"/>')
        for y in range(instance.n2 + 1):
            body.append(f'<line x1="{pad + y * cw:.2f}" y1="{pad + 20}" x2="{pad + y * cw:.2f}" y2="{pad + 20 + size}" stroke="#e6e6e6"/>')
        for j, r in sorted(shown.items(), key=lambda kv: (kv[1], kv[0])):
            if spp_view == "cells":
                a1 = b1 = int(j) // instance.n2
                a2 = b2 = int(j) % instance.n2
            else:
                a1, b1, a2, b2 = (int(v) for v in instance.rects[int(j)])
            body.append(
                f'<rect x="{pad + a2 * cw:.2f}" y="{pad + 20 + a1 * ch:.2f}" width="{(b2 - a2 + 1) * cw:.2f}" '
                f'height="{(b1 - a1 + 1) * ch:.2f}" fill="{ramp_color(r)}" fill-opacity="0.8" '
                f'stroke="black" stroke-width="0.5" data-ratio="{r:.6f}"/>'
            )
    body += _colorbar(pad, h - bar + 5, size, 0.0)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(_svg(w, h, body))
    return shown
