"""CSV, JSON and SVG writers for experiment results.

Files are rendered to strings first and then written atomically, so a
failed run never leaves a partial file behind.
"""

from __future__ import annotations

import json
import os
import tempfile
from datetime import datetime, timezone
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .ensemble import EnsembleSeries


def fmt(x) -> str:
    """Round-trip-safe decimal with 17 significant digits."""
    return f"{float(x):.17g}"


def timestamp() -> str:
    return f"generated {datetime.now(timezone.utc).isoformat(timespec='seconds')}"


def series_csv(series: EnsembleSeries, spec_echo: dict | None = None, stamp: bool = True) -> str:
    lines = []
    if stamp:
        lines.append("# " + timestamp())
    if spec_echo is not None:
        lines.append("# spec " + json.dumps(spec_echo, sort_keys=True, separators=(",", ":")))
    lines.append(f"{series.grid_name},mean,stderr,n")
    for g, m, s in zip(series.grid, series.mean, series.stderr):
        lines.append(f"{fmt(g)},{fmt(m)},{fmt(s)},{series.n}")
    return "\n".join(lines) + "\n"


def table_csv(header: list[str], rows: list[list], comments: list[str] = ()) -> str:
    lines = [f"# {c}" for c in comments]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(v if isinstance(v, str) else str(v) if isinstance(v, int) else fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def check_writable(path) -> Path:
    """Fail early if the directory of ``path`` cannot take a new file."""
    path = Path(path)
    parent = path.parent if str(path.parent) else Path(".")
    if not parent.is_dir():
        raise FileNotFoundError(f"output directory {str(parent)!r} does not exist")
    if not os.access(parent, os.W_OK):
        raise PermissionError(f"output directory {str(parent)!r} is not writable")
    return path


def write_atomic(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent if str(path.parent) else ".", prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def line_plot_svg(
    x,
    y,
    err=None,
    overlay=None,
    xlabel: str = "tau",
    ylabel: str = "mean",
    title: str = "",
    width: int = 640,
    height: int = 400,
) -> str:
    """Minimal line plot: data polyline, optional +-err band, dashed overlay."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    left, right, top, bottom = 70, 20, 30, 50
    pw, ph = width - left - right, height - top - bottom

    ys = [y]
    if err is not None:
        err = np.asarray(err, dtype=float)
        ys += [y - err, y + err]
    if overlay is not None:
        ys.append(np.asarray(overlay, dtype=float))
    lo, hi = min(v.min() for v in ys), max(v.max() for v in ys)
    if hi - lo < 1e-12:
        lo, hi = lo - 0.5, hi + 0.5
    pad = 0.05 * (hi - lo)
    lo, hi = lo - pad, hi + pad
    x0, x1 = x.min(), x.max() if x.max() > x.min() else x.min() + 1

    def px(v):
        return left + (v - x0) / (x1 - x0) * pw

    def py(v):
        return top + (hi - v) / (hi - lo) * ph

    def points(xs, vs):
        return " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(xs, vs))

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>',
    ]
    for k in range(6):
        xv = x0 + k * (x1 - x0) / 5
        yv = lo + k * (hi - lo) / 5
        out.append(f'<text x="{px(xv):.2f}" y="{top + ph + 18}" text-anchor="middle">{xv:.3g}</text>')
        out.append(f'<text x="{left - 6}" y="{py(yv) + 4:.2f}" text-anchor="end">{yv:.4g}</text>')
    out.append(f'<text x="{left + pw / 2}" y="{height - 10}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(
        f'<text x="16" y="{top + ph / 2}" text-anchor="middle" '
        f'transform="rotate(-90 16 {top + ph / 2})">{escape(ylabel)}</text>'
    )
    if title:
        out.append(f'<text x="{left + pw / 2}" y="18" text-anchor="middle">{escape(title)}</text>')
    if err is not None:
        band = points(x, y + err) + " " + points(x[::-1], (y - err)[::-1])
        out.append(f'<polygon points="{band}" fill="steelblue" fill-opacity="0.25" stroke="none"/>')
    out.append(f'<polyline points="{points(x, y)}" fill="none" stroke="steelblue" stroke-width="1.5"/>')
    if overlay is not None:
        out.append(
            f'<polyline points="{points(x, overlay)}" fill="none" stroke="crimson" '
            'stroke-width="1.5" stroke-dasharray="6 4"/>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
