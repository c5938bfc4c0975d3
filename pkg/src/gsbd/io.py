"""File formats: matrix CSV, metric tables and static SVG heatmaps."""

import csv
import math
from collections import defaultdict
from dataclasses import astuple, fields

import numpy as np

from .errors import InputError


def write_matrix_csv(A, path):
    """Write a matrix (or vector, as a column) with a ``rows,cols`` header line."""
    A = np.asarray(A, dtype=np.float64)
    if A.ndim == 1:
        A = A[:, None]
    with open(path, "w", newline="") as fh:
        fh.write(f"{A.shape[0]},{A.shape[1]}\n")
        for row in A:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def read_matrix_csv(path):
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        try:
            rows, cols = int(header[0]), int(header[1])
        except (IndexError, ValueError):
            raise InputError(f"{path}: first line must be 'rows,cols'") from None
        data = [[float(v) for v in line.split(",")] for line in fh if line.strip()]
    A = np.array(data, dtype=np.float64).reshape(len(data), -1) if data else np.zeros((0, cols))
    if A.shape != (rows, cols):
        raise InputError(f"{path}: header says {rows}x{cols}, body is {A.shape}")
    return A


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return "" if math.isnan(v) else repr(v)
    return str(v)


def emit_csv(rows, path, row_type, exclude=()):
    """Write dataclass rows with a header of the declared field names."""
    names = [f.name for f in fields(row_type) if f.name not in exclude]
    keep = [i for i, f in enumerate(fields(row_type)) if f.name not in exclude]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for r in rows:
            vals = astuple(r)
            w.writerow([_fmt(vals[i]) for i in keep])


def emit_summary_csv(summary, path):
    """``summary`` is a list of dicts sharing the same keys."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if not summary:
            return
        keys = list(summary[0])
        w.writerow(keys)
        for s in summary:
            w.writerow([_fmt(s[k]) for k in keys])


def _label(v):
    return f"{v:g}" if isinstance(v, float) else str(v)


def emit_heatmap_svg(rows, metric, path, row_key, col_key, panel_key="method",
                     agg="mean", invert=False, title=None):
    """Grayscale heatmap of an aggregated metric, one panel per ``panel_key``.

    Cell value is the mean (or median) of ``metric`` over rows sharing the
    (panel, row, col) keys; ``invert`` plots ``1 - value``.  Values are
    clipped to [0, 1] and mapped to gray levels, white meaning 1.
    """
    cells = defaultdict(list)
    for r in rows:
        v = getattr(r, metric)
        if v is None or (isinstance(v, float) and math.isnan(v)):
            continue
        cells[(getattr(r, panel_key), getattr(r, row_key), getattr(r, col_key))].append(v)
    panels = sorted({k[0] for k in cells})
    rvals = sorted({k[1] for k in cells})
    cvals = sorted({k[2] for k in cells})
    reducer = np.mean if agg == "mean" else np.median

    cw, ch, left, top, gap = 48, 32, 70, 50, 40
    pw = left + cw * len(cvals)
    width = gap + len(panels) * (pw + gap)
    height = top + ch * len(rvals) + 60
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'font-family="sans-serif" font-size="11">',
        f'<text x="{gap}" y="18" font-size="13">{title or (("1 - " if invert else "") + metric)}</text>',
    ]
    for p_i, panel in enumerate(panels):
        x0 = gap + p_i * (pw + gap)
        out.append(f'<text x="{x0 + left}" y="38">{panel}</text>')
        for i, rv in enumerate(rvals):
            y = top + i * ch
            out.append(f'<text x="{x0 + left - 6}" y="{y + ch // 2 + 4}" text-anchor="end">{_label(rv)}</text>')
            for j, cv in enumerate(cvals):
                vals = cells.get((panel, rv, cv))
                x = x0 + left + j * cw
                if not vals:
                    out.append(f'<rect x="{x}" y="{y}" width="{cw}" height="{ch}" fill="none" stroke="#999"/>')
                    continue
                v = float(reducer(vals))
                v = 1.0 - v if invert else v
                v = min(max(v, 0.0), 1.0)
                level = int(round(255 * v))
                out.append(
                    f'<rect x="{x}" y="{y}" width="{cw}" height="{ch}" '
                    f'fill="rgb({level},{level},{level})"><title>{v:.4f}</title></rect>'
                )
        yb = top + ch * len(rvals)
        for j, cv in enumerate(cvals):
            out.append(f'<text x="{x0 + left + j * cw + cw // 2}" y="{yb + 16}" text-anchor="middle">{_label(cv)}</text>')
        out.append(f'<text x="{x0 + left + cw * len(cvals) // 2}" y="{yb + 36}" text-anchor="middle">{col_key}</text>')
        out.append(
            f'<text x="{x0 + 14}" y="{top + ch * len(rvals) // 2}" '
            f'transform="rotate(-90 {x0 + 14} {top + ch * len(rvals) // 2})" text-anchor="middle">{row_key}</text>'
        )
    out.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(out) + "\n")
