"""Serialization of result bundles: one CSV per series plus a JSON report.

Numbers in CSV files are written with ``%.17g`` so every double survives a
round trip exactly; the JSON report relies on ``repr`` floats, which are
also exact. Nothing time- or host-dependent is written, so reruns are
byte-identical.
"""
import json
import math
from pathlib import Path

import numpy as np

from . import __version__
from .errors import TLSDecayError

PAIR_TAGS = {"+-": "pm", "-+": "mp", "++": "pp", "--": "mm"}
WINDOWS = ("short", "intermediate", "large")
SERIES_COLUMNS = ("t", "dw", "rate", "re_c1", "im_c1", "p1")
CORRELATION_COLUMNS = ("tau", "re_c", "im_c", "abs_c")


class EmitError(TLSDecayError, OSError):
    pass


def _write_csv(path, columns, data):
    try:
        with open(path, "w", newline="\n") as fh:
            np.savetxt(fh, np.column_stack(data), fmt="%.17g", delimiter=",",
                       header=",".join(columns), comments="")
    except OSError as exc:
        raise EmitError(f"cannot write {path}: {exc.strerror}", module="cli", path=str(path)) from exc


def read_csv(path):
    """Inverse of the writer: dict of column name -> float array."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return {name: data[:, i] for i, name in enumerate(header)}


def _plain(value):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to None."""
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, complex):
        return [_plain(value.real), _plain(value.imag)]
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def series_columns(result, grid):
    amp = result.amplitude
    return [grid, result.shift, result.rate, amp.c1.real, amp.c1.imag, amp.p1]


def correlation_columns(series):
    v = series.values
    return [series.delays, v.real, v.imag, np.abs(v)]


def window_masks(grid, t1, t2):
    return {"short": grid < t1, "intermediate": (grid >= t1) & (grid < t2), "large": grid >= t2}


def emit(bundle, directory=None, formats=None, windows=False):
    """Write the bundle's files; returns the list of paths written (sorted)."""
    cfg = bundle.config
    out = Path(directory if directory is not None else cfg.outputs.directory)
    formats = tuple(formats if formats is not None else cfg.outputs.formats)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise EmitError(f"cannot create {out}: {exc.strerror}", module="cli", path=str(out)) from exc
    grid = bundle.grid
    written = []
    files = {}
    if "csv" in formats:
        masks = window_masks(grid, bundle.regimes.t1, bundle.regimes.t2) if windows else {}
        for kind, res in bundle.models.items():
            cols = series_columns(res, grid)
            names = [f"{kind}.csv"]
            _write_csv(out / names[0], SERIES_COLUMNS, cols)
            for label, mask in masks.items():
                names.append(f"{kind}_{label}.csv")
                _write_csv(out / names[-1], SERIES_COLUMNS, [c[mask] for c in cols])
            for series in res.correlations:
                names.append(f"{kind}_corr_{PAIR_TAGS[series.pair]}.csv")
                _write_csv(out / names[-1], CORRELATION_COLUMNS, correlation_columns(series))
            if res.rate_average is not None:
                names.append(f"{kind}_rate_average.csv")
                _write_csv(out / names[-1], ("t", "rate", "rate_avg"),
                           [grid, res.rate, res.rate_average])
            files[kind] = names
            written.extend(out / n for n in names)
    if "json" in formats:
        path = out / "report.json"
        try:
            path.write_text(json.dumps(_plain(report_dict(bundle, files)), indent=2) + "\n")
        except OSError as exc:
            raise EmitError(f"cannot write {path}: {exc.strerror}", module="cli",
                            path=str(path)) from exc
        written.append(path)
    return sorted(written)


def report_dict(bundle, files=None):
    files = files or {}
    models = {}
    for kind, res in bundle.models.items():
        p1 = res.amplitude.p1
        models[kind] = {
            "final_p1": float(p1[-1]),
            "correlations": [s.pair for s in res.correlations],
            "files": files.get(kind, []),
        }
    return {
        "version": __version__,
        "stationary": bundle.stationary,
        "t1": bundle.regimes.t1,
        "t2": bundle.regimes.t2,
        "regimes": bundle.regimes.to_dict(),
        "grid": {"points": int(bundle.grid.size), "t_max": float(bundle.grid[-1])},
        "models": models,
        "warnings": [n.to_dict() for n in bundle.all_notices],
        "config": bundle.config.to_dict(),
    }
