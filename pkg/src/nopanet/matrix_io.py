"""JSON and CSV formats for matrices, factor lists, sweeps and optimizer traces."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Iterable

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import MatrixFormatError
from .optimizer import IterationRecord
from .spectra import SqueezingReport
from .synthesis import LEFT_TO_RIGHT, RIGHT_TO_LEFT, TwoLevelFactor, make_factor

SIG_DIGITS = 15

SWEEP_COLUMNS = ("omega_rad_s", "v_plus", "v_minus", "v_total", "db", "entangled")
TRACE_COLUMNS = ("iter", "v0", "db", "z_norm", "rho", "feasibility_rejections")


def _num(x: float) -> float:
    """Round to SIG_DIGITS significant digits; -0.0 becomes 0.0 so output is stable."""
    y = float(f"{float(x):.{SIG_DIGITS}g}")
    return y + 0.0


def _encode_entries(m: NDArray) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[_num(z.real), _num(z.imag)] for z in row] for row in m]


def _decode_entries(data, shape: tuple[int, int] | None = None) -> NDArray[np.complex128]:
    if not isinstance(data, list) or not all(isinstance(row, list) for row in data):
        raise MatrixFormatError("'data' must be a list of rows")
    try:
        rows = [[complex(float(pair[0]), float(pair[1])) for pair in row] for row in data]
    except (TypeError, ValueError, IndexError) as exc:
        raise MatrixFormatError(f"entries must be [re, im] pairs: {exc}") from exc
    ncols = {len(r) for r in rows}
    if len(ncols) > 1:
        raise MatrixFormatError("rows have different lengths")
    m = np.array(rows, dtype=complex).reshape(len(rows), ncols.pop() if ncols else 0)
    if shape is not None and m.shape != tuple(shape):
        raise MatrixFormatError(f"declared shape {list(shape)} does not match data shape {list(m.shape)}")
    return m


def matrix_to_dict(m: ArrayLike, label: str | None = None) -> dict:
    m = np.asarray(m)
    if m.ndim != 2:
        raise MatrixFormatError(f"expected a 2-D matrix, got {m.ndim} dimensions")
    out = {"shape": list(m.shape), "data": _encode_entries(m)}
    if label is not None:
        out["label"] = label
    return out


def matrix_from_dict(obj: dict) -> tuple[NDArray[np.complex128], str | None]:
    if not isinstance(obj, dict) or "shape" not in obj or "data" not in obj:
        raise MatrixFormatError("matrix object needs 'shape' and 'data'")
    shape = obj["shape"]
    if not (isinstance(shape, list) and len(shape) == 2 and all(isinstance(n, int) for n in shape)):
        raise MatrixFormatError(f"bad shape {shape!r}")
    return _decode_entries(obj["data"], tuple(shape)), obj.get("label")


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_matrix(path: str | Path, m: ArrayLike, label: str | None = None) -> None:
    Path(path).write_text(dumps(matrix_to_dict(m, label)))


def read_matrix(path: str | Path) -> tuple[NDArray[np.complex128], str | None]:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MatrixFormatError(f"{path}: invalid JSON ({exc})") from exc
    return matrix_from_dict(obj)


def factors_to_dict(factors: Iterable[TwoLevelFactor], order: str = LEFT_TO_RIGHT) -> dict:
    items = []
    for f in factors:
        item = {"i": f.i, "j": f.j, "block": _encode_entries(f.block), "kind": f.kind.value}
        if f.alpha is not None:
            item["alpha"] = _num(f.alpha)
        items.append(item)
    return {"order": order, "factors": items}


def factors_from_dict(obj: dict) -> tuple[list[TwoLevelFactor], str]:
    """
    Parse a factor list. ``kind`` and ``alpha`` are recomputed from the block,
    so a hand-edited file cannot carry a stale classification.
    """
    if not isinstance(obj, dict) or "factors" not in obj:
        raise MatrixFormatError("factor file needs a 'factors' array")
    order = obj.get("order", LEFT_TO_RIGHT)
    if order not in (LEFT_TO_RIGHT, RIGHT_TO_LEFT):
        raise MatrixFormatError(f"unknown product order {order!r}")
    factors = []
    for k, item in enumerate(obj["factors"], 1):
        try:
            block = _decode_entries(item["block"], (2, 2))
            factors.append(make_factor(int(item["i"]), int(item["j"]), block))
        except (KeyError, TypeError, ValueError) as exc:
            raise MatrixFormatError(f"factor {k}: {exc}") from exc
    return factors, order


def write_factors(path: str | Path, factors: Iterable[TwoLevelFactor], order: str = LEFT_TO_RIGHT) -> None:
    Path(path).write_text(dumps(factors_to_dict(factors, order)))


def read_factors(path: str | Path) -> tuple[list[TwoLevelFactor], str]:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MatrixFormatError(f"{path}: invalid JSON ({exc})") from exc
    return factors_from_dict(obj)


def report_to_dict(rep: SqueezingReport) -> dict:
    d = rep.to_dict()
    for key in ("omega", "v_plus", "v_minus", "v_total", "psi1", "psi2"):
        d[key] = _num(d[key])
    d["db"] = round(d["db"], 3) if math.isfinite(d["db"]) else d["db"]
    return d


def _csv_text(columns: tuple[str, ...], rows: Iterable[tuple]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    w.writerows(rows)
    return buf.getvalue()


def sweep_csv(reports: Iterable[SqueezingReport]) -> str:
    return _csv_text(
        SWEEP_COLUMNS,
        (
            (repr(_num(r.omega)), repr(_num(r.v_plus)), repr(_num(r.v_minus)), repr(_num(r.v_total)),
             f"{r.db:.3f}", int(r.entangled))
            for r in reports
        ),
    )


def trace_csv(records: Iterable[IterationRecord]) -> str:
    return _csv_text(
        TRACE_COLUMNS,
        (
            (r.iter, repr(_num(r.v0)), f"{r.db:.3f}", repr(_num(r.z_norm)), repr(_num(r.rho)), r.feasibility_rejections)
            for r in records
        ),
    )


def read_csv(path_or_text: str | Path) -> list[dict[str, str]]:
    text = Path(path_or_text).read_text() if isinstance(path_or_text, Path) else path_or_text
    return list(csv.DictReader(io.StringIO(text)))
