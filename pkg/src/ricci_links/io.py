"""Run configuration and reproducible file output.

Floats are written with 17 significant digits, which round-trips IEEE
doubles, and JSON keys are sorted, so identical runs give identical bytes.
Every file is written to a temporary sibling and renamed into place.
"""

import csv
import io
import json
import math
import os
import tempfile
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from .errors import ParameterError

FLOAT_FORMAT = "{:.17g}"


@dataclass(frozen=True)
class RunConfig:
    quadrature_tol: float = 1e-10
    ode_rel_tol: float = 1e-9
    shooting_tol: float = 1e-6
    grid_size: int = 1024
    output_dir: str = "."
    # Nothing in the pipeline is random; kept so the echo states it.
    deterministic: bool = True

    def __post_init__(self):
        for name in ("quadrature_tol", "ode_rel_tol", "shooting_tol"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ParameterError(f"{name} must be a positive number, got {v!r}")
        if int(self.grid_size) != self.grid_size or self.grid_size < 64:
            raise ParameterError(f"grid_size must be an integer >= 64, got {self.grid_size!r}")
        if self.deterministic is not True:
            raise ParameterError("runs are always deterministic")

    @classmethod
    def load(cls, path=None, **overrides):
        """Defaults, then the JSON file at ``path``, then non-``None`` overrides."""
        values = {}
        if path is not None:
            try:
                with open(path, encoding="utf-8") as fh:
                    values = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                raise ParameterError(f"cannot read config {path}: {exc}") from exc
            if not isinstance(values, dict):
                raise ParameterError("config file must hold a JSON object")
            known = {f.name for f in fields(cls)}
            unknown = sorted(set(values) - known)
            if unknown:
                raise ParameterError(f"unknown config keys: {', '.join(unknown)}")
        values.update({k: v for k, v in overrides.items() if v is not None})
        if "grid_size" in values and isinstance(values["grid_size"], float):
            if values["grid_size"].is_integer():
                values["grid_size"] = int(values["grid_size"])
        return cls(**values)

    def as_dict(self):
        return asdict(self)


def format_value(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return FLOAT_FORMAT.format(float(v))
    return str(v)


def _atomic_write(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return str(path)


def write_csv(path, columns):
    """Write a dict of equal-length columns; header order is the dict order."""
    names = list(columns)
    cols = [np.asarray(columns[k]).ravel() for k in names]
    lengths = {c.size for c in cols}
    if len(lengths) > 1:
        raise ValueError(f"columns differ in length: {sorted(lengths)}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(names)
    for row in zip(*cols):
        writer.writerow([format_value(v) for v in row])
    return _atomic_write(path, buf.getvalue())


def write_rows(path, header, rows):
    """Write a list of dicts as CSV with the given column order."""
    return write_csv(path, {k: [row[k] for row in rows] for k in header})


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        # JSON has no infinities; keep them readable.
        return v if math.isfinite(v) else str(v)
    return v


def dumps(obj):
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"


def write_json(path, obj):
    return _atomic_write(path, dumps(obj))


def read_boundary_csv(path):
    """Read ``r,a,b`` columns.  Raises ParameterError on any format problem."""
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ParameterError(f"cannot read {path}: {exc}") from exc
    if not rows or [h.strip() for h in rows[0]] != ["r", "a", "b"]:
        raise ParameterError("boundary CSV must start with the header r,a,b")
    body = [row for row in rows[1:] if row]
    try:
        data = np.array([[float(x) for x in row] for row in body], dtype=float)
    except ValueError as exc:
        raise ParameterError(f"non-numeric entry in boundary CSV: {exc}") from exc
    if data.ndim != 2 or data.shape[1] != 3 or data.shape[0] < 3:
        raise ParameterError("boundary CSV needs at least three rows of three values")
    if not np.all(np.isfinite(data)):
        raise ParameterError("boundary CSV contains non-finite values")
    return data[:, 0], data[:, 1], data[:, 2]
