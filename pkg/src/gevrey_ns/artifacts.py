"""
File formats for fields, norm series and run manifests.

Field snapshot, text form (``.csv``)::

    # gevrey-ns field snapshot
    # N=16
    # kind=vector
    # config_hash=<hex>            (optional)
    xi1,xi2,xi3,component,re,im
    -1,0,0,2,1.0,0.0
    ...

One row per nonzero coefficient, components numbered 0..2 (always 0 for a
scalar field), floats written with ``repr`` so the text form is lossless.
Binary form (``.npz``) stores the complex coefficient array as is.

Trajectory CSV: ``#`` header lines carrying ``config_hash`` and the JSON
parameters, then ``t`` followed by the :class:`~gevrey_ns.norms.NormReport`
columns.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from pathlib import Path

import numpy as np

from .norms import NORM_REPORT_FIELDS, NormReport
from .spectral import make_grid

__all__ = [
    "SNAPSHOT_COLUMNS",
    "TRAJECTORY_COLUMNS",
    "canonical_json",
    "config_hash",
    "sha256_file",
    "write_field",
    "read_field",
    "write_trajectory_csv",
    "read_trajectory_csv",
    "write_json",
]

SNAPSHOT_COLUMNS = ("xi1", "xi2", "xi3", "component", "re", "im")
TRAJECTORY_COLUMNS = ("t",) + NORM_REPORT_FIELDS


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=True)


def config_hash(config: dict) -> str:
    return hashlib.sha256(canonical_json(config).encode()).hexdigest()


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _fmt(x: float) -> str:
    return repr(float(x))


def write_field(path, f: np.ndarray, config_hash: str | None = None) -> Path:
    """Write spectral coefficients as text (``.csv``) or binary (``.npz``), chosen by suffix."""
    path = Path(path)
    f = np.asarray(f, dtype=complex)
    grid = make_grid(f.shape[-1])
    if path.suffix == ".npz":
        extra = {} if config_hash is None else {"config_hash": np.array(config_hash)}
        with open(path, "wb") as fh:
            np.savez(fh, coefficients=f, **extra)
        return path
    vector = f.ndim == 4
    comps = f if vector else f[None]
    buf = io.StringIO()
    buf.write("# gevrey-ns field snapshot\n")
    buf.write(f"# N={grid.N}\n# kind={'vector' if vector else 'scalar'}\n")
    if config_hash is not None:
        buf.write(f"# config_hash={config_hash}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SNAPSHOT_COLUMNS)
    for c, comp in enumerate(comps):
        for idx in zip(*np.nonzero(comp)):
            xi = grid.k[(slice(None),) + idx]
            v = comp[idx]
            w.writerow([int(xi[0]), int(xi[1]), int(xi[2]), c, _fmt(v.real), _fmt(v.imag)])
    path.write_text(buf.getvalue())
    return path


def _header(lines) -> dict:
    meta = {}
    for line in lines:
        if line.startswith("#") and "=" in line:
            key, _, value = line[1:].strip().partition("=")
            meta[key.strip()] = value.strip()
    return meta


def read_field(path) -> np.ndarray:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"field file {path} does not exist")
    if path.suffix == ".npz":
        with np.load(path) as data:
            return np.array(data["coefficients"])
    lines = path.read_text().splitlines()
    meta = _header(lines)
    try:
        N = int(meta["N"])
        vector = meta.get("kind", "vector") == "vector"
    except (KeyError, ValueError):
        raise ValueError(f"{path}: missing or bad '# N=' header") from None
    grid = make_grid(N)
    out = np.zeros(((3,) if vector else (1,)) + grid.shape, dtype=complex)
    body = [ln for ln in lines if not ln.startswith("#")]
    reader = csv.DictReader(body)
    if tuple(reader.fieldnames or ()) != SNAPSHOT_COLUMNS:
        raise ValueError(f"{path}: expected columns {SNAPSHOT_COLUMNS}")
    for row in reader:
        idx = grid.index_of((row["xi1"], row["xi2"], row["xi3"]))
        out[(int(row["component"]),) + idx] = complex(float(row["re"]), float(row["im"]))
    return out if vector else out[0]


def write_trajectory_csv(path, times, reports: list[NormReport], config_hash: str,
                         params: dict, extra_header: dict | None = None) -> Path:
    path = Path(path)
    buf = io.StringIO()
    buf.write(f"# config_hash={config_hash}\n")
    buf.write(f"# params={canonical_json(params)}\n")
    for key, value in (extra_header or {}).items():
        buf.write(f"# {key}={value}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRAJECTORY_COLUMNS)
    for t, rep in zip(times, reports):
        w.writerow([_fmt(t)] + [_fmt(v) for v in rep.row()])
    path.write_text(buf.getvalue())
    return path


def read_trajectory_csv(path) -> tuple[dict, dict]:
    """Column arrays keyed by name, and the header metadata (``params`` parsed from JSON)."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"trajectory file {path} does not exist")
    lines = path.read_text().splitlines()
    meta = _header(lines)
    if "params" in meta:
        meta["params"] = json.loads(meta["params"])
    reader = csv.DictReader(ln for ln in lines if not ln.startswith("#"))
    missing = set(TRAJECTORY_COLUMNS) - set(reader.fieldnames or ())
    if missing:
        raise ValueError(f"{path}: missing columns {sorted(missing)}")
    rows = list(reader)
    cols = {name: np.array([float(r[name]) for r in rows]) for name in reader.fieldnames}
    return cols, meta


def write_json(path, obj) -> Path:
    path = Path(path)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n")
    return path
