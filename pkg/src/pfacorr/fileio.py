"""File formats: delimited curves, text tables and run manifests.

CSV values carry 12 significant digits, human-readable tables 6.
"""
import csv
import hashlib
import json
import math
import pathlib
import platform
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .errors import DomainError
from .pade import EnergyCurve

__all__ = [
    "CSV_DIGITS",
    "TABLE_DIGITS",
    "fmt",
    "write_csv",
    "read_csv",
    "write_curve_csv",
    "read_curve_csv",
    "format_table",
    "sha256_file",
    "RunManifest",
]

CSV_DIGITS = 12
TABLE_DIGITS = 6
GAP = "--"


def fmt(value, digits=CSV_DIGITS):
    """Format a number with ``digits`` significant digits; ``None`` and NaN become empty."""
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if math.isnan(v):
        return ""
    return f"{v:.{digits}g}"


def write_csv(path, header, rows, comments=()):
    """Write rows of numbers or strings as CSV with 12 significant digits."""
    path = pathlib.Path(path)
    with path.open("w", newline="") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def read_csv(path):
    """Read a CSV written by :func:`write_csv`; returns ``(header, columns)``.

    Empty cells become NaN; ``#`` lines are skipped.
    """
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(line for line in fh if not line.startswith("#")) if r]
    if not rows:
        raise DomainError(f"{path} is empty")
    header = [h.strip() for h in rows[0]]
    cols = {h: [] for h in header}
    for r in rows[1:]:
        if len(r) != len(header):
            raise DomainError(f"{path}: row has {len(r)} fields, header has {len(header)}")
        for h, v in zip(header, r):
            v = v.strip()
            try:
                cols[h].append(float(v) if v else math.nan)
            except ValueError:
                cols[h].append(v)
    return header, {h: np.array(v) if all(isinstance(x, float) for x in v) else v
                    for h, v in cols.items()}


def write_curve_csv(path, curve):
    """Write an :class:`EnergyCurve` as ``d_over_R,E_over_EPFA[,error]``."""
    header = ["d_over_R", "E_over_EPFA"]
    cols = [curve.d_over_R, curve.ratio]
    if curve.error is not None:
        header.append("error")
        cols.append(curve.error)
    return write_csv(path, header, zip(*cols), comments=[f"provenance: {curve.provenance}"])


def read_curve_csv(path, provenance="fixture"):
    """Read an energy curve; rows are sorted by ``d/R``."""
    header, cols = read_csv(path)
    if "d_over_R" not in cols or "E_over_EPFA" not in cols:
        raise DomainError(f"{path}: curve CSV needs the header d_over_R,E_over_EPFA")
    x = np.asarray(cols["d_over_R"], float)
    y = np.asarray(cols["E_over_EPFA"], float)
    err = np.asarray(cols["error"], float) if "error" in cols else None
    order = np.argsort(x)
    return EnergyCurve(x[order], y[order], provenance=provenance,
                       error=None if err is None else err[order])


def format_table(header, rows, digits=TABLE_DIGITS):
    """Fixed-width text table; numbers to ``digits`` significant digits, ``None`` as a gap."""
    cells = [[str(h) for h in header]]
    for row in rows:
        cells.append([GAP if v is None else fmt(v, digits) for v in row])
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.rjust(w) if j else c.ljust(w) for j, (c, w) in enumerate(zip(r, widths)))
             for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def sha256_file(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    """Provenance of one CLI run: command, parameters, fixture and output digests."""

    command: str
    parameters: dict
    fixtures: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    tool_version: str = __version__
    python: str = field(default_factory=platform.python_version)
    numpy: str = np.__version__

    def add_fixture(self, name, path):
        self.fixtures[name] = sha256_file(path)

    def add_output(self, path):
        path = pathlib.Path(path)
        self.outputs[path.name] = sha256_file(path)

    def write(self, directory):
        path = pathlib.Path(directory) / "manifest.json"
        with path.open("w") as fh:
            json.dump(asdict(self), fh, indent=1, sort_keys=True, default=_json_default)
            fh.write("\n")
        return path


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, pathlib.Path):
        return str(obj)
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")
