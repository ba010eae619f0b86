"""Labeled univariate datasets and their CSV/JSON-sidecar file format.

CSV layout: a header ``label,v0,v1,...,v{N-1}`` followed by one row per
sample, UTF-8, ``.`` as decimal separator. The sidecar lives next to the CSV
with a ``.json`` suffix and carries provenance metadata.
"""

import csv
import json
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataFormatError, NonFiniteError, ShapeError

_MULTICHANNEL = re.compile(r"^(c|ch|channel)\d+[_:.-]", re.IGNORECASE)


@dataclass
class LabeledDataset:
    """Equal-length univariate samples with integer class labels.

    ``X`` has shape ``(n_samples, length)``. ``X_long`` optionally holds a
    twice-as-long rendering of each sample whose first half is ``X``; the
    time-neighboring augmentation pairs its two halves.
    """

    X: np.ndarray
    y: np.ndarray
    metadata: dict = field(default_factory=dict)
    X_long: np.ndarray | None = None

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=np.int64)
        if self.X.ndim != 2:
            raise ShapeError(f"X must be 2-D (samples x length), got shape {self.X.shape}")
        if self.X.shape[0] != self.y.shape[0]:
            raise ShapeError(f"{self.X.shape[0]} samples but {self.y.shape[0]} labels")
        if self.X.shape[0] == 0 or self.X.shape[1] == 0:
            raise ShapeError("dataset is empty")
        if not np.all(np.isfinite(self.X)):
            raise NonFiniteError("dataset contains NaN or infinite values")
        if self.X_long is not None:
            self.X_long = np.asarray(self.X_long, dtype=np.float64)
            if self.X_long.shape != (self.X.shape[0], 2 * self.X.shape[1]):
                raise ShapeError("X_long must have shape (n_samples, 2 * length)")

    @classmethod
    def from_samples(cls, samples, labels=None, metadata=None):
        """Build from a list of sequences; ragged input raises ShapeError."""
        samples = [np.asarray(s, dtype=np.float64) for s in samples]
        if not samples:
            raise ShapeError("dataset is empty")
        lengths = {s.shape for s in samples}
        if len(lengths) != 1 or samples[0].ndim != 1:
            raise ShapeError(f"samples must share one 1-D length, got shapes {sorted(lengths)}")
        if labels is None:
            labels = np.zeros(len(samples), dtype=np.int64)
        return cls(np.stack(samples), np.asarray(labels), dict(metadata or {}))

    def __len__(self):
        return self.X.shape[0]

    @property
    def length(self):
        return self.X.shape[1]

    @property
    def classes(self):
        return np.unique(self.y)

    def subset(self, idx):
        idx = np.asarray(idx)
        long = None if self.X_long is None else self.X_long[idx]
        return LabeledDataset(self.X[idx], self.y[idx], dict(self.metadata), long)


def sidecar_path(csv_path):
    return Path(csv_path).with_suffix(".json")


def write_csv(ds, path, sidecar=True):
    """Write ``ds`` as CSV (plus JSON sidecar). Output is byte-deterministic."""
    path = Path(path)
    n = ds.length
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(["label"] + [f"v{i}" for i in range(n)]) + "\n")
        for label, row in zip(ds.y, ds.X):
            fh.write(str(int(label)) + "," + ",".join(repr(float(v)) for v in row) + "\n")
    if sidecar:
        with open(sidecar_path(path), "w", encoding="utf-8") as fh:
            json.dump(ds.metadata, fh, indent=2, sort_keys=True)
            fh.write("\n")


def read_csv(path):
    """Parse a dataset CSV, raising DataFormatError with row/column on failure."""
    path = Path(path)
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise DataFormatError(f"cannot open {path}: {exc.strerror}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path} is empty", row=1) from None
        except (csv.Error, UnicodeDecodeError) as exc:
            raise DataFormatError(f"unreadable header: {exc}", row=1) from None
        header = [h.strip() for h in header]
        if any(_MULTICHANNEL.match(h) for h in header) or "channel" in (h.lower() for h in header):
            raise DataFormatError(
                "multichannel CSV detected; only univariate series are supported. "
                "Export a single channel as label,v0,...,v{N-1}",
                row=1,
            )
        if not header or header[0].lower() != "label":
            raise DataFormatError("first header column must be 'label'", row=1, column=1)
        for j, name in enumerate(header[1:]):
            if name != f"v{j}":
                raise DataFormatError(
                    f"expected header 'v{j}', found {name!r}", row=1, column=j + 2
                )
        n = len(header) - 1
        if n < 1:
            raise DataFormatError("no value columns in header", row=1)
        labels, rows = [], []
        try:
            for r, rec in enumerate(reader, start=2):
                if not rec or all(not c.strip() for c in rec):
                    continue
                if len(rec) != n + 1:
                    raise DataFormatError(
                        f"expected {n + 1} fields, found {len(rec)}", row=r,
                        column=min(len(rec), n + 1) + (len(rec) < n + 1),
                    )
                try:
                    labels.append(int(rec[0]))
                except ValueError:
                    raise DataFormatError(f"label {rec[0]!r} is not an integer", row=r, column=1) from None
                vals = np.empty(n)
                for c, cell in enumerate(rec[1:]):
                    try:
                        vals[c] = float(cell)
                    except ValueError:
                        raise DataFormatError(
                            f"value {cell!r} is not a number", row=r, column=c + 2
                        ) from None
                    if not np.isfinite(vals[c]):
                        raise DataFormatError("non-finite value", row=r, column=c + 2)
                rows.append(vals)
        except (csv.Error, UnicodeDecodeError) as exc:
            raise DataFormatError(f"unreadable CSV: {exc}", row=reader.line_num) from None
    if not rows:
        raise DataFormatError(f"{path} has a header but no samples", row=2)
    meta = {}
    side = sidecar_path(path)
    if side.exists():
        try:
            meta = json.loads(side.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"bad sidecar {side}: {exc.msg}", row=exc.lineno, column=exc.colno) from None
    return LabeledDataset(np.stack(rows), np.asarray(labels), meta)
