"""Dataset and group-layout ingestion.

Three text formats are supported, with strict parsing and 1-based line
numbers on every error:

CSV
    One sample per row.  One column holds the class label (selected by name
    when the file has a header, otherwise by 0-based index); every other
    column must parse as a float.  The cell values "" and "?" count as
    missing and are handled per the schema's missing policy.

LIBSVM
    ``label idx:val idx:val ...`` with 1-based, strictly increasing indices
    per line.  Absent entries are zero; the dimensionality is the largest
    index seen anywhere in the file.

Group layout
    ``name: i,j,a-b`` per line with 0-based column indices and inclusive
    ranges.  Blank lines and lines starting with ``#`` are ignored.  An
    index may appear in at most one group.
"""

from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import InvalidInput, ParseError, SpecError
from .spectral import ClassPartition, partition_classes

MISSING_TOKENS = ("", "?")


@dataclass(eq=False)
class LabeledDataset:
    """Dense n-by-d feature matrix with labels densified to 1..c.

    X is stored column-major so that single-feature reads are contiguous.
    class_labels keeps the original label tokens in dense order.
    """

    X: np.ndarray
    y: np.ndarray
    feature_names: tuple[str, ...] | None = None
    class_labels: tuple[str, ...] = field(default_factory=tuple)
    source: str = ""

    def __post_init__(self):
        self.X = np.asfortranarray(self.X, dtype=float)
        self.y = np.asarray(self.y, dtype=np.int64)
        if self.X.ndim != 2:
            raise InvalidInput("feature matrix must be 2-D")
        if self.y.shape != (self.X.shape[0],):
            raise InvalidInput("label vector length must match row count")

    @property
    def n_samples(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    @property
    def n_classes(self) -> int:
        return int(self.y.max()) if self.y.size else 0

    @cached_property
    def partition(self) -> ClassPartition:
        return partition_classes(self.y)

    def content_hash(self) -> str:
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.X).tobytes())
        h.update(self.y.tobytes())
        h.update(repr(self.X.shape).encode())
        return h.hexdigest()


def densify_labels(tokens: list[str]) -> tuple[np.ndarray, tuple[str, ...]]:
    """Map raw label tokens to dense integers 1..c.

    Classes are ordered numerically when every token parses as a number,
    lexicographically otherwise.
    """
    try:
        keys = [float(t) for t in tokens]
        order = sorted(set(keys))
        canon = {k: i + 1 for i, k in enumerate(order)}
        dense = np.array([canon[k] for k in keys], dtype=np.int64)
        names = tuple(_num_name(k) for k in order)
    except ValueError:
        order = sorted(set(tokens))
        canon = {t: i + 1 for i, t in enumerate(order)}
        dense = np.array([canon[t] for t in tokens], dtype=np.int64)
        names = tuple(order)
    return dense, names


def _num_name(value: float) -> str:
    return str(int(value)) if value == int(value) else str(value)


@dataclass(frozen=True)
class DatasetSchema:
    """How to read a CSV file: which column is the label, and how strict to be."""

    label_column: str | int = "label"
    delimiter: str = ","
    has_header: bool = True
    missing_policy: str = "error"  # or "drop_row"

    def __post_init__(self):
        if len(self.delimiter) != 1:
            raise InvalidInput("delimiter must be a single character")
        if self.missing_policy not in ("error", "drop_row"):
            raise InvalidInput("missing_policy must be 'error' or 'drop_row'")


def load_csv(path, schema: DatasetSchema) -> LabeledDataset:
    """Load a delimited text file into a LabeledDataset."""
    path = Path(path)
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh, delimiter=schema.delimiter))
    # csv.reader drops blank lines; track original line numbers ourselves.
    with path.open() as fh:
        line_numbers = [i + 1 for i, raw in enumerate(fh) if raw.strip() != ""]
    rows = [r for r in rows if r]
    if not rows:
        raise ParseError("file has no rows")

    start = 0
    if schema.has_header:
        header = [c.strip() for c in rows[0]]
        start = 1
        if isinstance(schema.label_column, int):
            label_idx = schema.label_column
            if not 0 <= label_idx < len(header):
                raise ParseError(f"label column index {label_idx} out of range")
        else:
            if schema.label_column not in header:
                raise ParseError(f"unknown label column {schema.label_column!r}")
            label_idx = header.index(schema.label_column)
        width = len(header)
        names = [h for i, h in enumerate(header) if i != label_idx]
    else:
        if not isinstance(schema.label_column, int):
            raise ParseError("label column must be an index when there is no header")
        width = len(rows[0])
        label_idx = schema.label_column
        if not 0 <= label_idx < width:
            raise ParseError(f"label column index {label_idx} out of range")
        names = [f"f{i}" for i in range(width - 1)]

    data: list[list[float]] = []
    labels: list[str] = []
    for k in range(start, len(rows)):
        row = [c.strip() for c in rows[k]]
        line = line_numbers[k] if k < len(line_numbers) else k + 1
        if len(row) != width:
            raise ParseError(f"expected {width} cells, found {len(row)}", line=line)
        if any(c in MISSING_TOKENS for c in row):
            if schema.missing_policy == "drop_row":
                continue
            raise ParseError("missing value", line=line)
        label = row[label_idx]
        feats = []
        for i, cell in enumerate(row):
            if i == label_idx:
                continue
            try:
                feats.append(float(cell))
            except ValueError:
                raise ParseError(f"non-numeric feature value {cell!r}", line=line) from None
        data.append(feats)
        labels.append(label)
    if not data:
        raise ParseError("no data rows after applying the missing-value policy")
    dense, class_names = densify_labels(labels)
    X = np.array(data, dtype=float)
    return LabeledDataset(
        X=X,
        y=dense,
        feature_names=tuple(names),
        class_labels=class_names,
        source=str(path),
    )


def load_libsvm(path) -> LabeledDataset:
    """Load a sparse ``label idx:val`` text file into a dense LabeledDataset."""
    path = Path(path)
    entries: list[tuple[str, list[tuple[int, float]]]] = []
    max_index = 0
    with path.open() as fh:
        for lineno, raw in enumerate(fh, start=1):
            stripped = raw.strip()
            if not stripped:
                continue
            parts = stripped.split()
            label = parts[0]
            try:
                float(label)
            except ValueError:
                raise ParseError(f"non-numeric label {label!r}", line=lineno) from None
            pairs: list[tuple[int, float]] = []
            prev = 0
            for item in parts[1:]:
                if ":" not in item:
                    raise ParseError(f"malformed entry {item!r}", line=lineno)
                idx_s, val_s = item.split(":", 1)
                try:
                    idx = int(idx_s)
                    val = float(val_s)
                except ValueError:
                    raise ParseError(f"malformed entry {item!r}", line=lineno) from None
                if idx < 1:
                    raise ParseError(f"index {idx} is not 1-based", line=lineno)
                if idx <= prev:
                    raise ParseError(
                        f"index {idx} not increasing after {prev}", line=lineno
                    )
                prev = idx
                pairs.append((idx, val))
            max_index = max(max_index, prev)
            entries.append((label, pairs))
    if not entries:
        raise ParseError("file has no rows")
    X = np.zeros((len(entries), max_index))
    labels = []
    for row, (label, pairs) in enumerate(entries):
        labels.append(label)
        for idx, val in pairs:
            X[row, idx - 1] = val
    dense, class_names = densify_labels(labels)
    return LabeledDataset(X=X, y=dense, class_labels=class_names, source=str(path))


def parse_index_spec(spec: str, line: int) -> list[int]:
    """Parse ``i,j,a-b`` into an explicit index list (ranges inclusive)."""
    out: list[int] = []
    for chunk in spec.split(","):
        chunk = chunk.strip()
        if not chunk:
            raise SpecError("empty index entry", line=line)
        if "-" in chunk[1:]:  # allow a leading minus to fail as "negative"
            lo_s, hi_s = chunk.split("-", 1)
            try:
                lo, hi = int(lo_s), int(hi_s)
            except ValueError:
                raise SpecError(f"malformed range {chunk!r}", line=line) from None
            if lo < 0 or hi < lo:
                raise SpecError(f"invalid range {chunk!r}", line=line)
            out.extend(range(lo, hi + 1))
        else:
            try:
                idx = int(chunk)
            except ValueError:
                raise SpecError(f"malformed index {chunk!r}", line=line) from None
            if idx < 0:
                raise SpecError(f"negative index {idx}", line=line)
            out.append(idx)
    return out


def load_group_spec(path):
    """Load a group layout file; returns a GroupLayout with source='file'."""
    from .stream import FeatureGroup, GroupLayout

    path = Path(path)
    groups: list[FeatureGroup] = []
    seen: dict[int, int] = {}
    with path.open() as fh:
        for lineno, raw in enumerate(fh, start=1):
            stripped = raw.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if ":" not in stripped:
                raise SpecError("expected 'name: indices'", line=lineno)
            name, spec = stripped.split(":", 1)
            name = name.strip()
            if not name:
                raise SpecError("empty group name", line=lineno)
            indices = parse_index_spec(spec, lineno)
            for idx in indices:
                if idx in seen:
                    raise SpecError(
                        f"index {idx} already used on line {seen[idx]}", line=lineno
                    )
                seen[idx] = lineno
            groups.append(
                FeatureGroup(
                    group_id=len(groups), feature_indices=tuple(indices), name=name
                )
            )
    if not groups:
        raise SpecError("no groups defined")
    return GroupLayout(groups=tuple(groups), source="file")


def _compact_ranges(indices) -> str:
    parts = []
    run_start = prev = indices[0]
    for idx in list(indices[1:]) + [None]:
        if idx is not None and idx == prev + 1:
            prev = idx
            continue
        parts.append(str(run_start) if run_start == prev else f"{run_start}-{prev}")
        if idx is not None:
            run_start = prev = idx
    return ",".join(parts)


def save_group_spec(layout, path) -> None:
    """Write a layout back out in the group-spec text format."""
    lines = []
    for group in layout.groups:
        name = group.name or f"g{group.group_id}"
        lines.append(f"{name}: {_compact_ranges(group.feature_indices)}")
    Path(path).write_text("\n".join(lines) + "\n")
