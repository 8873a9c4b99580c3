"""Class-structured scatter computations.

Between-class and within-class scatter of a single feature column are computed
from per-class means in O(n), never through the dense n-by-n affinity
matrices those quantities are usually defined with.  The dense forms live in
:mod:`streamsel.reference` and are used for verification only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInput

# Floor for within-class scatter when it appears in a denominator.
RATIO_FLOOR = 1e-12


@dataclass(frozen=True)
class ClassPartition:
    """Sample indices grouped by class, with labels densified to 1..c."""

    class_count: int
    members: tuple[np.ndarray, ...]
    counts: np.ndarray
    total: int
    dense_labels: np.ndarray  # shape (total,), values in 1..class_count

    def __post_init__(self):
        if self.class_count < 1:
            raise InvalidInput("at least one class required")
        if int(self.counts.sum()) != self.total:
            raise InvalidInput("class counts do not sum to the sample count")


def partition_classes(labels) -> ClassPartition:
    """Group sample indices by class label.

    Labels may be any integers; they are remapped densely to 1..c in
    ascending order of the original values.
    """
    arr = np.asarray(labels)
    if arr.size == 0:
        raise InvalidInput("empty label vector")
    if arr.ndim != 1:
        raise InvalidInput("labels must be a one-dimensional vector")
    if not np.issubdtype(arr.dtype, np.integer):
        as_float = np.asarray(arr, dtype=float)
        if not np.all(np.isfinite(as_float)) or not np.all(as_float == np.round(as_float)):
            raise InvalidInput("labels must be integers")
        arr = as_float.astype(np.int64)
    values, dense0 = np.unique(arr, return_inverse=True)
    dense = dense0.astype(np.int64) + 1
    members = tuple(np.flatnonzero(dense == c + 1) for c in range(len(values)))
    counts = np.array([m.size for m in members], dtype=np.int64)
    return ClassPartition(
        class_count=len(values),
        members=members,
        counts=counts,
        total=int(arr.size),
        dense_labels=dense,
    )


def _check_vector(v, partition: ClassPartition) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1 or arr.size != partition.total:
        raise InvalidInput(
            f"vector length {arr.size} does not match sample count {partition.total}"
        )
    return arr


def _class_sums(v: np.ndarray, partition: ClassPartition) -> np.ndarray:
    return np.bincount(
        partition.dense_labels - 1, weights=v, minlength=partition.class_count
    )


def affinity_between_apply(v, partition: ClassPartition) -> np.ndarray:
    """Apply the between-class affinity matrix to a vector without forming it.

    The matrix has entry 1/n - 1/n_i for same-class pairs and 1/n otherwise,
    i.e. it equals (1/n) 11^T minus the per-class averaging operator, so the
    product is the global mean minus the class mean at every position.
    """
    arr = _check_vector(v, partition)
    grand = arr.sum() / partition.total
    class_means = _class_sums(arr, partition) / partition.counts
    return grand - class_means[partition.dense_labels - 1]


def affinity_within_apply(v, partition: ClassPartition) -> np.ndarray:
    """Apply the within-class affinity matrix (per-class averaging) to a vector."""
    arr = _check_vector(v, partition)
    class_means = _class_sums(arr, partition) / partition.counts
    return class_means[partition.dense_labels - 1]


@dataclass(frozen=True)
class FeatureScatter:
    """Between/within class scatter of one feature and the resulting score."""

    between: float
    within: float
    score: float


def scatter_stats(feature, partition: ClassPartition) -> FeatureScatter:
    """Between-class scatter, within-class scatter, and their ratio.

    between = sum_c n_c (mu_c - mu)^2 and within = sum_c sum_{i in c}
    (f_i - mu_c)^2; both equal the quadratic forms of the feature against
    the between/within graph Laplacians.  The score is
    between / max(within, RATIO_FLOOR), with an exact 0 for features whose
    between-class scatter vanishes (constant features in particular).
    """
    arr = _check_vector(feature, partition)
    if not np.all(np.isfinite(arr)):
        raise InvalidInput("feature contains non-finite values")
    sums = _class_sums(arr, partition)
    class_means = sums / partition.counts
    grand = arr.sum() / partition.total
    between = float(np.dot(partition.counts, (class_means - grand) ** 2))
    residual = arr - class_means[partition.dense_labels - 1]
    within = float(np.dot(residual, residual))
    if between == 0.0:
        score = 0.0
    else:
        score = between / max(within, RATIO_FLOOR)
    return FeatureScatter(between=between, within=within, score=score)


@dataclass
class SubsetTraceState:
    """Running sums behind the trace-ratio criterion of a selected subset.

    Tracks the sums of between/within scatters of the selected features plus
    a ledger of their individual scores with streaming mean and sample
    standard deviation (Welford update).  Single writer; reads are cheap.
    """

    num_sum: float = 0.0
    den_sum: float = 0.0
    count: int = 0
    score_ledger: list[float] = field(default_factory=list)
    _mean: float = 0.0
    _m2: float = 0.0

    def add(self, scatter: FeatureScatter) -> None:
        self.num_sum += scatter.between
        self.den_sum += scatter.within
        self.count += 1
        self.score_ledger.append(scatter.score)
        delta = scatter.score - self._mean
        self._mean += delta / self.count
        self._m2 += delta * (scatter.score - self._mean)

    @property
    def mean(self) -> float:
        return self._mean if self.count else 0.0

    @property
    def std(self) -> float:
        """Sample (n-1) standard deviation of the ledger; 0 below two entries."""
        if self.count < 2:
            return 0.0
        return math.sqrt(max(self._m2, 0.0) / (self.count - 1))

    def criterion_with(self, scatter: FeatureScatter) -> float:
        """Criterion value if `scatter` were added, without mutating the state."""
        return (self.num_sum + scatter.between) / max(
            self.den_sum + scatter.within, RATIO_FLOOR
        )

    @classmethod
    def from_scatters(cls, scatters) -> "SubsetTraceState":
        state = cls()
        for s in scatters:
            state.add(s)
        return state


def subset_criterion(state: SubsetTraceState) -> float:
    """Trace-ratio criterion of the selected subset; 0 for the empty set."""
    if state.count == 0:
        return 0.0
    return state.num_sum / max(state.den_sum, RATIO_FLOOR)
