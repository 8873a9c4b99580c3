"""Per-group screening of newly arrived features.

Two independent admission tests are applied to every feature of an incoming
group, in arrival order: a trace-ratio improvement test against the subset
kept from the current group so far, and a one-sample t test of the feature's
score against the ledger of scores of the globally selected subset.  Either
test firing admits the feature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

from .errors import InvalidInput
from .spectral import (
    FeatureScatter,
    SubsetTraceState,
    scatter_stats,
    subset_criterion,
)

if TYPE_CHECKING:
    from .data import LabeledDataset
    from .stream import FeatureGroup

T_SIGNS = ("ledger_minus_score", "score_minus_ledger")


@dataclass(frozen=True)
class SelectorConfig:
    """Knobs of the two admission tests.

    epsilon      minimum trace-ratio improvement for the first test
    t_threshold  raw t-value an incoming score must exceed
    min_ledger   ledger entries required before the t test is defined
    t_sign       "ledger_minus_score" computes t = (mean - score) / se,
                 "score_minus_ledger" flips the numerator so that only
                 above-average scores can pass
    """

    epsilon: float = 0.001
    t_threshold: float = 0.05
    min_ledger: int = 2
    t_sign: str = "ledger_minus_score"

    def __post_init__(self):
        if not self.epsilon > 0:
            raise InvalidInput("epsilon must be positive")
        if self.min_ledger < 2:
            raise InvalidInput("min_ledger must be at least 2")
        if self.t_sign not in T_SIGNS:
            raise InvalidInput(f"t_sign must be one of {T_SIGNS}")


def criterion1_accept(
    state: SubsetTraceState, cand: FeatureScatter, cfg: SelectorConfig
) -> bool:
    """True when adding the candidate raises the trace ratio by more than epsilon."""
    return state.criterion_with(cand) - subset_criterion(state) > cfg.epsilon


def criterion2_accept(
    state: SubsetTraceState, cand_score: float, cfg: SelectorConfig
) -> bool:
    """One-sample t test of the candidate score against the score ledger.

    Undefined ledgers (fewer than min_ledger entries, or zero spread) reject.
    """
    if state.count < cfg.min_ledger:
        return False
    sd = state.std
    if sd == 0.0:
        return False
    se = sd / math.sqrt(state.count)
    if cfg.t_sign == "ledger_minus_score":
        t = (state.mean - cand_score) / se
    else:
        t = (cand_score - state.mean) / se
    return t > cfg.t_threshold


def intra_group_select(
    group: "FeatureGroup",
    global_state: SubsetTraceState,
    dataset: "LabeledDataset",
    cfg: SelectorConfig,
) -> tuple[list[int], SubsetTraceState]:
    """Filter one group's features in arrival order.

    Admitted features immediately join the per-group trace state used by the
    first test; the global ledger backing the t test is read-only here and is
    refreshed by the driver once the whole group has been re-selected.
    Returns the admitted column indices (arrival order, no duplicates) and
    the final per-group state.
    """
    if not group.feature_indices:
        raise InvalidInput("group has no features")
    d = dataset.n_features
    partition = dataset.partition
    group_state = SubsetTraceState()
    kept: list[int] = []
    for idx in group.feature_indices:
        if not 0 <= idx < d:
            raise InvalidInput(f"feature index {idx} out of range for d={d}")
        scatter = scatter_stats(dataset.X[:, idx], partition)
        if criterion1_accept(group_state, scatter, cfg) or criterion2_accept(
            global_state, scatter.score, cfg
        ):
            kept.append(idx)
            group_state.add(scatter)
    return kept, group_state
