"""Workforce-budgeted batch planning over aggregated requirements.

Given the per-request aggregate requirements, distribute the available
workforce fraction W across the batch.  Two objectives:

* throughput (number of satisfied requests): ascending-requirement greedy,
  which is exact for this objective;
* payoff (sum of request payoffs): descending payoff/requirement greedy with
  a better-of-prefix-or-single correction at the first request that does not
  fit, guaranteeing at least half the optimal payoff.

A subset-enumeration oracle is provided for testing and small instances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Mapping, Sequence

import numpy as np

from .errors import SizeCapError, ValidationError
from .model import DeploymentRequest
from .workforce import RequirementVector

Objective = Literal["throughput", "payoff"]


@dataclass(frozen=True)
class BatchPlan:
    """Outcome of planning: which requests to serve, with which strategies."""

    selected: tuple[str, ...]
    recommendations: dict[str, tuple[str, ...]]
    objective: float
    workforce_used: float


@dataclass(frozen=True)
class _Item:
    value: float
    request_id: str
    payoff: float
    recommended: tuple[str, ...]


def recommend_strategies(matrix_row: Mapping[str, float], k: int) -> list[str] | None:
    """The k strategies with smallest requirement, ties by ascending id.

    Returns None when fewer than k finite entries exist (the request cannot
    be satisfied and should be routed to request relaxation instead).
    """
    if k < 1:
        raise ValidationError(f"recommend_strategies: k must be >= 1, got {k}")
    finite = [(v, sid) for sid, v in matrix_row.items() if math.isfinite(v)]
    if len(finite) < k:
        return None
    finite.sort()
    return [sid for _, sid in finite[:k]]


def _items(batch: Sequence[DeploymentRequest], vector: RequirementVector) -> list[_Item]:
    if len(batch) != len(vector.entries) or any(
        d.id != e.request_id for d, e in zip(batch, vector.entries)
    ):
        raise ValidationError("plan: vector entries do not align with the batch")
    items = []
    for d, e in zip(batch, vector.entries):
        if math.isfinite(e.value):
            items.append(_Item(e.value, d.id, float(d.payoff), e.recommended or ()))
    return items


def _check_availability(W: float) -> float:
    W = float(W)
    if not 0.0 <= W <= 1.0:
        raise ValidationError(f"plan: availability W must lie in [0, 1], got {W}")
    return W


def plan_throughput(
    batch: Sequence[DeploymentRequest],
    vector: RequirementVector,
    W: float,
) -> BatchPlan:
    """Admit requests in ascending requirement order until the budget is hit.

    Exact for the throughput objective: any plan of size t must spend at
    least the sum of the t smallest requirements.
    """
    W = _check_availability(W)
    items = sorted(_items(batch, vector), key=lambda it: (it.value, it.request_id))
    selected: list[str] = []
    recommendations: dict[str, tuple[str, ...]] = {}
    used = 0.0
    for it in items:
        if used + it.value > W:
            break
        used += it.value
        selected.append(it.request_id)
        recommendations[it.request_id] = it.recommended
    return BatchPlan(tuple(selected), recommendations, float(len(selected)), used)


def plan_payoff(
    batch: Sequence[DeploymentRequest],
    vector: RequirementVector,
    W: float,
) -> BatchPlan:
    """Ratio greedy with a better-of correction; at least half of optimal.

    Zero-requirement requests are admitted first (they cost nothing and the
    payoff/requirement ratio is undefined for them).  Requests whose own
    requirement exceeds W can never be served and are skipped outright.  The
    rest are scanned by descending payoff/requirement ratio; at the first
    request that does not fit, the accumulated prefix is compared against
    that single request alone and the better one is kept, after which the
    scan continues admitting whatever still fits.
    """
    W = _check_availability(W)
    all_items = _items(batch, vector)
    zero = sorted((it for it in all_items if it.value == 0.0), key=lambda it: it.request_id)
    positive = [it for it in all_items if 0.0 < it.value <= W]
    positive.sort(key=lambda it: (-it.payoff / it.value, it.request_id))

    selected = [it.request_id for it in zero]
    recommendations = {it.request_id: it.recommended for it in zero}
    base_payoff = sum(it.payoff for it in zero)
    payoff = base_payoff
    used = 0.0
    decided = False
    for it in positive:
        if used + it.value <= W:
            used += it.value
            payoff += it.payoff
            selected.append(it.request_id)
            recommendations[it.request_id] = it.recommended
        elif not decided:
            decided = True
            if base_payoff + it.payoff > payoff:
                selected = [z.request_id for z in zero] + [it.request_id]
                recommendations = {z.request_id: z.recommended for z in zero}
                recommendations[it.request_id] = it.recommended
                payoff = base_payoff + it.payoff
                used = it.value
    return BatchPlan(tuple(selected), recommendations, payoff, used)


def baseline_ratio_greedy(
    batch: Sequence[DeploymentRequest],
    vector: RequirementVector,
    W: float,
    objective: Objective = "payoff",
) -> BatchPlan:
    """Plain ratio greedy without the better-of correction (comparison baseline).

    Scans by descending payoff/requirement (throughput: ascending
    requirement) and admits whatever fits, skipping what does not.
    """
    W = _check_availability(W)
    all_items = _items(batch, vector)
    zero = sorted((it for it in all_items if it.value == 0.0), key=lambda it: it.request_id)
    positive = [it for it in all_items if it.value > 0.0]
    if objective == "throughput":
        positive.sort(key=lambda it: (it.value, it.request_id))
    elif objective == "payoff":
        positive.sort(key=lambda it: (-it.payoff / it.value, it.request_id))
    else:
        raise ValidationError(f"baseline_ratio_greedy: unknown objective {objective!r}")
    selected = [it.request_id for it in zero]
    recommendations = {it.request_id: it.recommended for it in zero}
    payoff = sum(it.payoff for it in zero)
    used = 0.0
    for it in positive:
        if used + it.value <= W:
            used += it.value
            payoff += it.payoff
            selected.append(it.request_id)
            recommendations[it.request_id] = it.recommended
    objective_value = float(len(selected)) if objective == "throughput" else payoff
    return BatchPlan(tuple(selected), recommendations, objective_value, used)


def brute_force_plan(
    batch: Sequence[DeploymentRequest],
    vector: RequirementVector,
    W: float,
    objective: Objective = "throughput",
    cap: int = 20,
) -> BatchPlan:
    """Exhaustive optimum over all 2^m subsets; refuses above ``cap`` requests.

    Ties on the objective break toward the lexicographically smallest sorted
    id list.
    """
    W = _check_availability(W)
    if objective not in ("throughput", "payoff"):
        raise ValidationError(f"brute_force_plan: unknown objective {objective!r}")
    m = len(batch)
    if m > cap:
        raise SizeCapError(
            f"brute_force_plan: batch size {m} exceeds the enumeration cap {cap}"
        )
    items = _items(batch, vector)
    t = len(items)
    if t == 0:
        return BatchPlan((), {}, 0.0, 0.0)

    weights = np.array([it.value for it in items])
    payoffs = np.array([it.payoff for it in items])
    masks = np.arange(1 << t, dtype=np.uint64)
    bits = (masks[:, None] >> np.arange(t, dtype=np.uint64)) & np.uint64(1)
    bits = bits.astype(np.float64)
    totals = bits @ weights
    feasible = totals <= W
    scores = bits.sum(axis=1) if objective == "throughput" else bits @ payoffs
    scores = np.where(feasible, scores, -1.0)
    best = scores.max()
    if best <= 0.0:
        # the empty set is optimal and lexicographically smallest
        return BatchPlan((), {}, 0.0, 0.0)

    candidates = np.flatnonzero(scores == best)
    ids = [it.request_id for it in items]

    def id_tuple(mask: int) -> tuple[str, ...]:
        return tuple(sorted(ids[j] for j in range(t) if mask >> j & 1))

    winner = -1
    winner_ids: tuple[str, ...] = ()
    for mask in candidates:
        cand_ids = id_tuple(int(mask))
        if winner < 0 or cand_ids < winner_ids:
            winner, winner_ids = int(mask), cand_ids

    chosen = [items[j] for j in range(t) if winner >> j & 1]
    recommendations = {it.request_id: it.recommended for it in chosen}
    used = float(sum(it.value for it in chosen))
    value = float(len(chosen)) if objective == "throughput" else float(sum(it.payoff for it in chosen))
    return BatchPlan(winner_ids, recommendations, value, used)
