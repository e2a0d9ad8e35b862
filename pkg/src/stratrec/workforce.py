"""Linear workforce models and per-request requirement computation.

Each (strategy, parameter) pair carries a linear model ``value = alpha * w +
beta`` mapping the available workforce fraction w to the parameter value the
strategy achieves.  The workforce requirement of deploying request d with
strategy s is the smallest w at which all three thresholds are met: each
parameter's equality is solved for w, negative solutions clamp to 0
(threshold already met with nobody), and the requirement is the maximum of
the three solves.  Requirements above 1 are INFEASIBLE: there is no workforce
fraction in [0, 1] that satisfies the request.

INFEASIBLE is represented as ``math.inf`` so matrices stay rectangular and
aggregation stays algebraic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Mapping, Sequence

import numpy as np

from .errors import ConfigurationError, ValidationError
from .model import DeploymentRequest, Strategy

INFEASIBLE = math.inf

AXES: tuple[str, str, str] = ("quality", "cost", "latency")

AggregateMode = Literal["sum", "max"]


@dataclass(frozen=True)
class LinearModel:
    """value(w) = alpha * w + beta."""

    alpha: float
    beta: float

    def evaluate(self, w: float) -> float:
        return self.alpha * w + self.beta


@dataclass(frozen=True)
class StrategyModelSet:
    """The three per-parameter linear models of one strategy.

    ``physical`` asserts the natural signs: quality rises and latency falls
    as more workers become available.
    """

    quality_model: LinearModel
    cost_model: LinearModel
    latency_model: LinearModel
    physical: bool = False

    def __post_init__(self) -> None:
        if self.physical:
            if self.quality_model.alpha < 0:
                raise ValidationError(
                    f"physical model set: quality slope must be >= 0, got {self.quality_model.alpha}"
                )
            if self.latency_model.alpha > 0:
                raise ValidationError(
                    f"physical model set: latency slope must be <= 0, got {self.latency_model.alpha}"
                )

    def model_for(self, axis: str) -> LinearModel:
        if axis == "quality":
            return self.quality_model
        if axis == "cost":
            return self.cost_model
        if axis == "latency":
            return self.latency_model
        raise ValidationError(f"unknown parameter axis {axis!r}")


class ModelCatalog:
    """Model sets for a whole catalog, stored as coefficient arrays.

    ``alpha`` and ``beta`` have shape (3, n) in axis order quality, cost,
    latency, so column j holds strategy j's coefficients.  ``overrides`` maps
    (strategy id, request id) to a replacement model set for that single
    pair.
    """

    def __init__(
        self,
        ids: Sequence[str],
        alpha: np.ndarray,
        beta: np.ndarray,
        physical: bool | np.ndarray = False,
        overrides: Mapping[tuple[str, str], StrategyModelSet] | None = None,
    ) -> None:
        self.ids = list(ids)
        self.alpha = np.ascontiguousarray(alpha, dtype=np.float64)
        self.beta = np.ascontiguousarray(beta, dtype=np.float64)
        if self.alpha.shape != (3, len(self.ids)) or self.beta.shape != (3, len(self.ids)):
            raise ValidationError(
                f"model catalog: coefficient arrays must have shape (3, {len(self.ids)}), "
                f"got alpha {self.alpha.shape} and beta {self.beta.shape}"
            )
        if isinstance(physical, np.ndarray):
            self.physical = physical.astype(bool)
        else:
            self.physical = np.full(len(self.ids), bool(physical))
        self.overrides = dict(overrides or {})
        self._index = {sid: j for j, sid in enumerate(self.ids)}
        if len(self._index) != len(self.ids):
            raise ValidationError("model catalog: duplicate strategy ids")

    @classmethod
    def from_sets(
        cls,
        sets: Mapping[str, StrategyModelSet],
        overrides: Mapping[tuple[str, str], StrategyModelSet] | None = None,
    ) -> "ModelCatalog":
        ids = list(sets)
        n = len(ids)
        alpha = np.empty((3, n))
        beta = np.empty((3, n))
        physical = np.empty(n, dtype=bool)
        for j, sid in enumerate(ids):
            ms = sets[sid]
            for a, axis in enumerate(AXES):
                m = ms.model_for(axis)
                alpha[a, j] = m.alpha
                beta[a, j] = m.beta
            physical[j] = ms.physical
        return cls(ids, alpha, beta, physical, overrides)

    def __len__(self) -> int:
        return len(self.ids)

    def __contains__(self, sid: str) -> bool:
        return sid in self._index

    def set_for(self, sid: str) -> StrategyModelSet:
        try:
            j = self._index[sid]
        except KeyError:
            raise ConfigurationError(f"no model set for strategy {sid!r}") from None
        return StrategyModelSet(
            LinearModel(float(self.alpha[0, j]), float(self.beta[0, j])),
            LinearModel(float(self.alpha[1, j]), float(self.beta[1, j])),
            LinearModel(float(self.alpha[2, j]), float(self.beta[2, j])),
            physical=bool(self.physical[j]),
        )

    def set_for_pair(self, sid: str, request_id: str) -> StrategyModelSet:
        override = self.overrides.get((sid, request_id))
        if override is not None:
            return override
        return self.set_for(sid)


def _axis_solve(alpha: float, beta: float, threshold: float, meets_at_zero: bool) -> float:
    """Clamped equality solve for one parameter; inf when unreachable."""
    if alpha == 0.0:
        return 0.0 if meets_at_zero else INFEASIBLE
    w = (threshold - beta) / alpha
    return w if w > 0.0 else 0.0


def required_workforce(
    models: StrategyModelSet,
    d: DeploymentRequest,
    strict_cost: bool = False,
) -> float:
    """Minimal workforce fraction at which the strategy meets all thresholds.

    Default behavior takes the maximum of the three clamped equality solves
    and declares INFEASIBLE above 1.  With ``strict_cost`` the cost solve is
    treated as an upper cap instead of a requirement (cost is a budget the
    deployment must stay under, assuming cost rises with workforce):
    requirement = max of the quality and latency solves, INFEASIBLE when it
    exceeds min(cost cap, 1).
    """
    mq, mc, ml = models.quality_model, models.cost_model, models.latency_model
    wq = _axis_solve(mq.alpha, mq.beta, d.quality, mq.beta >= d.quality)
    wl = _axis_solve(ml.alpha, ml.beta, d.latency, ml.beta <= d.latency)
    if strict_cost:
        req = max(wq, wl)
        if mc.alpha == 0.0:
            cap = INFEASIBLE if mc.beta <= d.cost else -INFEASIBLE
        else:
            cap = (d.cost - mc.beta) / mc.alpha
        if req <= cap and req <= 1.0:
            return req
        return INFEASIBLE
    wc = _axis_solve(mc.alpha, mc.beta, d.cost, mc.beta <= d.cost)
    w = max(wq, wc, wl)
    return w if w <= 1.0 else INFEASIBLE


@dataclass(frozen=True)
class RequirementMatrix:
    """m x n grid of workforce requirements; inf marks infeasible pairs."""

    request_ids: tuple[str, ...]
    strategy_ids: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.values.shape != (len(self.request_ids), len(self.strategy_ids)):
            raise ValidationError(
                f"requirement matrix: values shape {self.values.shape} does not match "
                f"{len(self.request_ids)} requests x {len(self.strategy_ids)} strategies"
            )

    def row(self, i: int) -> np.ndarray:
        return self.values[i]

    def row_mapping(self, i: int) -> dict[str, float]:
        return dict(zip(self.strategy_ids, self.values[i].tolist()))


def _catalog_ids(catalog: Sequence[Strategy] | Sequence[str]) -> list[str]:
    ids = [s.id if isinstance(s, Strategy) else s for s in catalog]
    if len(set(ids)) != len(ids):
        raise ValidationError("catalog: duplicate strategy ids")
    return ids


def build_matrix(
    batch: Sequence[DeploymentRequest],
    catalog: Sequence[Strategy] | Sequence[str],
    models: ModelCatalog,
    strict_cost: bool = False,
) -> RequirementMatrix:
    """Requirement of every (request, strategy) pair, vectorized per row."""
    if len(batch) == 0:
        raise ValidationError("build_matrix: batch must be non-empty")
    if len(catalog) == 0:
        raise ValidationError("build_matrix: catalog must be non-empty")
    request_ids = [d.id for d in batch]
    if len(set(request_ids)) != len(request_ids):
        raise ValidationError("batch: duplicate request ids")
    strategy_ids = _catalog_ids(catalog)

    if strategy_ids == models.ids:
        alpha, beta = models.alpha, models.beta
    else:
        try:
            cols = [models._index[sid] for sid in strategy_ids]
        except KeyError as missing:
            raise ConfigurationError(f"no model set for strategy {missing.args[0]!r}") from None
        alpha = np.ascontiguousarray(models.alpha[:, cols])
        beta = np.ascontiguousarray(models.beta[:, cols])

    n = len(strategy_ids)
    m = len(batch)
    with np.errstate(divide="ignore", invalid="ignore"):
        inv_alpha = np.where(alpha != 0.0, 1.0 / alpha, 0.0)
    zero_axis = alpha == 0.0
    any_zero = bool(zero_axis.any())

    values = np.empty((m, n))
    buf = np.empty(n)
    acc = np.empty(n)
    for i, d in enumerate(batch):
        thresholds = (d.quality, d.cost, d.latency)
        if strict_cost:
            acc.fill(0.0)
            for a in (0, 2):
                np.subtract(thresholds[a], beta[a], out=buf)
                np.multiply(buf, inv_alpha[a], out=buf)
                np.maximum(buf, 0.0, out=buf)
                if any_zero:
                    meets = beta[a] >= thresholds[a] if a == 0 else beta[a] <= thresholds[a]
                    buf[zero_axis[a]] = np.where(meets[zero_axis[a]], 0.0, INFEASIBLE)
                np.maximum(acc, buf, out=acc)
            np.subtract(thresholds[1], beta[1], out=buf)
            np.multiply(buf, inv_alpha[1], out=buf)
            if any_zero:
                meets_c = beta[1] <= thresholds[1]
                buf[zero_axis[1]] = np.where(meets_c[zero_axis[1]], INFEASIBLE, -INFEASIBLE)
            row = np.where((acc <= buf) & (acc <= 1.0), acc, INFEASIBLE)
        else:
            acc.fill(-INFEASIBLE)
            for a in range(3):
                np.subtract(thresholds[a], beta[a], out=buf)
                np.multiply(buf, inv_alpha[a], out=buf)
                if any_zero:
                    meets = beta[a] >= thresholds[a] if a == 0 else beta[a] <= thresholds[a]
                    buf[zero_axis[a]] = np.where(meets[zero_axis[a]], 0.0, INFEASIBLE)
                np.maximum(acc, buf, out=acc)
            np.maximum(acc, 0.0, out=acc)
            row = np.where(acc <= 1.0, acc, INFEASIBLE)
        values[i] = row

    if models.overrides:
        col = {sid: j for j, sid in enumerate(strategy_ids)}
        row_index = {rid: i for i, rid in enumerate(request_ids)}
        for (sid, rid), ms in models.overrides.items():
            if sid in col and rid in row_index:
                values[row_index[rid], col[sid]] = required_workforce(ms, batch[row_index[rid]], strict_cost)

    return RequirementMatrix(tuple(request_ids), tuple(strategy_ids), values)


def aggregate(row: Sequence[float] | np.ndarray, k: int, mode: AggregateMode = "sum") -> float:
    """Aggregate one matrix row into the request's overall requirement.

    "sum" deploys all k recommended strategies (sum of the k smallest
    entries); "max" deploys one of the k (the k-th smallest entry).  Returns
    INFEASIBLE when fewer than k finite entries exist, or when the sum
    exceeds the whole workforce.
    """
    if k < 1:
        raise ValidationError(f"aggregate: k must be >= 1, got {k}")
    if mode not in ("sum", "max"):
        raise ValidationError(f"aggregate: unknown mode {mode!r}")
    arr = np.asarray(row, dtype=np.float64)
    finite = arr[np.isfinite(arr)]
    if finite.size < k:
        return INFEASIBLE
    smallest = np.partition(finite, k - 1)[:k]
    if mode == "max":
        return float(smallest.max())
    total = float(smallest.sum())
    return total if total <= 1.0 else INFEASIBLE


@dataclass(frozen=True)
class RequirementEntry:
    """One request's aggregated requirement and its k recommended strategies."""

    request_id: str
    value: float
    recommended: tuple[str, ...] | None


@dataclass(frozen=True)
class RequirementVector:
    """Per-request aggregate requirements, tagged with the aggregation mode."""

    entries: tuple[RequirementEntry, ...]
    mode: AggregateMode

    def __len__(self) -> int:
        return len(self.entries)

    def values(self) -> np.ndarray:
        return np.array([e.value for e in self.entries])


def _k_smallest_columns(row: np.ndarray, strategy_ids: Sequence[str], k: int) -> list[int] | None:
    """Column indices of the k smallest finite entries, ties by ascending id.

    Returns None when fewer than k finite entries exist.  Uses argpartition
    so million-column rows stay cheap; only boundary ties fall back to id
    sorting.
    """
    n = row.shape[0]
    if k > n:
        return None
    if k == n:
        cand = np.arange(n)
    else:
        cand = np.argpartition(row, k - 1)[:k]
    sel_vals = row[cand]
    kth = sel_vals.max()
    if not np.isfinite(kth):
        # the k smallest already include an infeasible entry
        return None
    strict = np.flatnonzero(row < kth)
    need = k - strict.size
    chosen = strict.tolist()
    if need > 0:
        at_kth = np.flatnonzero(row == kth).tolist()
        if len(at_kth) > need:
            at_kth.sort(key=lambda j: strategy_ids[j])
            at_kth = at_kth[:need]
        chosen.extend(at_kth)
    chosen.sort(key=lambda j: (row[j], strategy_ids[j]))
    return chosen


def requirement_vector(
    matrix: RequirementMatrix,
    batch: Sequence[DeploymentRequest],
    mode: AggregateMode = "sum",
) -> RequirementVector:
    """Aggregate every row with its own request's k; recommendations included."""
    if tuple(d.id for d in batch) != matrix.request_ids:
        raise ValidationError("requirement_vector: batch does not match matrix rows")
    if mode not in ("sum", "max"):
        raise ValidationError(f"requirement_vector: unknown mode {mode!r}")
    entries = []
    for i, d in enumerate(batch):
        row = matrix.values[i]
        cols = _k_smallest_columns(row, matrix.strategy_ids, d.k)
        if cols is None:
            entries.append(RequirementEntry(d.id, INFEASIBLE, None))
            continue
        picked = row[cols]
        value = float(picked.max()) if mode == "max" else float(picked.sum())
        if mode == "sum" and value > 1.0:
            entries.append(RequirementEntry(d.id, INFEASIBLE, None))
            continue
        entries.append(RequirementEntry(d.id, value, tuple(matrix.strategy_ids[j] for j in cols)))
    return RequirementVector(tuple(entries), mode)
