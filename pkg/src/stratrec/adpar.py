"""Minimal request relaxation: find the closest satisfiable alternative.

When no k strategies satisfy a request d, compute the alternative request d'
minimizing the squared L2 relaxation distance in normalized
(smaller-is-better) space subject to covering at least k strategies.  An
alternative covers a strategy when the strategy is componentwise at or below
d' in normalized space, i.e. the strategy satisfies d''s thresholds.

Any optimal d' is the componentwise envelope of the strategies it covers
joined with d, so each of its axes equals some strategy's per-axis relaxation
value.  The exact solver sweeps the sorted relaxation list; at every distinct
(axis, value) entry it pins that axis and solves the remaining 2-D problem by
a staircase scan (sorted by one free axis, maintaining the running k smallest
values of the other).  Two sound prunes keep it fast: a pin whose lower bound
value^2 + init_a^2 + init_b^2 already meets the best known objective is
skipped (init = the k-th smallest per-axis relaxation, a lower bound for any
covering box), and the sweep stops once 3 * r^2 reaches the best objective,
because every unexamined envelope has all three axis relaxations >= r.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .errors import CardinalityError, SizeCapError, ValidationError
from .model import DeploymentRequest, NormalizedPoint, Strategy
from .rng import SplitMix64

AxisTag = Literal["quality", "cost", "latency"]
AXIS_TAGS: tuple[AxisTag, AxisTag, AxisTag] = ("quality", "cost", "latency")

BRUTE_SUBSET_CAP = 10**6


@dataclass(frozen=True)
class Relaxation:
    """Per-(strategy, axis) increase the request needs to cover the strategy."""

    value: float
    strategy: str
    parameter: AxisTag


@dataclass(frozen=True)
class SweepState:
    """Final state of the exact sweep, exposed for inspection and tests.

    R holds all 3|S| relaxation values sorted ascending; I and D are the
    parallel strategy-index and axis-index lists.  M[j][p] is true exactly
    when the returned candidate covers strategy j on axis p.  The cursor
    counts how many entries the sweep consumed before the stop rule fired.
    """

    R: np.ndarray
    I: np.ndarray
    D: np.ndarray
    M: np.ndarray
    cursor: int
    candidate: NormalizedPoint


@dataclass(frozen=True)
class AdparResult:
    """An alternative request, the k strategies backing it, and the distance."""

    alternative: DeploymentRequest
    chosen: tuple[str, ...]
    distance: float


def _prepare(
    catalog: Sequence[Strategy],
    d: DeploymentRequest,
    k: int | None,
) -> tuple[list[str], np.ndarray, np.ndarray, np.ndarray, np.ndarray, int]:
    if k is None:
        k = d.k
    if not isinstance(k, int) or isinstance(k, bool) or k < 1:
        raise ValidationError(f"relaxation: k must be a positive integer, got {k!r}")
    n = len(catalog)
    if n == 0:
        raise CardinalityError("relaxation: catalog is empty")
    if k > n:
        raise CardinalityError(f"relaxation: k={k} exceeds catalog size {n}")
    ids = [s.id for s in catalog]
    if len(set(ids)) != len(ids):
        raise ValidationError("relaxation: duplicate strategy ids in catalog")
    orig = np.empty((n, 3))
    for j, s in enumerate(catalog):
        orig[j, 0] = s.quality
        orig[j, 1] = s.cost
        orig[j, 2] = s.latency
    pts = orig.copy()
    pts[:, 0] = 1.0 - pts[:, 0]
    d_norm = np.array([1.0 - d.quality, d.cost, d.latency])
    relax = np.maximum(pts - d_norm, 0.0)
    return ids, orig, pts, d_norm, np.ascontiguousarray(relax), k


def compute_relaxations(catalog: Sequence[Strategy], d: DeploymentRequest) -> list[Relaxation]:
    """All 3|S| per-(strategy, axis) relaxations, sorted ascending.

    Ties order by axis (quality, cost, latency) and then strategy position.
    """
    ids, _, _, _, relax, _ = _prepare(catalog, d, 1)
    entries = [
        Relaxation(float(relax[j, a]), ids[j], AXIS_TAGS[a])
        for j in range(len(ids))
        for a in range(3)
    ]
    entries.sort(key=lambda r: (r.value, AXIS_TAGS.index(r.parameter)))
    return entries


def _choose_covered(
    relax: np.ndarray, rho: np.ndarray, ids: Sequence[str], k: int
) -> list[int]:
    """The k covered strategies of smallest own relaxation, ties by id."""
    covered = np.flatnonzero(
        (relax[:, 0] <= rho[0]) & (relax[:, 1] <= rho[1]) & (relax[:, 2] <= rho[2])
    )
    own = (relax[covered] ** 2).sum(axis=1)
    order = sorted(range(covered.size), key=lambda t: (own[t], ids[covered[t]]))
    return [int(covered[t]) for t in order[:k]]


def _result(
    d: DeploymentRequest,
    ids: Sequence[str],
    orig: np.ndarray,
    chosen_idx: Sequence[int],
    k: int,
) -> AdparResult:
    """Build the result from a chosen index set: envelope, distance, ids.

    The alternative is the componentwise envelope of the chosen strategies
    joined with d, evaluated on the raw strategy coordinates so that every
    chosen strategy satisfies it exactly (no float drift).
    """
    sub = orig[list(chosen_idx)]
    alt_q = min(float(d.quality), float(sub[:, 0].min()))
    alt_c = max(float(d.cost), float(sub[:, 1].max()))
    alt_l = max(float(d.latency), float(sub[:, 2].max()))
    dq = d.quality - alt_q
    dc = alt_c - d.cost
    dl = alt_l - d.latency
    distance = math.sqrt(dq * dq + dc * dc + dl * dl)
    alternative = DeploymentRequest(
        id=d.id,
        quality=alt_q,
        cost=alt_c,
        latency=alt_l,
        k=k,
        payoff=d.payoff,
    )
    chosen_ids = tuple(sorted(ids[j] for j in chosen_idx))
    return AdparResult(alternative, chosen_ids, distance)


def _sweep_core_impl(relax, orders, evals, eaxis, init, k):
    """Sweep all sorted (axis, value) pins; returns (best obj, axes, cursor)."""
    total = evals.shape[0]
    n = relax.shape[0]
    best = np.inf
    best_axes = np.zeros(3)
    kbuf = np.empty(k)
    last_ax = -1
    last_v = -1.0
    cursor = total
    for t in range(total):
        v = evals[t]
        ax = eaxis[t]
        if 3.0 * v * v >= best:
            cursor = t
            break
        if ax == last_ax and v == last_v:
            continue
        last_ax = ax
        last_v = v
        a = 1 if ax == 0 else 0
        b = 1 if ax == 2 else 2
        if v * v + init[a] * init[a] + init[b] * init[b] >= best:
            continue
        order = orders[a]
        cnt = 0
        for oi in range(n):
            idx = order[oi]
            ra = relax[idx, a]
            if v * v + ra * ra >= best:
                break
            if relax[idx, ax] > v:
                continue
            rb = relax[idx, b]
            if cnt < k:
                j = cnt
                while j > 0 and kbuf[j - 1] > rb:
                    kbuf[j] = kbuf[j - 1]
                    j -= 1
                kbuf[j] = rb
                cnt += 1
            elif rb < kbuf[k - 1]:
                j = k - 1
                while j > 0 and kbuf[j - 1] > rb:
                    kbuf[j] = kbuf[j - 1]
                    j -= 1
                kbuf[j] = rb
            if cnt >= k:
                kb = kbuf[k - 1]
                obj = v * v + ra * ra + kb * kb
                if obj < best:
                    best = obj
                    best_axes[ax] = v
                    best_axes[a] = ra
                    best_axes[b] = kb
    return best, best_axes, cursor


try:  # JIT the kernel when numba is available; plain Python otherwise
    from numba import njit

    _sweep_core = njit(cache=True)(_sweep_core_impl)
except ImportError:  # pragma: no cover
    _sweep_core = _sweep_core_impl


def adpar_exact(
    catalog: Sequence[Strategy],
    d: DeploymentRequest,
    k: int | None = None,
    return_state: bool = False,
) -> AdparResult | tuple[AdparResult, SweepState]:
    """Exact minimal relaxation covering at least k strategies.

    Matches the subset-enumeration oracle's distance on every instance; the
    reported strategies are the k covered ones with smallest own relaxation.
    """
    ids, orig, pts, d_norm, relax, k = _prepare(catalog, d, k)
    n = len(ids)

    vals_flat = relax.ravel()
    axis_flat = np.tile(np.arange(3, dtype=np.int64), n)
    strat_flat = np.repeat(np.arange(n, dtype=np.int64), 3)
    entry_order = np.lexsort((strat_flat, axis_flat, vals_flat))
    evals = np.ascontiguousarray(vals_flat[entry_order])
    eaxis = np.ascontiguousarray(axis_flat[entry_order])
    estrat = np.ascontiguousarray(strat_flat[entry_order])

    zero_rows = int(((relax == 0.0).all(axis=1)).sum())
    if zero_rows >= k:
        rho = np.zeros(3)
        cursor = 0
    else:
        orders = np.ascontiguousarray(
            np.vstack([np.argsort(relax[:, a], kind="stable") for a in range(3)])
        )
        init = np.array([float(relax[orders[a, k - 1], a]) for a in range(3)])
        best, rho, cursor = _sweep_core(relax, orders, evals, eaxis, init, int(k))
        cursor = int(cursor)

    chosen = _choose_covered(relax, rho, ids, k)
    result = _result(d, ids, orig, chosen, k)
    if not return_state:
        return result
    alt = result.alternative
    candidate = NormalizedPoint(1.0 - alt.quality, alt.cost, alt.latency)
    cand_arr = np.array(candidate.as_tuple())
    M = pts <= cand_arr[None, :]
    state = SweepState(R=evals, I=estrat, D=eaxis, M=M, cursor=cursor, candidate=candidate)
    return result, state


def adpar_brute(
    catalog: Sequence[Strategy],
    d: DeploymentRequest,
    k: int | None = None,
    cap: int = BRUTE_SUBSET_CAP,
) -> AdparResult:
    """Envelope of the best k-subset by exhaustive enumeration.

    Ties on the objective break toward the lexicographically smallest sorted
    id list.  Refuses when C(|catalog|, k) exceeds ``cap``.
    """
    ids, pts, d_norm, relax, k = _prepare(catalog, d, k)
    n = len(ids)
    total = math.comb(n, k)
    if total > cap:
        raise SizeCapError(
            f"adpar_brute: C({n}, {k}) = {total} subsets exceeds the cap {cap}"
        )
    rows = relax.tolist()
    best_obj = math.inf
    best_ids: tuple[str, ...] | None = None
    best_combo: tuple[int, ...] = ()
    for combo in itertools.combinations(range(n), k):
        mq = mc = ml = 0.0
        for j in combo:
            row = rows[j]
            if row[0] > mq:
                mq = row[0]
            if row[1] > mc:
                mc = row[1]
            if row[2] > ml:
                ml = row[2]
        obj = mq * mq + mc * mc + ml * ml
        if obj > best_obj:
            continue
        combo_ids = tuple(sorted(ids[j] for j in combo))
        if obj < best_obj or (best_ids is not None and combo_ids < best_ids):
            best_obj = obj
            best_ids = combo_ids
            best_combo = combo
    return _result(d, ids, pts, d_norm, list(best_combo), k)


def baseline_one_dim(
    catalog: Sequence[Strategy],
    d: DeploymentRequest,
    k: int | None = None,
) -> AdparResult | None:
    """Relax a single axis only; None (FAILURE) when no one axis suffices.

    For each axis, only strategies already satisfying the other two
    thresholds count; the minimal relaxation is the k-th smallest relaxation
    on that axis among them.
    """
    ids, pts, d_norm, relax, k = _prepare(catalog, d, k)
    best_v = math.inf
    best_axis = -1
    for p in range(3):
        a = 1 if p == 0 else 0
        b = 1 if p == 2 else 2
        mask = (relax[:, a] == 0.0) & (relax[:, b] == 0.0)
        vals = relax[mask, p]
        if vals.size < k:
            continue
        v = float(np.partition(vals, k - 1)[k - 1])
        if v < best_v:
            best_v = v
            best_axis = p
    if best_axis < 0:
        return None
    rho = np.zeros(3)
    rho[best_axis] = best_v
    chosen = _choose_covered(relax, rho, ids, k)
    return _result(d, ids, pts, d_norm, chosen, k)


def baseline_mbb(
    catalog: Sequence[Strategy],
    d: DeploymentRequest,
    k: int | None = None,
    seed: int = 0,
) -> AdparResult:
    """Bounding-box baseline: box around the k nearest strategies.

    Builds the envelope of the k strategies nearest to d (own relaxation
    distance, ties by id).  If the box happens to cover more than k
    strategies, k of the covered are picked at random under the run seed.
    """
    ids, pts, d_norm, relax, k = _prepare(catalog, d, k)
    own = (relax**2).sum(axis=1)
    nearest = sorted(range(len(ids)), key=lambda j: (own[j], ids[j]))[:k]
    rho = relax[nearest].max(axis=0)
    covered = np.flatnonzero(
        (relax[:, 0] <= rho[0]) & (relax[:, 1] <= rho[1]) & (relax[:, 2] <= rho[2])
    )
    if covered.size == k:
        chosen = [int(j) for j in covered]
    else:
        rng = SplitMix64(seed).substream("mbb")
        picks = rng.sample_indices(int(covered.size), k)
        chosen = [int(covered[t]) for t in picks]
    return _result(d, ids, pts, d_norm, chosen, k)
