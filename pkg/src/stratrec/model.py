"""Core domain types: strategies, deployment requests, availability.

A strategy is a point (quality, cost, latency) in [0,1]^3 describing how a
task could be deployed.  A deployment request carries thresholds over the
same three parameters (quality is a lower bound, cost and latency are upper
bounds) plus a cardinality k: the requester wants k distinct strategies that
all satisfy the thresholds.

The normalized space flips quality to 1 - quality so that smaller is better
on every axis; request relaxation works entirely in that space.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ValidationError


def _check_unit(owner: str, name: str, value: float) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ValidationError(f"{owner}: {name} must be a number, got {value!r}") from None
    if not 0.0 <= value <= 1.0:
        raise ValidationError(f"{owner}: {name} must lie in [0, 1], got {value}")
    return value


def _check_id(owner: str, value: str) -> str:
    if not isinstance(value, str) or not value:
        raise ValidationError(f"{owner}: id must be a non-empty string, got {value!r}")
    if any(ch.isspace() for ch in value):
        raise ValidationError(f"{owner}: id must not contain whitespace, got {value!r}")
    return value


@dataclass(frozen=True)
class Strategy:
    """A deployment strategy: a (quality, cost, latency) point in [0,1]^3."""

    id: str
    quality: float
    cost: float
    latency: float
    label: str | None = None

    def __post_init__(self) -> None:
        _check_id("strategy", self.id)
        object.__setattr__(self, "quality", _check_unit(f"strategy {self.id}", "quality", self.quality))
        object.__setattr__(self, "cost", _check_unit(f"strategy {self.id}", "cost", self.cost))
        object.__setattr__(self, "latency", _check_unit(f"strategy {self.id}", "latency", self.latency))


@dataclass(frozen=True)
class DeploymentRequest:
    """Thresholds plus cardinality: quality is a floor, cost/latency are caps.

    ``payoff`` is the reward for satisfying the request; when omitted it
    defaults to the cost threshold (the amount the requester is willing to
    pay).
    """

    id: str
    quality: float
    cost: float
    latency: float
    k: int
    payoff: float | None = None

    def __post_init__(self) -> None:
        _check_id("request", self.id)
        owner = f"request {self.id}"
        object.__setattr__(self, "quality", _check_unit(owner, "quality", self.quality))
        object.__setattr__(self, "cost", _check_unit(owner, "cost", self.cost))
        object.__setattr__(self, "latency", _check_unit(owner, "latency", self.latency))
        if not isinstance(self.k, int) or isinstance(self.k, bool) or self.k < 1:
            raise ValidationError(f"{owner}: k must be a positive integer, got {self.k!r}")
        if self.payoff is None:
            object.__setattr__(self, "payoff", self.cost)
        else:
            payoff = float(self.payoff)
            if payoff < 0.0:
                raise ValidationError(f"{owner}: payoff must be >= 0, got {payoff}")
            object.__setattr__(self, "payoff", payoff)


@dataclass(frozen=True)
class AvailabilityPdf:
    """Discrete pdf over the fraction of the workforce that shows up.

    Entries are (value, probability) pairs; values lie in [0,1] and the
    probabilities must sum to 1 within 1e-9.
    """

    entries: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        if not self.entries:
            raise ValidationError("availability pdf: needs at least one (value, probability) entry")
        cleaned = []
        for i, entry in enumerate(self.entries):
            if len(entry) != 2:
                raise ValidationError(f"availability pdf: entry {i} must be a (value, probability) pair, got {entry!r}")
            value = _check_unit("availability pdf", f"entry {i} value", entry[0])
            prob = _check_unit("availability pdf", f"entry {i} probability", entry[1])
            cleaned.append((value, prob))
        total = sum(p for _, p in cleaned)
        if abs(total - 1.0) > 1e-9:
            raise ValidationError(f"availability pdf: probabilities must sum to 1 within 1e-9, got {total}")
        object.__setattr__(self, "entries", tuple(cleaned))


def expected_availability(pdf: AvailabilityPdf) -> float:
    """Expected available fraction W of the workforce."""
    return sum(value * prob for value, prob in pdf.entries)


def satisfies(strategy: Strategy, request: DeploymentRequest) -> bool:
    """True when the strategy meets all three thresholds of the request."""
    return (
        strategy.quality >= request.quality
        and strategy.cost <= request.cost
        and strategy.latency <= request.latency
    )


@dataclass(frozen=True)
class NormalizedPoint:
    """A point in the smaller-is-better space: (1 - quality, cost, latency)."""

    quality: float
    cost: float
    latency: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.quality, self.cost, self.latency)


def normalize(strategy: Strategy) -> NormalizedPoint:
    return NormalizedPoint(1.0 - strategy.quality, strategy.cost, strategy.latency)


def normalize_request(request: DeploymentRequest) -> NormalizedPoint:
    return NormalizedPoint(1.0 - request.quality, request.cost, request.latency)


def denormalize(point: NormalizedPoint) -> tuple[float, float, float]:
    """Map a normalized point back to (quality, cost, latency)."""
    return (1.0 - point.quality, point.cost, point.latency)


def covers(strategy_point: NormalizedPoint, request_point: NormalizedPoint) -> bool:
    """Normalized dominance: the strategy is at or below the request on every axis."""
    return (
        strategy_point.quality <= request_point.quality
        and strategy_point.cost <= request_point.cost
        and strategy_point.latency <= request_point.latency
    )
