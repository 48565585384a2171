"""Stream stability measures: rank-biased overlap and windowed KL divergence.

Rank-biased overlap (RBO) scores the agreement of two rankings through the
geometrically weighted overlap of their rank prefixes.  Three variants are
provided:

* ``plain``       -- overlap at depth d divided by d (meaningful for
                     tie-free rankings),
* ``tie_aware``   -- twice the overlap divided by the combined prefix
                     sizes, so tied groups are handled gracefully,
* ``tie_corrected`` -- the tie_aware summand accumulated only over depths
                     at which some rank value actually occurs, which
                     penalizes rankings that consist of large tied groups.

``tie_corrected`` with p = 0.9 is the default throughout the package.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EmptyInputError, InsufficientDataError, ParameterError
from .streams import FrequencySnapshot, RankedList, TagStream, rank

VARIANTS = ("plain", "tie_aware", "tie_corrected")

DEFAULT_P = 0.9
DEFAULT_WINDOW = 10
DEFAULT_TOP_K = 25


@dataclass(frozen=True)
class RboParams:
    """Persistence parameter p in [0, 1) and the variant to evaluate."""

    p: float = DEFAULT_P
    variant: str = "tie_corrected"

    def __post_init__(self) -> None:
        if not 0.0 <= self.p < 1.0:
            raise ParameterError(f"p must satisfy 0 <= p < 1, got {self.p}")
        if self.variant not in VARIANTS:
            raise ParameterError(
                f"variant must be one of {VARIANTS}, got {self.variant!r}"
            )


@dataclass(frozen=True)
class RboTrajectory:
    """Window-to-window RBO values of one stream at multiples of ``window``."""

    resource_id: str
    window: int
    p: float
    variant: str
    points: tuple[tuple[int, float], ...]


def _prefix_sizes(rank_values, dmax: int) -> np.ndarray:
    """prefix_sizes[d-1] = number of entries ranked at depth <= d."""
    counts = np.zeros(dmax, dtype=float)
    for r in rank_values:
        counts[r - 1] += 1
    return np.cumsum(counts)


def rbo(l1: RankedList, l2: RankedList, params: RboParams | None = None) -> float:
    """Rank-biased overlap of two competition-ranked lists.

    The prefix of a list at depth d is the set of tags with rank <= d; the
    sum runs over depths up to the largest rank value in either list (no
    extrapolation beyond the observed lists).  Symmetric in its arguments.
    """
    if params is None:
        params = RboParams()
    if len(l1) == 0 or len(l2) == 0:
        raise EmptyInputError("rbo requires two non-empty rankings")
    p = params.p
    ranks1 = {e.tag: e.rank for e in l1.entries}
    ranks2 = {e.tag: e.rank for e in l2.entries}
    dmax = max(l1.max_rank, l2.max_rank)
    size1 = _prefix_sizes(ranks1.values(), dmax)
    size2 = _prefix_sizes(ranks2.values(), dmax)
    # A shared tag joins the prefix intersection once both lists reach it.
    shared = [max(r, ranks2[t]) for t, r in ranks1.items() if t in ranks2]
    inter = _prefix_sizes(shared, dmax)

    depths = np.arange(1, dmax + 1, dtype=float)
    weights = (1.0 - p) * p ** (depths - 1.0)
    if params.variant == "plain":
        agreement = inter / depths
    else:
        agreement = 2.0 * inter / (size1 + size2)
    if params.variant == "tie_corrected":
        occurring = sorted(set(ranks1.values()) | set(ranks2.values()))
        idx = np.asarray(occurring, dtype=int) - 1
        return float(np.dot(weights[idx], agreement[idx]))
    return float(np.dot(weights, agreement))


def weight_of_prefix(p: float, depth: int) -> float:
    """Fraction of the total RBO weight carried by ranks 1..depth.

    Computed as 1 - p^(d-1) + d*(1-p)/p * (ln(1/(1-p)) - sum_{i<d} p^i/i).
    With p = 0.9 the first 10 ranks carry about 86% of the weight.
    """
    if not 0.0 < p < 1.0:
        raise ParameterError(f"p must satisfy 0 < p < 1, got {p}")
    if depth < 1:
        raise ParameterError(f"depth must be >= 1, got {depth}")
    partial = sum(p**i / i for i in range(1, depth))
    return (
        1.0
        - p ** (depth - 1)
        + ((1.0 - p) / p) * depth * (math.log(1.0 / (1.0 - p)) - partial)
    )


def rbo_trajectory(
    stream: TagStream, window: int = DEFAULT_WINDOW, params: RboParams | None = None
) -> RboTrajectory:
    """RBO between the stream's cumulative rankings ``window`` apart.

    Produces a point at every t in {2*window, 3*window, ...} comparing the
    ranking after t - window assignments with the ranking after t.
    """
    if params is None:
        params = RboParams()
    if window < 1:
        raise ParameterError(f"window must be >= 1, got {window}")
    if len(stream) < 2 * window:
        raise InsufficientDataError(
            f"stream of length {len(stream)} is shorter than two windows of {window}"
        )
    counts: Counter[str] = Counter()
    points = []
    previous: RankedList | None = None
    for t, assignment in enumerate(stream.assignments, start=1):
        counts[assignment.tag] += 1
        if t % window == 0:
            current = rank(FrequencySnapshot(stream.resource_id, t, dict(counts)))
            if previous is not None:
                points.append((t, rbo(previous, current, params)))
            previous = current
    return RboTrajectory(
        stream.resource_id, window, params.p, params.variant, tuple(points)
    )


def kl_divergence(p: Sequence[float], q: Sequence[float]) -> float:
    """Kullback-Leibler divergence sum_i p_i * ln(p_i / q_i).

    Both vectors must sum to 1 (within 1e-9) and q must be strictly
    positive wherever p is; terms with p_i = 0 contribute nothing.
    """
    if len(p) != len(q):
        raise ParameterError(
            f"distributions differ in length: {len(p)} vs {len(q)}"
        )
    if any(x < 0 for x in p) or any(x < 0 for x in q):
        raise ParameterError("probabilities must be non-negative")
    if abs(math.fsum(p) - 1.0) > 1e-9 or abs(math.fsum(q) - 1.0) > 1e-9:
        raise ParameterError("each distribution must sum to 1 within 1e-9")
    total = 0.0
    for pi, qi in zip(p, q):
        if pi == 0.0:
            continue
        if qi == 0.0:
            raise ParameterError("q must be positive wherever p is positive")
        total += pi * math.log(pi / qi)
    return total


def _normalized(counts: Sequence[int]) -> tuple[float, ...]:
    total = sum(counts)
    return tuple(c / total for c in counts)


def kl_topk_trajectory(
    stream: TagStream, window: int, top_k: int = DEFAULT_TOP_K
) -> tuple[tuple[int, float], ...]:
    """KL divergence between top-ranked frequency vectors ``window`` apart.

    At each N in {window, 2*window, ...} with N + window inside the stream,
    the top K' = min(top_k, distinct tags at N, distinct tags at N + window)
    rank frequencies are normalized and compared positionally: P is the
    later vector, Q the earlier one, and the point emitted is
    (N, kl_divergence(P, Q)).
    """
    if window < 1:
        raise ParameterError(f"window must be >= 1, got {window}")
    if top_k < 1:
        raise ParameterError(f"top_k must be >= 1, got {top_k}")
    n = len(stream)
    if n < 2 * window:
        raise InsufficientDataError(
            f"stream of length {n} is shorter than two windows of {window}"
        )
    counts: Counter[str] = Counter()
    tops: dict[int, tuple[int, list[int]]] = {}
    for t, assignment in enumerate(stream.assignments, start=1):
        counts[assignment.tag] += 1
        if t % window == 0:
            ordered = sorted(counts.values(), reverse=True)
            tops[t] = (len(ordered), ordered[:top_k])
    points = []
    for pos in sorted(tops):
        later = pos + window
        if later not in tops:
            continue
        d_now, top_now = tops[pos]
        d_later, top_later = tops[later]
        k_prime = min(top_k, d_now, d_later)
        if k_prime == 0:
            raise InsufficientDataError("no ranked tags available to compare")
        p_vec = _normalized(top_later[:k_prime])
        q_vec = _normalized(top_now[:k_prime])
        points.append((pos, kl_divergence(p_vec, q_vec)))
    return tuple(points)


def kl_random_baseline(
    window: int,
    top_k: int,
    vocabulary_size: int,
    length: int,
    trials: int,
    seed: int = 0,
) -> tuple[tuple[int, float], ...]:
    """Mean KL trajectory of uniformly random streams.

    Averages ``kl_topk_trajectory`` over ``trials`` independent streams of
    ``length`` draws from a uniform vocabulary of ``vocabulary_size`` tags.
    Deterministic for a fixed seed.
    """
    from .generators import GeneratorConfig, generate_stream

    if trials < 1:
        raise ParameterError(f"trials must be >= 1, got {trials}")
    config = GeneratorConfig(
        model="random_uniform",
        length=length,
        n_streams=trials,
        seed=seed,
        vocabulary_size=vocabulary_size,
    )
    sums: dict[int, float] = {}
    for index in range(trials):
        stream = generate_stream(config, index)
        for pos, value in kl_topk_trajectory(stream, window, top_k):
            sums[pos] = sums.get(pos, 0.0) + value
    return tuple((pos, sums[pos] / trials) for pos in sorted(sums))
