"""Synthetic tagging streams: uniform draws, urn imitation, background
knowledge, and the imitation/background mixture.

Every stream is reproducible: stream i of a corpus is generated from an RNG
seeded with (seed, i), so corpora are identical across runs and independent
of generation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import IngestionError, ParameterError
from .streams import TagStream

MODELS = ("random_uniform", "imitation", "background", "mixture")

DEFAULT_VOCABULARY_SIZE = 100_000
DEFAULT_ZIPF_EXPONENT = 1.0


@dataclass(frozen=True)
class BackgroundDistribution:
    """A fixed token distribution modelling shared vocabulary knowledge."""

    support: tuple[str, ...]
    probabilities: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.support:
            raise ParameterError("background support must be non-empty")
        if len(self.support) != len(self.probabilities):
            raise ParameterError(
                "support and probabilities must have equal length"
            )
        if any(p < 0 or not math.isfinite(p) for p in self.probabilities):
            raise ParameterError("probabilities must be finite and non-negative")
        if abs(math.fsum(self.probabilities) - 1.0) > 1e-9:
            raise ParameterError("probabilities must sum to 1 within 1e-9")

    def __len__(self) -> int:
        return len(self.support)


def _vocabulary(size: int) -> tuple[str, ...]:
    return tuple(f"t{i}" for i in range(1, size + 1))


def zipf_background(vocabulary_size: int, exponent: float = 1.0) -> BackgroundDistribution:
    """Zipfian background: token of rank r has probability r^-s / sum_j j^-s."""
    if vocabulary_size < 1:
        raise ParameterError(f"vocabulary size must be >= 1, got {vocabulary_size}")
    if exponent <= 0:
        raise ParameterError(f"zipf exponent must be > 0, got {exponent}")
    ranks = np.arange(1, vocabulary_size + 1, dtype=float)
    weights = ranks**-exponent
    probabilities = weights / weights.sum()
    return BackgroundDistribution(
        _vocabulary(vocabulary_size), tuple(probabilities.tolist())
    )


def load_background(rows: Iterable[tuple[str, float]]) -> BackgroundDistribution:
    """Background distribution from (token, count) rows.

    Tokens are normalized (stripped, lowercased) and repeated tokens have
    their counts merged; probabilities are counts divided by the total.
    """
    totals: dict[str, float] = {}
    for row_number, (token, count) in enumerate(rows, start=1):
        token = token.strip().lower()
        if not token:
            raise IngestionError(f"row {row_number}: empty token")
        if not math.isfinite(count) or count < 0:
            raise IngestionError(
                f"row {row_number}: count must be a non-negative number, got {count}"
            )
        totals[token] = totals.get(token, 0.0) + float(count)
    if not totals:
        raise IngestionError("background table has no rows")
    total = math.fsum(totals.values())
    if total <= 0:
        raise IngestionError("background table counts are all zero")
    return BackgroundDistribution(
        tuple(totals), tuple(c / total for c in totals.values())
    )


@dataclass(frozen=True)
class GeneratorConfig:
    """Configuration for one synthetic corpus.

    ``imitation_rate`` only matters for the mixture model; ``vocabulary_size``
    sizes the uniform vocabulary (and, with ``zipf_exponent``, a synthetic
    Zipf background when no explicit ``background`` is supplied).
    """

    model: str
    length: int
    n_streams: int = 1
    seed: int = 0
    imitation_rate: float = 0.0
    vocabulary_size: int | None = None
    zipf_exponent: float | None = None
    background: BackgroundDistribution | None = None

    def __post_init__(self) -> None:
        if self.model not in MODELS:
            raise ParameterError(f"model must be one of {MODELS}, got {self.model!r}")
        if self.length < 1:
            raise ParameterError(f"length must be >= 1, got {self.length}")
        if self.n_streams < 1:
            raise ParameterError(f"n_streams must be >= 1, got {self.n_streams}")
        if not 0.0 <= self.imitation_rate <= 1.0:
            raise ParameterError(
                f"imitation rate must lie in [0, 1], got {self.imitation_rate}"
            )
        if self.seed < 0:
            raise ParameterError(f"seed must be >= 0, got {self.seed}")
        if self.vocabulary_size is not None and self.vocabulary_size < 1:
            raise ParameterError(
                f"vocabulary size must be >= 1, got {self.vocabulary_size}"
            )
        if self.zipf_exponent is not None and self.zipf_exponent <= 0:
            raise ParameterError(
                f"zipf exponent must be > 0, got {self.zipf_exponent}"
            )
        if self.model in ("random_uniform", "imitation") and self.vocabulary_size is None:
            raise ParameterError(f"{self.model} requires a vocabulary size")

    def resolved_background(self) -> BackgroundDistribution:
        """The explicit background, or a synthetic Zipf one built from the
        configured (or default) vocabulary size and exponent."""
        if self.background is not None:
            return self.background
        size = self.vocabulary_size or DEFAULT_VOCABULARY_SIZE
        exponent = (
            self.zipf_exponent if self.zipf_exponent is not None else DEFAULT_ZIPF_EXPONENT
        )
        return zipf_background(size, exponent)


def _stream_rng(seed: int, stream_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence((seed, stream_index)))


def _background_tables(
    background: BackgroundDistribution,
) -> tuple[tuple[str, ...], np.ndarray]:
    return background.support, np.cumsum(np.asarray(background.probabilities))


def _draw_background(
    rng: np.random.Generator, support: Sequence[str], cumulative: np.ndarray
) -> str:
    index = int(np.searchsorted(cumulative, rng.random(), side="right"))
    return support[min(index, len(support) - 1)]


def _mixture_tags(
    rng: np.random.Generator,
    length: int,
    imitation_rate: float,
    support: Sequence[str],
    cumulative: np.ndarray,
) -> list[str]:
    """One stream of mixture draws.

    Each step imitates (a uniform pick over past assignments, i.e. an urn
    draw proportional to current counts) with probability ``imitation_rate``
    and otherwise samples the background.  On the first step the urn is
    empty and the draw falls back to the background.  The imitation check
    short-circuits when the rate is 0, so a pure-background configuration
    consumes the identical random sequence.
    """
    tags: list[str] = []
    for t in range(length):
        if t > 0 and imitation_rate > 0.0 and rng.random() < imitation_rate:
            tags.append(tags[int(rng.integers(0, t))])
        else:
            tags.append(_draw_background(rng, support, cumulative))
    return tags


def _prepare(config: GeneratorConfig):
    if config.model == "random_uniform" or config.model == "imitation":
        return _vocabulary(config.vocabulary_size)
    return _background_tables(config.resolved_background())


def _generate_with(config: GeneratorConfig, stream_index: int, prepared) -> TagStream:
    rng = _stream_rng(config.seed, stream_index)
    resource_id = f"stream-{stream_index:05d}"
    if config.model == "random_uniform":
        vocabulary = prepared
        draws = rng.integers(0, len(vocabulary), size=config.length)
        tags = [vocabulary[i] for i in draws]
    elif config.model == "imitation":
        vocabulary = prepared
        # Pure urn dynamics never introduce a token beyond the bootstrap
        # draw, so the stream repeats its first token.
        tags = [vocabulary[int(rng.integers(0, len(vocabulary)))]]
        for t in range(1, config.length):
            tags.append(tags[int(rng.integers(0, t))])
    else:
        support, cumulative = prepared
        rate = config.imitation_rate if config.model == "mixture" else 0.0
        tags = _mixture_tags(rng, config.length, rate, support, cumulative)
    return TagStream.from_tags(resource_id, tags)


def generate_stream(config: GeneratorConfig, stream_index: int = 0) -> TagStream:
    """Generate stream ``stream_index`` of the configured corpus."""
    if stream_index < 0:
        raise ParameterError(f"stream index must be >= 0, got {stream_index}")
    return _generate_with(config, stream_index, _prepare(config))


def generate_corpus(config: GeneratorConfig) -> tuple[TagStream, ...]:
    """All ``n_streams`` streams of the corpus, in index order."""
    prepared = _prepare(config)
    return tuple(
        _generate_with(config, index, prepared) for index in range(config.n_streams)
    )
