"""File ingestion and serialization: tag logs, raw-text corpora, and
background frequency tables.

Tag logs are delimited UTF-8 text (tab by default) with a header naming the
columns ``resource_id``, ``tag``, ``seq`` and optionally ``user_id``.  Rows
are grouped per resource, ordered by their seq values, and re-indexed
contiguously from 1; malformed rows are skipped and counted rather than
aborting the load.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from statistics import mean, median
from typing import Iterable

from .errors import IngestionError
from .generators import BackgroundDistribution, load_background
from .streams import TagAssignment, TagStream, normalize_tag

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


@dataclass(frozen=True)
class IngestionReport:
    """What a load accepted and what it threw away."""

    streams_loaded: int
    assignments_loaded: int
    rows_rejected: int
    reject_reasons: dict[str, int] = field(default_factory=dict)
    length_min: int = 0
    length_max: int = 0
    length_mean: float = 0.0
    length_median: float = 0.0

    def to_dict(self) -> dict:
        return {
            "streams_loaded": self.streams_loaded,
            "assignments_loaded": self.assignments_loaded,
            "rows_rejected": self.rows_rejected,
            "reject_reasons": dict(self.reject_reasons),
            "stream_lengths": {
                "min": self.length_min,
                "max": self.length_max,
                "mean": self.length_mean,
                "median": self.length_median,
            },
        }


def _report(streams: tuple[TagStream, ...], rejected: Counter[str]) -> IngestionReport:
    lengths = [len(s) for s in streams]
    return IngestionReport(
        streams_loaded=len(streams),
        assignments_loaded=sum(lengths),
        rows_rejected=sum(rejected.values()),
        reject_reasons=dict(sorted(rejected.items())),
        length_min=min(lengths) if lengths else 0,
        length_max=max(lengths) if lengths else 0,
        length_mean=float(mean(lengths)) if lengths else 0.0,
        length_median=float(median(lengths)) if lengths else 0.0,
    )


def _header_columns(line: str, delimiter: str, required: tuple[str, ...]) -> dict[str, int]:
    columns = {name: i for i, name in enumerate(line.rstrip("\r\n").split(delimiter))}
    missing = [name for name in required if name not in columns]
    if missing:
        raise IngestionError(f"header is missing columns: {', '.join(missing)}")
    return columns


def ingest_tag_log(
    path: str | Path, delimiter: str = "\t"
) -> tuple[tuple[TagStream, ...], IngestionReport]:
    """Load a tag log into per-resource streams plus a load report.

    The first matching row wins on duplicate (resource, seq) pairs; rows
    with an empty tag after normalization, a non-integer seq, or the wrong
    field count are rejected and counted.  A file yielding zero accepted
    rows is an error.
    """
    rows: dict[str, list[tuple[int, str, str | None]]] = {}
    seen: set[tuple[str, int]] = set()
    rejected: Counter[str] = Counter()
    with open(path, encoding="utf-8") as handle:
        header = handle.readline()
        if not header:
            raise IngestionError("file is empty")
        columns = _header_columns(header, delimiter, ("resource_id", "tag", "seq"))
        user_column = columns.get("user_id")
        for line in handle:
            line = line.rstrip("\r\n")
            if not line:
                rejected["blank line"] += 1
                continue
            parts = line.split(delimiter)
            if len(parts) != len(columns):
                rejected["field count mismatch"] += 1
                continue
            resource_id = parts[columns["resource_id"]].strip()
            if not resource_id:
                rejected["empty resource_id"] += 1
                continue
            tag = normalize_tag(parts[columns["tag"]])
            if not tag:
                rejected["empty tag"] += 1
                continue
            try:
                seq = int(parts[columns["seq"]])
            except ValueError:
                rejected["invalid seq"] += 1
                continue
            if (resource_id, seq) in seen:
                rejected["duplicate seq"] += 1
                continue
            seen.add((resource_id, seq))
            user = parts[user_column].strip() or None if user_column is not None else None
            rows.setdefault(resource_id, []).append((seq, tag, user))
    if not rows:
        raise IngestionError(f"no rows accepted from {path}")
    streams = []
    for resource_id in sorted(rows):
        ordered = sorted(rows[resource_id])
        streams.append(
            TagStream(
                resource_id,
                tuple(
                    TagAssignment(resource_id, tag, position, user)
                    for position, (_, tag, user) in enumerate(ordered, start=1)
                ),
            )
        )
    streams = tuple(streams)
    return streams, _report(streams, rejected)


def tokenize(text: str, stopwords: Iterable[str] | None = None) -> list[str]:
    """Lowercase and split on runs of non-letter/non-digit characters."""
    tokens = _TOKEN_RE.findall(text.lower())
    if stopwords is None:
        return tokens
    drop = {normalize_tag(w) for w in stopwords}
    return [t for t in tokens if t not in drop]


def ingest_text_corpus(
    path: str | Path,
    stopwords: Iterable[str] | None = None,
    delimiter: str = "\t",
) -> tuple[TagStream, ...]:
    """Interpret the words of per-resource texts as annotation streams.

    Expects columns resource_id, seq, text; each text is tokenized and the
    tokens are appended to the resource's stream in (seq, position-in-text)
    order.  Rows whose text yields no tokens are accepted with no effect;
    resources left without tokens produce no stream.
    """
    drop = {normalize_tag(w) for w in stopwords} if stopwords is not None else None
    rows: dict[str, list[tuple[int, list[str]]]] = {}
    seen: set[tuple[str, int]] = set()
    accepted = 0
    with open(path, encoding="utf-8") as handle:
        header = handle.readline()
        if not header:
            raise IngestionError("file is empty")
        columns = _header_columns(header, delimiter, ("resource_id", "seq", "text"))
        for line in handle:
            line = line.rstrip("\r\n")
            if not line:
                continue
            parts = line.split(delimiter)
            if len(parts) != len(columns):
                continue
            resource_id = parts[columns["resource_id"]].strip()
            if not resource_id:
                continue
            try:
                seq = int(parts[columns["seq"]])
            except ValueError:
                continue
            if (resource_id, seq) in seen:
                continue
            seen.add((resource_id, seq))
            accepted += 1
            tokens = _TOKEN_RE.findall(parts[columns["text"]].lower())
            if drop is not None:
                tokens = [t for t in tokens if t not in drop]
            rows.setdefault(resource_id, []).append((seq, tokens))
    if accepted == 0:
        raise IngestionError(f"no rows accepted from {path}")
    streams = []
    for resource_id in sorted(rows):
        tags = [token for _, tokens in sorted(rows[resource_id]) for token in tokens]
        if tags:
            streams.append(TagStream.from_tags(resource_id, tags))
    return tuple(streams)


def read_background_file(path: str | Path) -> BackgroundDistribution:
    """Parse a headerless ``token<TAB>count`` table into a background
    distribution; empty lines are ignored."""
    pairs: list[tuple[str, float]] = []
    with open(path, encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            line = line.rstrip("\r\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise IngestionError(
                    f"row {line_number}: expected 2 tab-separated fields"
                )
            try:
                count = float(parts[1])
            except ValueError:
                raise IngestionError(
                    f"row {line_number}: count {parts[1]!r} is not a number"
                ) from None
            pairs.append((parts[0], count))
    return load_background(pairs)


def write_tag_log(
    streams: Iterable[TagStream], path: str | Path, delimiter: str = "\t"
) -> None:
    """Serialize streams in the ingestion format with canonical row order
    (resource_id, then seq); the user_id column appears only if used."""
    streams = sorted(streams, key=lambda s: s.resource_id)
    with_users = any(a.user_id for s in streams for a in s.assignments)
    columns = ["resource_id", "tag", "seq"] + (["user_id"] if with_users else [])
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(delimiter.join(columns) + "\n")
        for stream in streams:
            for a in stream.assignments:
                row = [a.resource_id, a.tag, str(a.seq)]
                if with_users:
                    row.append(a.user_id or "")
                handle.write(delimiter.join(row) + "\n")
