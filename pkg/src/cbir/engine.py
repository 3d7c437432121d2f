"""Query pipeline: pick the search scope (auto-classified category, a fixed
category, or everything), extract the one signature the chosen technique
needs, rank that scope's records, and report the timed result."""

from __future__ import annotations

import time
from dataclasses import dataclass
from enum import Enum
from typing import Callable

from .edges import classify
from .eigen import eigen_distance
from .errors import EmptyScopeError, UnknownCategoryError
from .histogram import hist_distance
from .imaging import RasterImage
from .matchpoint import match_score
from .store import (
    IndexConfig,
    IndexFile,
    IndexRecord,
    extract_edge_signature,
    extract_features,
    extract_histogram,
    extract_spectral,
)

SCOPE_AUTO = "auto"
SCOPE_ALL = "all"


class Technique(Enum):
    HISTOGRAM = "histogram"
    EIGEN = "eigen"
    MATCHPOINT = "matchpoint"


@dataclass(frozen=True)
class QueryResult:
    """Ranked (image_id, distance) pairs, ascending distance with ties broken
    by ascending id, plus where and how long the search ran."""

    ranked: tuple[tuple[int, float], ...]
    technique: Technique
    category_used: str
    elapsed: float
    candidates_searched: int


def _extract_query_signature(img: RasterImage, technique: Technique, config: IndexConfig):
    if technique is Technique.HISTOGRAM:
        return extract_histogram(img, config)
    if technique is Technique.EIGEN:
        return extract_spectral(img, config)
    return extract_features(img, config)


def _record_distance(signature, record: IndexRecord, technique: Technique, config: IndexConfig) -> float:
    if technique is Technique.HISTOGRAM:
        return hist_distance(signature, record.histogram, config.metric)
    if technique is Technique.EIGEN:
        return eigen_distance(signature, record.spectral)
    return match_score(signature, record.features, config.ratio)[1]


def rank(
    records: list[IndexRecord],
    signature,
    technique: Technique,
    config: IndexConfig,
) -> list[tuple[int, float]]:
    """Total ordering of ``records`` by distance to the query signature.

    The signature must have been extracted under the same config as the
    records. Ascending distance; ties resolved by ascending image id.
    """
    scored = [
        (r.image_id, _record_distance(signature, r, technique, config)) for r in records
    ]
    scored.sort(key=lambda pair: (pair[1], pair[0]))
    return scored


def query(
    idx: IndexFile,
    img: RasterImage,
    technique: Technique,
    top_k: int = 10,
    scope: str = SCOPE_AUTO,
    clock: Callable[[], float] = time.perf_counter,
) -> QueryResult:
    """Search the index for the images most similar to ``img``.

    ``scope`` is "auto" (classify the query's category first and search only
    it), "all" (search every record), or a category label. The reported
    elapsed time covers query feature extraction (including auto
    classification) and ranking, on a monotonic clock; decoding and index
    loading happen before the clock starts.
    """
    if not idx.records:
        raise EmptyScopeError("index has no records")
    if top_k < 1:
        raise ValueError(f"top_k must be >= 1, got {top_k}")
    if scope not in (SCOPE_AUTO, SCOPE_ALL) and scope not in idx.categories:
        raise UnknownCategoryError(
            f"category '{scope}' not in index (has: {', '.join(idx.categories)})"
        )

    start = clock()
    if scope == SCOPE_AUTO:
        sig = extract_edge_signature(img, idx.config)
        category_used, _margin = classify(sig, idx.category_models)
        records = idx.records_for(category_used)
    elif scope == SCOPE_ALL:
        category_used = SCOPE_ALL
        records = idx.records
    else:
        category_used = scope
        records = idx.records_for(scope)
    if not records:
        raise EmptyScopeError(f"category '{category_used}' has no records")

    signature = _extract_query_signature(img, technique, idx.config)
    ranked = rank(records, signature, technique, idx.config)
    elapsed = clock() - start
    return QueryResult(
        ranked=tuple(ranked[:top_k]),
        technique=technique,
        category_used=category_used,
        elapsed=elapsed,
        candidates_searched=len(records),
    )
