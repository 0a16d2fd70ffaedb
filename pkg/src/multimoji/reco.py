"""Relevance ranking for the emoticon keyboard.

Given what the user has already selected, every element of a not-yet-selected
modality is scored and the modality's list is reordered (never shortened).
The score blends two signals:

* emotional similarity: inverse Euclidean distance between the selected
  element's valence/arousal point and the candidate's, and
* personal pairing habit: a TF-IDF weight over how often this user has sent
  the candidate together with the selected element, relative to how often the
  selected element is paired with anything in the candidate's modality.

With two elements selected the candidate's score is the arithmetic mean of
its score against each selection. Ties keep catalog order, so ranking is a
deterministic permutation of the modality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .catalog import Catalog, Element, Modality

# Distance floor: a candidate sitting exactly on the selection's emotion
# point gets similarity 1e6 instead of a division by zero.
EPSILON_DISTANCE = 1e-6

DEFAULT_ALPHA = 0.6
DEFAULT_BETA = 0.4

PairKey = tuple[str, str]


def pair_key(a: str, b: str) -> PairKey:
    """Canonical unordered key for a cross-modality element pair."""
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class Weights:
    """Blend weights for the similarity and TF-IDF terms."""

    alpha: float = DEFAULT_ALPHA
    beta: float = DEFAULT_BETA

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("weights must be non-negative")
        if self.alpha + self.beta <= 0:
            raise ValueError("at least one weight must be positive")
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise ValueError("weights must be finite")


@dataclass(frozen=True)
class RankingScore:
    """Score breakdown for one candidate against the current selection."""

    p: float
    tf_idf: float
    r: float


@dataclass(frozen=True)
class Selection:
    """One or two already-selected elements, all of distinct modalities."""

    elements: tuple[Element, ...]

    def __post_init__(self):
        if not 1 <= len(self.elements) <= 2:
            raise ValueError("selection must hold one or two elements")
        modalities = [e.modality for e in self.elements]
        if len(set(modalities)) != len(modalities):
            raise ValueError("selected elements must be of distinct modalities")

    @property
    def modalities(self) -> set[Modality]:
        return {e.modality for e in self.elements}


def emotional_similarity(selected: Element, candidate: Element) -> float:
    """Inverse distance in the valence/arousal plane, floored at 1e-6."""
    d = selected.emotion.distance(candidate.emotion)
    return 1.0 / max(d, EPSILON_DISTANCE)


def term_frequency(
    selected: Element,
    candidate: Element,
    catalog: Catalog,
    pair_counts: Mapping[PairKey, int],
) -> float:
    """Share of the selected element's pairings that went to this candidate.

    Zero when the user never paired the selected element with anything in the
    candidate's modality.
    """
    total = 0
    for other in catalog.elements[candidate.modality]:
        total += pair_counts.get(pair_key(selected.id, other.id), 0)
    if total == 0:
        return 0.0
    return pair_counts.get(pair_key(selected.id, candidate.id), 0) / total


def inverse_document_frequency(
    selected: Element,
    target: Modality,
    catalog: Catalog,
    pair_counts: Mapping[PairKey, int],
) -> float:
    """Rarity of the selected element's pairings across the target modality.

    ln(n / paired_count) + 1, where n is the modality size and paired_count
    is how many of its elements the user has ever paired with the selected
    element. Defaults to 1.0 when nothing was ever paired.
    """
    n = catalog.count(target)
    paired = 0
    for other in catalog.elements[target]:
        if pair_counts.get(pair_key(selected.id, other.id), 0) >= 1:
            paired += 1
    if paired == 0:
        return 1.0
    return math.log(n / paired) + 1.0


def ranking_score(
    selection: Selection,
    candidate: Element,
    catalog: Catalog,
    pair_counts: Mapping[PairKey, int],
    weights: Weights = Weights(),
) -> RankingScore:
    """Blend similarity and TF-IDF for one candidate; mean over selections."""
    if candidate.modality in selection.modalities:
        raise ValueError(
            "candidate modality %r is already selected" % candidate.modality.value
        )
    p_total = 0.0
    tfidf_total = 0.0
    r_total = 0.0
    for selected in selection.elements:
        p = emotional_similarity(selected, candidate)
        tf = term_frequency(selected, candidate, catalog, pair_counts)
        idf = inverse_document_frequency(
            selected, candidate.modality, catalog, pair_counts
        )
        p_total += p
        tfidf_total += tf * idf
        r_total += weights.alpha * p + weights.beta * tf * idf
    n = len(selection.elements)
    return RankingScore(p=p_total / n, tf_idf=tfidf_total / n, r=r_total / n)


def rank_modality(
    selection: Selection,
    target: Modality,
    catalog: Catalog,
    pair_counts: Mapping[PairKey, int],
    weights: Weights = Weights(),
) -> list[str]:
    """Reorder a modality by descending score; ties keep catalog order.

    The result is always a permutation of the full modality listing, so the
    keyboard reorders rather than hides.
    """
    if target in selection.modalities:
        raise ValueError("target modality %r is already selected" % target.value)
    candidates = catalog.elements[target]
    scored: list[tuple[float, int, str]] = []
    for i, candidate in enumerate(candidates):
        score = ranking_score(selection, candidate, catalog, pair_counts, weights)
        scored.append((-score.r, i, candidate.id))
    scored.sort()
    return [eid for _, _, eid in scored]


def selection_from_ids(
    catalog: Catalog, picks: Sequence[tuple[Modality, str]]
) -> Selection:
    """Resolve (modality, id) picks against a catalog."""
    return Selection(
        elements=tuple(catalog.require(modality, eid) for modality, eid in picks)
    )
