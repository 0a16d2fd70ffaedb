"""Element catalog: stickers, animations, and vibrotactile patterns.

Each element carries a perceived-emotion point (valence and arousal on the
1..7 scale) that the recommendation ranking measures distances in, plus a
renderable asset description. Catalogs load from a JSON document, are
validated exhaustively (every violation reported, each naming the offending
element), and are immutable afterwards so they can be shared across sessions.

This module also holds the dataset-preparation helpers: averaging raw Likert
ratings into emotion points, and the nearest-vibration marking filter used to
trim a vibration library down to the patterns emotionally close to at least
two stickers.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence, Union

from .codec import CodecError, validate_element_id

VALENCE_AROUSAL_MIN = 1.0
VALENCE_AROUSAL_MAX = 7.0
MAX_VIBRATION_EXTENT_MS = 10_000


class CatalogError(Exception):
    """Base class for catalog problems."""


class CatalogParseError(CatalogError):
    """The document is not parseable at all (bad JSON, unreadable)."""


class CatalogValidationError(CatalogError):
    """The document parsed but violates catalog invariants."""

    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class Modality(str, Enum):
    STICKER = "sticker"
    ANIMATION = "animation"
    VIBRATION = "vibration"

    @property
    def plural(self) -> str:
        return self.value + "s"


@dataclass(frozen=True)
class EmotionPoint:
    """Valence/arousal coordinates on the 7-point scale."""

    valence: float
    arousal: float

    def __post_init__(self):
        for name, v in (("valence", self.valence), ("arousal", self.arousal)):
            if not (VALENCE_AROUSAL_MIN <= v <= VALENCE_AROUSAL_MAX):
                raise ValueError(
                    "%s %r outside [%s, %s]"
                    % (name, v, VALENCE_AROUSAL_MIN, VALENCE_AROUSAL_MAX)
                )

    def distance(self, other: "EmotionPoint") -> float:
        return math.hypot(self.valence - other.valence, self.arousal - other.arousal)


@dataclass(frozen=True)
class StickerAsset:
    codepoints: tuple[int, ...]

    def text(self) -> str:
        return "".join(chr(cp) for cp in self.codepoints)


@dataclass(frozen=True)
class AnimationAsset:
    behavior: str
    period_ms: int
    amplitude: float


@dataclass(frozen=True)
class VibrationEvent:
    offset_ms: int
    duration_ms: int
    intensity: float
    sharpness: float


@dataclass(frozen=True)
class VibrationAsset:
    events: tuple[VibrationEvent, ...]

    def extent_ms(self) -> int:
        """Pattern length: the latest event end."""
        return max(ev.offset_ms + ev.duration_ms for ev in self.events)


AssetSpec = Union[StickerAsset, AnimationAsset, VibrationAsset]

_ASSET_TYPE = {
    Modality.STICKER: StickerAsset,
    Modality.ANIMATION: AnimationAsset,
    Modality.VIBRATION: VibrationAsset,
}


@dataclass(frozen=True)
class Element:
    id: str
    modality: Modality
    label: str
    emotion: EmotionPoint
    asset: AssetSpec


@dataclass(frozen=True)
class RatingRecord:
    """One respondent's Likert rating of one element."""

    element_id: str
    respondent_id: str
    valence: int
    arousal: int

    def __post_init__(self):
        for name, v in (("valence", self.valence), ("arousal", self.arousal)):
            if not isinstance(v, int) or isinstance(v, bool) or not (1 <= v <= 7):
                raise ValueError("%s must be an integer in 1..7, got %r" % (name, v))


@dataclass(frozen=True)
class Catalog:
    """Immutable element sets, one ordered list per modality.

    List order is the default display order and the tie-break order used
    everywhere a deterministic ordering is required.
    """

    behaviors: tuple[str, ...]
    elements: Mapping[Modality, tuple[Element, ...]]
    _by_id: Mapping[Modality, Mapping[str, Element]] = field(repr=False, default=None)
    _index: Mapping[Modality, Mapping[str, int]] = field(repr=False, default=None)

    def __post_init__(self):
        by_id = {}
        index = {}
        for modality, elems in self.elements.items():
            by_id[modality] = {e.id: e for e in elems}
            index[modality] = {e.id: i for i, e in enumerate(elems)}
        object.__setattr__(self, "_by_id", by_id)
        object.__setattr__(self, "_index", index)

    def count(self, modality: Modality) -> int:
        return len(self.elements[modality])

    def get(self, modality: Modality, element_id: str) -> Element | None:
        return self._by_id[modality].get(element_id)

    def require(self, modality: Modality, element_id: str) -> Element:
        elem = self.get(modality, element_id)
        if elem is None:
            raise KeyError("unknown %s id %r" % (modality.value, element_id))
        return elem

    def order(self, modality: Modality) -> list[str]:
        """Default display order for a modality."""
        return [e.id for e in self.elements[modality]]

    def position(self, modality: Modality, element_id: str) -> int:
        """Index of an element in its modality's default order."""
        return self._index[modality][element_id]

    def find(self, element_id: str) -> list[Element]:
        """All elements with this id, across modalities."""
        found = []
        for modality in Modality:
            elem = self.get(modality, element_id)
            if elem is not None:
                found.append(elem)
        return found


# --------------------------------------------------------------------------
# Document loading and validation


def _check_number(value, lo=None, hi=None, lo_open=False) -> bool:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        return False
    if not math.isfinite(value):
        return False
    if lo is not None and (value <= lo if lo_open else value < lo):
        return False
    if hi is not None and value > hi:
        return False
    return True


def _check_positive_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool) and value > 0


def _validate_asset(modality: Modality, asset, behaviors, where: str, out: list[str]):
    if not isinstance(asset, dict):
        out.append("%s: asset must be an object" % where)
        return
    if modality is Modality.STICKER:
        cps = asset.get("codepoints")
        if not isinstance(cps, list) or not cps:
            out.append("%s: sticker asset needs a non-empty codepoints list" % where)
            return
        for cp in cps:
            ok = (
                isinstance(cp, int)
                and not isinstance(cp, bool)
                and 0 < cp <= 0x10FFFF
                and not (0xD800 <= cp <= 0xDFFF)
            )
            if not ok:
                out.append("%s: %r is not a Unicode scalar value" % (where, cp))
    elif modality is Modality.ANIMATION:
        behavior = asset.get("behavior")
        if behavior not in behaviors:
            out.append("%s: behavior %r not in declared behaviors" % (where, behavior))
        if not _check_positive_int(asset.get("period_ms")):
            out.append("%s: period_ms must be a positive integer" % where)
        if not _check_number(asset.get("amplitude"), lo=0.0, hi=1.0, lo_open=True):
            out.append("%s: amplitude must be in (0, 1]" % where)
    else:
        events = asset.get("events")
        if not isinstance(events, list) or not events:
            out.append("%s: vibration asset needs a non-empty events list" % where)
            return
        prev_offset = -1
        worst_end = 0
        for i, ev in enumerate(events):
            if not isinstance(ev, dict):
                out.append("%s: event %d must be an object" % (where, i))
                return
            offset = ev.get("offset_ms")
            duration = ev.get("duration_ms")
            if not (isinstance(offset, int) and not isinstance(offset, bool) and offset >= 0):
                out.append("%s: event %d offset_ms must be a non-negative integer" % (where, i))
                continue
            if not _check_positive_int(duration):
                out.append("%s: event %d duration_ms must be a positive integer" % (where, i))
                continue
            if not _check_number(ev.get("intensity"), lo=0.0, hi=1.0):
                out.append("%s: event %d intensity must be in [0, 1]" % (where, i))
            if not _check_number(ev.get("sharpness"), lo=0.0, hi=1.0):
                out.append("%s: event %d sharpness must be in [0, 1]" % (where, i))
            if offset < prev_offset:
                out.append("%s: events not sorted by offset_ms" % where)
            prev_offset = offset
            worst_end = max(worst_end, offset + duration)
        if worst_end > MAX_VIBRATION_EXTENT_MS:
            out.append(
                "%s: pattern extent %d ms exceeds %d ms"
                % (where, worst_end, MAX_VIBRATION_EXTENT_MS)
            )


def validate_catalog_document(doc) -> list[str]:
    """Collect every invariant violation in a parsed catalog document."""
    out: list[str] = []
    if not isinstance(doc, dict):
        return ["document must be a top-level object"]
    if doc.get("version") != 1:
        out.append("version must be 1, got %r" % (doc.get("version"),))

    behaviors = doc.get("behaviors")
    if not isinstance(behaviors, list) or not all(
        isinstance(b, str) and b for b in behaviors
    ):
        out.append("behaviors must be a list of non-empty strings")
        behaviors = []
    elif len(set(behaviors)) != len(behaviors):
        out.append("behaviors contains duplicates")

    for modality in Modality:
        section = doc.get(modality.plural)
        if not isinstance(section, list) or not section:
            out.append("%s must be a non-empty list" % modality.plural)
            continue
        seen: set[str] = set()
        for i, item in enumerate(section):
            where = "%s[%d]" % (modality.plural, i)
            if not isinstance(item, dict):
                out.append("%s: element must be an object" % where)
                continue
            element_id = item.get("id")
            if isinstance(element_id, str) and element_id:
                where = "%s %r" % (modality.value, element_id)
                try:
                    validate_element_id(element_id)
                except CodecError as exc:
                    out.append("%s: %s" % (where, exc))
                if element_id in seen:
                    out.append("%s: duplicate id %r" % (where, element_id))
                seen.add(element_id)
            else:
                out.append("%s: id must be a non-empty string" % where)
            label = item.get("label")
            if not isinstance(label, str) or not label:
                out.append("%s: label must be a non-empty string" % where)
            for axis in ("valence", "arousal"):
                if not _check_number(
                    item.get(axis), lo=VALENCE_AROUSAL_MIN, hi=VALENCE_AROUSAL_MAX
                ):
                    out.append(
                        "%s: %s must be a number in [%s, %s]"
                        % (where, axis, VALENCE_AROUSAL_MIN, VALENCE_AROUSAL_MAX)
                    )
            _validate_asset(modality, item.get("asset"), behaviors, where, out)
    return out


def _build_asset(modality: Modality, asset: dict) -> AssetSpec:
    if modality is Modality.STICKER:
        return StickerAsset(codepoints=tuple(asset["codepoints"]))
    if modality is Modality.ANIMATION:
        return AnimationAsset(
            behavior=asset["behavior"],
            period_ms=asset["period_ms"],
            amplitude=float(asset["amplitude"]),
        )
    return VibrationAsset(
        events=tuple(
            VibrationEvent(
                offset_ms=ev["offset_ms"],
                duration_ms=ev["duration_ms"],
                intensity=float(ev["intensity"]),
                sharpness=float(ev["sharpness"]),
            )
            for ev in asset["events"]
        )
    )


def catalog_from_document(doc) -> Catalog:
    """Build a Catalog from a parsed document, or raise with all violations."""
    violations = validate_catalog_document(doc)
    if violations:
        raise CatalogValidationError(violations)
    elements = {}
    for modality in Modality:
        elems = []
        for item in doc[modality.plural]:
            elems.append(
                Element(
                    id=item["id"],
                    modality=modality,
                    label=item["label"],
                    emotion=EmotionPoint(float(item["valence"]), float(item["arousal"])),
                    asset=_build_asset(modality, item["asset"]),
                )
            )
        elements[modality] = tuple(elems)
    return Catalog(behaviors=tuple(doc["behaviors"]), elements=elements)


def load_catalog(path) -> Catalog:
    """Load and validate a catalog document from a file."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CatalogParseError("not valid JSON: %s" % exc) from exc
    return catalog_from_document(doc)


def _asset_to_dict(asset: AssetSpec) -> dict:
    if isinstance(asset, StickerAsset):
        return {"codepoints": list(asset.codepoints)}
    if isinstance(asset, AnimationAsset):
        return {
            "behavior": asset.behavior,
            "period_ms": asset.period_ms,
            "amplitude": asset.amplitude,
        }
    return {
        "events": [
            {
                "offset_ms": ev.offset_ms,
                "duration_ms": ev.duration_ms,
                "intensity": ev.intensity,
                "sharpness": ev.sharpness,
            }
            for ev in asset.events
        ]
    }


def catalog_to_document(catalog: Catalog) -> dict:
    doc = {"version": 1, "behaviors": list(catalog.behaviors)}
    for modality in Modality:
        doc[modality.plural] = [
            {
                "id": e.id,
                "label": e.label,
                "valence": e.emotion.valence,
                "arousal": e.emotion.arousal,
                "asset": _asset_to_dict(e.asset),
            }
            for e in catalog.elements[modality]
        ]
    return doc


def save_catalog(catalog: Catalog, path) -> None:
    Path(path).write_text(
        json.dumps(catalog_to_document(catalog), indent=2) + "\n", encoding="utf-8"
    )


def bundled_catalog_path() -> Path:
    """Path of the sample catalog shipped with the package."""
    return Path(__file__).parent / "data" / "sample_catalog.json"


# --------------------------------------------------------------------------
# Dataset preparation


def aggregate_ratings(
    records: Iterable[RatingRecord],
    element_ids: Iterable[str] | None = None,
) -> dict[str, EmotionPoint]:
    """Average raw Likert ratings into one emotion point per element.

    Integer sums keep the result exactly permutation-invariant. When
    element_ids is given, every listed element must have at least one record.
    """
    sums: dict[str, list[int]] = {}
    for rec in records:
        acc = sums.setdefault(rec.element_id, [0, 0, 0])
        acc[0] += rec.valence
        acc[1] += rec.arousal
        acc[2] += 1
    if element_ids is not None:
        missing = [eid for eid in element_ids if eid not in sums]
        if missing:
            raise ValueError("no ratings for element(s): %s" % ", ".join(missing))
    return {
        eid: EmotionPoint(v_sum / n, a_sum / n)
        for eid, (v_sum, a_sum, n) in sums.items()
    }


def load_ratings(path) -> list[RatingRecord]:
    """Read a ratings file: one tab-separated record per line."""
    records = []
    for lineno, line in enumerate(
        Path(path).read_text(encoding="utf-8").splitlines(), start=1
    ):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 4:
            raise ValueError("line %d: expected 4 tab-separated fields" % lineno)
        element_id, respondent_id, valence, arousal = parts
        try:
            records.append(
                RatingRecord(element_id, respondent_id, int(valence), int(arousal))
            )
        except ValueError as exc:
            raise ValueError("line %d: %s" % (lineno, exc)) from exc
    return records


def nearest_vibrations(
    sticker: Element, vibrations: Sequence[Element], k: int
) -> list[str]:
    """Ids of the k vibrations closest to a sticker in the emotion plane.

    Ascending by Euclidean distance; ties broken by position in the input
    list (catalog order).
    """
    if sticker.modality is not Modality.STICKER:
        raise ValueError("expected a sticker, got %s %r" % (sticker.modality.value, sticker.id))
    for v in vibrations:
        if v.modality is not Modality.VIBRATION:
            raise ValueError("candidate %r is not a vibration" % v.id)
    if not 1 <= k <= len(vibrations):
        raise ValueError("k=%d out of range for %d candidates" % (k, len(vibrations)))
    ranked = sorted(
        range(len(vibrations)),
        key=lambda i: (sticker.emotion.distance(vibrations[i].emotion), i),
    )
    return [vibrations[i].id for i in ranked[:k]]


def mark_frequency_filter(
    stickers: Sequence[Element], vibrations: Sequence[Element], k: int = 5
) -> list[str]:
    """Keep the vibrations marked as a k-nearest neighbour of more than one sticker.

    Every sticker marks its k nearest vibrations; vibrations accumulating at
    least two marks survive, in catalog order.
    """
    if not stickers or not vibrations:
        raise ValueError("need at least one sticker and one vibration")
    marks: Counter[str] = Counter()
    for sticker in stickers:
        marks.update(nearest_vibrations(sticker, vibrations, k))
    return [v.id for v in vibrations if marks[v.id] >= 2]
