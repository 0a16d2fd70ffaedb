"""Builders shared across test modules: compact catalog documents, random
instances for oracle comparisons, and adapters that turn package objects
into the plain structures the oracles consume."""

from __future__ import annotations

import random

from multimoji.catalog import Catalog, Modality, catalog_from_document
from multimoji.codec import MultimodalEmoticon


def sticker(eid, valence, arousal, label=None, codepoints=(0x1F600,)):
    return {
        "id": eid,
        "label": label or eid,
        "valence": valence,
        "arousal": arousal,
        "asset": {"codepoints": list(codepoints)},
    }


def animation(eid, valence, arousal, behavior="bounce", period_ms=700, amplitude=0.5):
    return {
        "id": eid,
        "label": eid,
        "valence": valence,
        "arousal": arousal,
        "asset": {"behavior": behavior, "period_ms": period_ms, "amplitude": amplitude},
    }


def vibration(eid, valence, arousal, events=None):
    return {
        "id": eid,
        "label": eid,
        "valence": valence,
        "arousal": arousal,
        "asset": {
            "events": events
            or [{"offset_ms": 0, "duration_ms": 200, "intensity": 0.5, "sharpness": 0.5}]
        },
    }


def make_doc(stickers, animations, vibrations, behaviors=("bounce", "spin", "shake")):
    return {
        "version": 1,
        "behaviors": list(behaviors),
        "stickers": stickers,
        "animations": animations,
        "vibrations": vibrations,
    }


def make_catalog(stickers, animations, vibrations, behaviors=("bounce", "spin", "shake")):
    return catalog_from_document(make_doc(stickers, animations, vibrations, behaviors))


def random_catalog(rng: random.Random, n_stickers=10, n_vibrations=6, n_animations=5) -> Catalog:
    def point():
        return round(rng.uniform(1.0, 7.0), 4)

    return make_catalog(
        [sticker("s%d" % i, point(), point()) for i in range(n_stickers)],
        [animation("a%d" % i, point(), point()) for i in range(n_animations)],
        [vibration("v%d" % i, point(), point()) for i in range(n_vibrations)],
    )


def random_emoticon(rng: random.Random, catalog: Catalog) -> MultimodalEmoticon:
    """A random send: sticker always present, each extra modality optional,
    but at least one extra half the time so pairs actually accrue."""
    s = rng.choice(catalog.order(Modality.STICKER))
    v = rng.choice(catalog.order(Modality.VIBRATION)) if rng.random() < 0.6 else None
    a = rng.choice(catalog.order(Modality.ANIMATION)) if rng.random() < 0.6 else None
    return MultimodalEmoticon(sticker_id=s, vibration_id=v, animation_id=a)


def points_of(catalog: Catalog, modality: Modality):
    """[(id, (valence, arousal))] in catalog order, for the oracles."""
    return [
        (e.id, (e.emotion.valence, e.emotion.arousal))
        for e in catalog.elements[modality]
    ]


def counts_to_frozensets(pair_counts):
    """Package pair-count snapshot -> oracle keying."""
    return {frozenset(key): count for key, count in pair_counts.items()}
