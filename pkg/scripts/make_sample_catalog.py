"""Regenerate the bundled sample catalog.

Builds 50 face stickers with hand-assigned valence/arousal, 15 looping
animations (one per behavior), and a pool of 96 candidate vibration patterns
laid out over the emotion plane. Candidates marked as a 5-nearest neighbour
of at least two stickers survive the filter; the 60 most-marked survivors
(earliest first on ties) become the bundled set. Deterministic: a fixed RNG
seed shapes the vibration patterns.

Run from the repository root:

    python3 scripts/make_sample_catalog.py
"""

from __future__ import annotations

import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from multimoji.catalog import (
    Modality,
    catalog_from_document,
    mark_frequency_filter,
    nearest_vibrations,
    save_catalog,
)

OUT = Path(__file__).resolve().parents[1] / "src" / "multimoji" / "data" / "sample_catalog.json"

# (slug, codepoint, label, valence, arousal)
STICKERS = [
    ("grin", 0x1F600, "grinning face", 6.2, 5.0),
    ("beam", 0x1F601, "beaming face", 6.3, 5.2),
    ("joy_tears", 0x1F602, "tears of joy", 6.0, 5.8),
    ("rofl", 0x1F923, "rolling on the floor", 6.1, 6.2),
    ("blush", 0x1F60A, "smiling with blush", 6.0, 4.2),
    ("halo", 0x1F607, "smiling with halo", 5.8, 3.6),
    ("wink", 0x1F609, "winking face", 5.6, 4.4),
    ("relieved", 0x1F60C, "relieved face", 5.4, 2.6),
    ("heart_eyes", 0x1F60D, "heart eyes", 6.6, 5.6),
    ("kiss", 0x1F618, "blowing a kiss", 6.2, 4.6),
    ("savoring", 0x1F60B, "savoring food", 5.9, 4.3),
    ("tongue", 0x1F61B, "tongue out", 5.5, 4.8),
    ("wink_tongue", 0x1F61C, "winking tongue out", 5.6, 5.1),
    ("zany", 0x1F92A, "zany face", 5.7, 6.0),
    ("hug", 0x1F917, "hugging face", 6.0, 3.9),
    ("thinking", 0x1F914, "thinking face", 4.0, 3.4),
    ("zipper", 0x1F910, "zipper mouth", 3.8, 3.2),
    ("neutral", 0x1F610, "neutral face", 4.0, 2.4),
    ("blank", 0x1F611, "expressionless face", 3.6, 2.2),
    ("smirk", 0x1F60F, "smirking face", 4.8, 3.8),
    ("unamused", 0x1F612, "unamused face", 2.8, 3.0),
    ("eye_roll", 0x1F644, "rolling eyes", 3.0, 3.4),
    ("grimace", 0x1F62C, "grimacing face", 3.2, 4.4),
    ("lying", 0x1F925, "lying face", 3.1, 3.8),
    ("pensive", 0x1F614, "pensive face", 2.8, 2.2),
    ("sleepy", 0x1F62A, "sleepy face", 3.4, 1.8),
    ("sleeping", 0x1F634, "sleeping face", 4.2, 1.2),
    ("drool", 0x1F924, "drooling face", 5.2, 3.5),
    ("mask", 0x1F637, "medical mask", 3.5, 2.8),
    ("thermometer", 0x1F912, "face with thermometer", 2.4, 2.6),
    ("dizzy", 0x1F635, "knocked-out face", 2.2, 5.0),
    ("cowboy", 0x1F920, "cowboy hat face", 5.8, 5.4),
    ("cool", 0x1F60E, "smiling with sunglasses", 5.9, 4.0),
    ("nerd", 0x1F913, "nerd face", 5.0, 3.6),
    ("confused", 0x1F615, "confused face", 3.0, 3.1),
    ("worried", 0x1F61F, "worried face", 2.6, 3.6),
    ("frown", 0x1F641, "slightly frowning", 2.5, 2.8),
    ("open_mouth", 0x1F62E, "open mouth", 4.3, 4.9),
    ("astonished", 0x1F632, "astonished face", 4.4, 5.7),
    ("flushed", 0x1F633, "flushed face", 3.7, 5.2),
    ("pleading", 0x1F97A, "pleading face", 3.3, 4.0),
    ("frown_open", 0x1F626, "frowning open mouth", 2.6, 4.2),
    ("anguished", 0x1F627, "anguished face", 2.3, 4.6),
    ("fearful", 0x1F628, "fearful face", 2.0, 5.4),
    ("anxious", 0x1F630, "anxious with sweat", 2.2, 5.2),
    ("crying", 0x1F622, "crying face", 1.8, 3.8),
    ("sobbing", 0x1F62D, "loudly crying", 1.6, 5.6),
    ("scream", 0x1F631, "screaming in fear", 1.9, 6.4),
    ("angry", 0x1F620, "angry face", 1.8, 5.5),
    ("pouting", 0x1F621, "pouting face", 1.5, 6.0),
]

# (behavior, label, valence, arousal, period_ms, amplitude)
ANIMATIONS = [
    ("bounce", "bouncing", 5.8, 5.6, 700, 0.6),
    ("spin", "spinning", 5.2, 5.9, 900, 1.0),
    ("shake", "shaking", 2.6, 6.0, 300, 0.5),
    ("pulse", "pulsing", 4.9, 4.4, 800, 0.35),
    ("wobble", "wobbling", 4.6, 4.8, 650, 0.45),
    ("jump", "jumping", 6.0, 6.1, 1000, 0.8),
    ("swing", "swinging", 5.1, 3.9, 1200, 0.5),
    ("tilt", "tilting", 4.4, 3.2, 1100, 0.3),
    ("zoom", "zooming", 5.4, 5.3, 600, 0.7),
    ("slide", "sliding", 4.7, 3.5, 1000, 0.4),
    ("drift", "drifting", 4.9, 2.2, 2000, 0.3),
    ("flip", "flipping", 5.3, 5.1, 900, 1.0),
    ("quiver", "quivering", 2.4, 5.2, 250, 0.2),
    ("breathe", "breathing", 5.0, 1.9, 2400, 0.25),
    ("ripple", "rippling", 5.2, 2.9, 1500, 0.4),
]


def vibration_events(rng: random.Random, valence: float, arousal: float) -> list[dict]:
    """Shape a pattern from its emotion point: calm means few long soft
    events, intense means many short sharp ones."""
    intensity = 0.25 + 0.65 * (arousal - 1) / 6
    sharpness = 0.15 + 0.7 * (arousal - 1) / 6
    if valence < 3.5:
        sharpness = min(1.0, sharpness + 0.15)
    if arousal < 3.0:
        count = rng.randint(1, 2)
        duration = rng.randint(350, 700)
        gap = rng.randint(200, 400)
    elif arousal < 5.0:
        count = rng.randint(2, 4)
        duration = rng.randint(120, 300)
        gap = rng.randint(90, 220)
    else:
        count = rng.randint(4, 7)
        duration = rng.randint(40, 110)
        gap = rng.randint(40, 120)
    events = []
    offset = 0
    for i in range(count):
        wobble = 0.85 + 0.3 * rng.random()
        events.append(
            {
                "offset_ms": offset,
                "duration_ms": duration,
                "intensity": round(min(1.0, intensity * wobble), 3),
                "sharpness": round(min(1.0, sharpness * wobble), 3),
            }
        )
        offset += duration + gap
    return events


def main():
    rng = random.Random(20240615)
    doc = {"version": 1, "behaviors": [b for b, *_ in ANIMATIONS]}
    doc["stickers"] = [
        {
            "id": "s_%s" % slug,
            "label": label,
            "valence": valence,
            "arousal": arousal,
            "asset": {"codepoints": [cp]},
        }
        for slug, cp, label, valence, arousal in STICKERS
    ]
    doc["animations"] = [
        {
            "id": "a_%s" % behavior,
            "label": label,
            "valence": valence,
            "arousal": arousal,
            "asset": {"behavior": behavior, "period_ms": period, "amplitude": amplitude},
        }
        for behavior, label, valence, arousal, period, amplitude in ANIMATIONS
    ]
    vibrations = []
    for i in range(1, 97):
        anchor = rng.choice(STICKERS)
        valence = round(min(6.8, max(1.2, anchor[3] + rng.uniform(-0.45, 0.45))), 2)
        arousal = round(min(6.8, max(1.2, anchor[4] + rng.uniform(-0.45, 0.45))), 2)
        vibrations.append(
            {
                "id": "v%02d" % i,
                "label": "pattern %02d" % i,
                "valence": valence,
                "arousal": arousal,
                "asset": {"events": vibration_events(rng, valence, arousal)},
            }
        )
    doc["vibrations"] = vibrations

    candidates = catalog_from_document(doc)
    stickers = candidates.elements[Modality.STICKER]
    pool = candidates.elements[Modality.VIBRATION]
    survivors = mark_frequency_filter(stickers, pool, k=5)
    if len(survivors) < 60:
        raise SystemExit("only %d survivors, need 60; widen the pool" % len(survivors))
    marks = {}
    for sticker in stickers:
        for vid in nearest_vibrations(sticker, pool, 5):
            marks[vid] = marks.get(vid, 0) + 1
    index = {v["id"]: i for i, v in enumerate(vibrations)}
    top = sorted(survivors, key=lambda vid: (-marks[vid], index[vid]))[:60]
    keep = set(top)
    doc["vibrations"] = [v for v in vibrations if v["id"] in keep]
    final = catalog_from_document(doc)
    OUT.parent.mkdir(parents=True, exist_ok=True)
    save_catalog(final, OUT)
    print(
        "wrote %s: %d stickers, %d animations, %d vibrations (of %d candidates)"
        % (
            OUT,
            final.count(Modality.STICKER),
            final.count(Modality.ANIMATION),
            final.count(Modality.VIBRATION),
            len(vibrations),
        )
    )


if __name__ == "__main__":
    main()
