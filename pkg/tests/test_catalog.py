"""Catalog loading, validation, and dataset-preparation tests."""

from __future__ import annotations

import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from helpers import animation, make_catalog, make_doc, points_of, sticker, vibration
from multimoji.catalog import (
    CatalogParseError,
    CatalogValidationError,
    EmotionPoint,
    Modality,
    RatingRecord,
    aggregate_ratings,
    bundled_catalog_path,
    catalog_from_document,
    catalog_to_document,
    load_catalog,
    load_ratings,
    mark_frequency_filter,
    nearest_vibrations,
    save_catalog,
    validate_catalog_document,
)


def minimal_doc():
    return make_doc(
        [sticker("s1", 4.0, 4.0)],
        [animation("a1", 3.0, 3.0)],
        [vibration("v1", 5.0, 5.0)],
    )


def test_minimal_catalog_loads():
    cat = catalog_from_document(minimal_doc())
    assert cat.count(Modality.STICKER) == 1
    assert cat.count(Modality.ANIMATION) == 1
    assert cat.count(Modality.VIBRATION) == 1


def test_duplicate_id_violation_names_the_id():
    doc = minimal_doc()
    doc["stickers"].append(sticker("s1", 2.0, 2.0))
    with pytest.raises(CatalogValidationError) as err:
        catalog_from_document(doc)
    assert any("s1" in v and "duplicate" in v for v in err.value.violations)


def test_bundled_catalog_counts():
    cat = load_catalog(bundled_catalog_path())
    assert cat.count(Modality.STICKER) == 50
    assert cat.count(Modality.ANIMATION) == 15
    assert cat.count(Modality.VIBRATION) == 60


def test_serialization_roundtrip(tmp_path):
    cat = load_catalog(bundled_catalog_path())
    out = tmp_path / "copy.json"
    save_catalog(cat, out)
    assert load_catalog(out) == cat


def test_document_order_is_display_order():
    doc = minimal_doc()
    doc["stickers"] = [sticker("sx", 2.0, 2.0), sticker("sa", 3.0, 3.0)]
    cat = catalog_from_document(doc)
    assert cat.order(Modality.STICKER) == ["sx", "sa"]
    assert cat.position(Modality.STICKER, "sa") == 1


@pytest.mark.parametrize("valence", [0.9, 7.1, float("nan"), "4"])
def test_emotion_range_violations(valence):
    doc = minimal_doc()
    doc["stickers"][0]["valence"] = valence
    violations = validate_catalog_document(doc)
    assert any("valence" in v for v in violations)


def test_emotion_point_type_validates():
    with pytest.raises(ValueError):
        EmotionPoint(0.5, 4.0)
    with pytest.raises(ValueError):
        EmotionPoint(4.0, 7.5)
    assert EmotionPoint(1.0, 7.0).distance(EmotionPoint(1.0, 7.0)) == 0.0


@pytest.mark.parametrize(
    "mutate, needle",
    [
        (lambda d: d["animations"][0]["asset"].update(amplitude=0.0), "amplitude"),
        (lambda d: d["animations"][0]["asset"].update(amplitude=1.2), "amplitude"),
        (lambda d: d["animations"][0]["asset"].update(behavior="warp"), "behavior"),
        (lambda d: d["animations"][0]["asset"].update(period_ms=0), "period_ms"),
        (lambda d: d["stickers"][0]["asset"].update(codepoints=[0xD800]), "scalar"),
        (lambda d: d["stickers"][0]["asset"].update(codepoints=[]), "codepoints"),
        (lambda d: d["stickers"][0].update(id="has:colon"), "has:colon"),
        (lambda d: d["stickers"][0].update(id="-"), "-"),
        (lambda d: d["vibrations"][0]["asset"].update(events=[]), "events"),
    ],
)
def test_asset_violations(mutate, needle):
    doc = minimal_doc()
    mutate(doc)
    violations = validate_catalog_document(doc)
    assert violations, "expected a violation"
    assert any(needle in v for v in violations)


def test_unsorted_vibration_events_rejected():
    doc = minimal_doc()
    doc["vibrations"][0]["asset"]["events"] = [
        {"offset_ms": 500, "duration_ms": 100, "intensity": 0.5, "sharpness": 0.5},
        {"offset_ms": 0, "duration_ms": 100, "intensity": 0.5, "sharpness": 0.5},
    ]
    violations = validate_catalog_document(doc)
    assert any("sorted" in v for v in violations)


def test_overlong_vibration_rejected():
    doc = minimal_doc()
    doc["vibrations"][0]["asset"]["events"] = [
        {"offset_ms": 9500, "duration_ms": 600, "intensity": 0.5, "sharpness": 0.5},
    ]
    violations = validate_catalog_document(doc)
    assert any("extent" in v for v in violations)


def test_all_violations_collected_not_just_first():
    doc = minimal_doc()
    doc["stickers"][0]["valence"] = 99
    doc["animations"][0]["asset"]["behavior"] = "warp"
    doc["vibrations"][0]["label"] = ""
    violations = validate_catalog_document(doc)
    assert len(violations) >= 3


def test_version_must_be_one():
    doc = minimal_doc()
    doc["version"] = 2
    assert any("version" in v for v in validate_catalog_document(doc))


def test_non_object_document():
    assert validate_catalog_document([1, 2]) == ["document must be a top-level object"]


def test_parse_error_on_bad_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{nope")
    with pytest.raises(CatalogParseError):
        load_catalog(path)


def test_missing_file_raises_oserror(tmp_path):
    with pytest.raises(OSError):
        load_catalog(tmp_path / "absent.json")


def test_catalog_to_document_matches_source():
    doc = minimal_doc()
    assert catalog_to_document(catalog_from_document(doc)) == doc


# -- ratings -------------------------------------------------------------------


def test_mean_of_three_ratings():
    records = [RatingRecord("e1", "r%d" % i, v, 4) for i, v in enumerate([3, 4, 5])]
    points = aggregate_ratings(records)
    assert points["e1"] == EmotionPoint(4.0, 4.0)


def test_single_record_identity():
    points = aggregate_ratings([RatingRecord("e1", "r1", 7, 1)])
    assert points["e1"] == EmotionPoint(7.0, 1.0)


def test_rating_record_validates_scores():
    with pytest.raises(ValueError):
        RatingRecord("e", "r", 0, 4)
    with pytest.raises(ValueError):
        RatingRecord("e", "r", 4, 8)
    with pytest.raises(ValueError):
        RatingRecord("e", "r", 4.0, 4)


def test_synthetic_ratings_match_oracle():
    rng = random.Random(42)
    records = [
        RatingRecord("e%d" % rng.randrange(5), "r%d" % i, rng.randint(1, 7), rng.randint(1, 7))
        for i in range(52)
    ]
    got = aggregate_ratings(records)
    want = oracles.mean_ratings(
        [(r.element_id, r.respondent_id, r.valence, r.arousal) for r in records]
    )
    assert set(got) == set(want)
    for eid, point in got.items():
        assert abs(point.valence - want[eid][0]) <= 1e-12
        assert abs(point.arousal - want[eid][1]) <= 1e-12


def test_aggregation_is_permutation_invariant():
    rng = random.Random(7)
    records = [
        RatingRecord("e%d" % rng.randrange(4), "r%d" % i, rng.randint(1, 7), rng.randint(1, 7))
        for i in range(40)
    ]
    shuffled = records[:]
    rng.shuffle(shuffled)
    assert aggregate_ratings(records) == aggregate_ratings(shuffled)


def test_roster_without_ratings_errors():
    records = [RatingRecord("e1", "r1", 4, 4)]
    with pytest.raises(ValueError) as err:
        aggregate_ratings(records, element_ids=["e1", "e2"])
    assert "e2" in str(err.value)


def test_load_ratings_file(tmp_path):
    path = tmp_path / "ratings.tsv"
    path.write_text("e1\tr1\t3\t5\n\ne2\tr1\t7\t1\n")
    records = load_ratings(path)
    assert records == [RatingRecord("e1", "r1", 3, 5), RatingRecord("e2", "r1", 7, 1)]
    bad = tmp_path / "bad.tsv"
    bad.write_text("e1\tr1\t3\n")
    with pytest.raises(ValueError) as err:
        load_ratings(bad)
    assert "line 1" in str(err.value)


# -- nearest / filter ------------------------------------------------------------


def grid_catalog(vib_points):
    return make_catalog(
        [sticker("s1", 4.0, 4.0)],
        [animation("a1", 4.0, 4.0)],
        [vibration("v%d" % i, v, a) for i, (v, a) in enumerate(vib_points)],
    )


def test_nearest_five_of_six():
    cat = grid_catalog([(4.0, 4.0 + 0.4 * d) for d in (1, 2, 3, 4, 5, 6)])
    s = cat.elements[Modality.STICKER][0]
    got = nearest_vibrations(s, cat.elements[Modality.VIBRATION], 5)
    assert got == ["v0", "v1", "v2", "v3", "v4"]


def test_nearest_tie_prefers_catalog_order():
    cat = grid_catalog([(5.0, 4.0), (3.0, 4.0), (4.0, 5.0)])
    s = cat.elements[Modality.STICKER][0]
    got = nearest_vibrations(s, cat.elements[Modality.VIBRATION], 3)
    assert got == ["v0", "v1", "v2"]


def test_nearest_preconditions():
    cat = grid_catalog([(4.0, 5.0)])
    s = cat.elements[Modality.STICKER][0]
    vibs = cat.elements[Modality.VIBRATION]
    with pytest.raises(ValueError):
        nearest_vibrations(s, vibs, 2)
    with pytest.raises(ValueError):
        nearest_vibrations(s, vibs, 0)
    with pytest.raises(ValueError):
        nearest_vibrations(vibs[0], vibs, 1)
    with pytest.raises(ValueError):
        nearest_vibrations(s, [s], 1)


def test_nearest_matches_oracle_random():
    rng = random.Random(99)
    for _ in range(50):
        n = rng.randint(5, 60)
        cat = grid_catalog(
            [(round(rng.uniform(1, 7), 3), round(rng.uniform(1, 7), 3)) for _ in range(n)]
        )
        s = cat.elements[Modality.STICKER][0]
        k = rng.randint(1, n)
        got = nearest_vibrations(s, cat.elements[Modality.VIBRATION], k)
        want = oracles.nearest(
            (s.emotion.valence, s.emotion.arousal),
            points_of(cat, Modality.VIBRATION),
            k,
        )
        assert got == want


def test_single_sticker_filters_everything():
    cat = grid_catalog([(2.0, 2.0), (3.0, 3.0), (5.0, 5.0)])
    got = mark_frequency_filter(
        cat.elements[Modality.STICKER], cat.elements[Modality.VIBRATION], 2
    )
    assert got == []


def test_identical_stickers_share_marks():
    cat = make_catalog(
        [sticker("s1", 4.0, 4.0), sticker("s2", 4.0, 4.0)],
        [animation("a1", 4.0, 4.0)],
        [vibration("v%d" % i, 1.0 + i, 4.0) for i in range(6)],
    )
    got = mark_frequency_filter(
        cat.elements[Modality.STICKER], cat.elements[Modality.VIBRATION], 3
    )
    assert got == ["v2", "v3", "v4"]


def test_filter_matches_oracle_random():
    rng = random.Random(123)
    for _ in range(30):
        n_s, n_v = rng.randint(2, 10), rng.randint(5, 30)
        cat = make_catalog(
            [
                sticker("s%d" % i, round(rng.uniform(1, 7), 3), round(rng.uniform(1, 7), 3))
                for i in range(n_s)
            ],
            [animation("a1", 4.0, 4.0)],
            [
                vibration("v%d" % i, round(rng.uniform(1, 7), 3), round(rng.uniform(1, 7), 3))
                for i in range(n_v)
            ],
        )
        k = rng.randint(1, n_v)
        got = mark_frequency_filter(
            cat.elements[Modality.STICKER], cat.elements[Modality.VIBRATION], k
        )
        want = oracles.mark_filter(
            [(s.emotion.valence, s.emotion.arousal) for s in cat.elements[Modality.STICKER]],
            points_of(cat, Modality.VIBRATION),
            k,
        )
        assert got == want


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_removing_a_sticker_never_raises_mark_counts(seed):
    rng = random.Random(seed)
    vib_points = [
        (round(rng.uniform(1, 7), 3), round(rng.uniform(1, 7), 3)) for _ in range(12)
    ]
    sticker_points = [
        (round(rng.uniform(1, 7), 3), round(rng.uniform(1, 7), 3)) for _ in range(4)
    ]
    candidates = [("v%d" % i, p) for i, p in enumerate(vib_points)]

    def marks(stickers):
        out: dict[str, int] = {}
        for p in stickers:
            for vid in oracles.nearest(p, candidates, 3):
                out[vid] = out.get(vid, 0) + 1
        return out

    full = marks(sticker_points)
    fewer = marks(sticker_points[:-1])
    for vid, count in fewer.items():
        assert count <= full.get(vid, 0)


def test_fuzzed_documents_never_crash_validator():
    rng = random.Random(5)
    samples = [
        None,
        3,
        [],
        {},
        {"version": 1},
        {"version": 1, "behaviors": "x", "stickers": [], "animations": 0, "vibrations": [{}]},
        {"version": 1, "behaviors": [], "stickers": [{"id": 1}], "animations": [None], "vibrations": [{"id": "v", "label": 2, "valence": "x", "arousal": None, "asset": []}]},
    ]
    doc = minimal_doc()
    blob = json.dumps(doc)
    for _ in range(200):
        chars = list(blob)
        for _ in range(rng.randint(1, 6)):
            pos = rng.randrange(len(chars))
            chars[pos] = rng.choice('{}[]",:0123456789abc')
        try:
            mutated = json.loads("".join(chars))
        except json.JSONDecodeError:
            continue
        samples.append(mutated)
    for sample in samples:
        violations = validate_catalog_document(sample)
        assert isinstance(violations, list)
