"""Multi-modal emoticons: catalog, personalized ranking, codec, and relay."""

from .catalog import (
    AnimationAsset,
    Catalog,
    CatalogError,
    CatalogParseError,
    CatalogValidationError,
    Element,
    EmotionPoint,
    Modality,
    RatingRecord,
    StickerAsset,
    VibrationAsset,
    VibrationEvent,
    aggregate_ratings,
    bundled_catalog_path,
    load_catalog,
    mark_frequency_filter,
    nearest_vibrations,
)
from .codec import (
    CodecError,
    MessageBody,
    MultimodalEmoticon,
    decode_body,
    encode_emoticon,
)
from .history import HistoryStore, UsageSummary, authoring_timeframes
from .reco import (
    RankingScore,
    Selection,
    Weights,
    emotional_similarity,
    inverse_document_frequency,
    rank_modality,
    ranking_score,
    term_frequency,
)

__version__ = "0.1.0"

__all__ = [
    "AnimationAsset",
    "Catalog",
    "CatalogError",
    "CatalogParseError",
    "CatalogValidationError",
    "CodecError",
    "Element",
    "EmotionPoint",
    "HistoryStore",
    "MessageBody",
    "Modality",
    "MultimodalEmoticon",
    "RankingScore",
    "RatingRecord",
    "Selection",
    "StickerAsset",
    "UsageSummary",
    "VibrationAsset",
    "VibrationEvent",
    "Weights",
    "aggregate_ratings",
    "authoring_timeframes",
    "bundled_catalog_path",
    "decode_body",
    "emotional_similarity",
    "encode_emoticon",
    "inverse_document_frequency",
    "load_catalog",
    "mark_frequency_filter",
    "nearest_vibrations",
    "rank_modality",
    "ranking_score",
    "term_frequency",
]
