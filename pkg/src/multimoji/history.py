"""Per-user interaction history backing the keyboard ranking.

Two things live here: the pair-count table the TF-IDF term reads (how often a
user sent two elements together inside one emoticon), and an append-only
event log that records keyboard interactions so authoring timeframes and
usage summaries can be derived later.

The log is a plain text file, one event per line:

    timestamp_ms<TAB>user_id<TAB>kind<TAB>payload

where payload is the encoded emoticon tokens for a send, the element id for
select/deselect, and empty otherwise. On startup the store replays this file
to rebuild the pair counts, so the file is the single source of truth.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

from .catalog import Catalog, Modality
from .codec import MessageBody, MultimodalEmoticon, decode_body, encode_emoticon
from .reco import PairKey, pair_key


class EventKind(str, Enum):
    OPEN_KEYBOARD = "open_keyboard"
    SELECT = "select"
    DESELECT = "deselect"
    SEND = "send"
    REPLAY = "replay"


@dataclass(frozen=True)
class InteractionEvent:
    ts_ms: int
    user_id: str
    kind: EventKind
    payload: str = ""


@dataclass(frozen=True)
class AuthoringTimeframe:
    """Span from the first interaction after the previous send to a send."""

    start_ts_ms: int
    end_ts_ms: int
    payload: str

    @property
    def duration_ms(self) -> int:
        return self.end_ts_ms - self.start_ts_ms

    @property
    def has_emoticon(self) -> bool:
        return bool(self.payload)


@dataclass(frozen=True)
class UsageSummary:
    messages_sent: int
    emoticons_sent: int
    median_timeframe_ms: int | None


def now_ms() -> int:
    return time.time_ns() // 1_000_000


def _emoticon_pairs(emoticon: MultimodalEmoticon) -> list[PairKey]:
    ids = emoticon.element_ids()
    return [pair_key(a, b) for i, a in enumerate(ids) for b in ids[i + 1 :]]


_EMOTICON_MODALITIES = (Modality.STICKER, Modality.VIBRATION, Modality.ANIMATION)


def _unknown_elements(
    catalog: Catalog | None, emoticon: MultimodalEmoticon
) -> list[str]:
    if catalog is None:
        return []
    unknown = []
    for modality, eid in zip(
        _EMOTICON_MODALITIES,
        (emoticon.sticker_id, emoticon.vibration_id, emoticon.animation_id),
    ):
        if eid is not None and catalog.get(modality, eid) is None:
            unknown.append("%s %r" % (modality.value, eid))
    return unknown


_AUTHORING_KINDS = frozenset(
    {EventKind.OPEN_KEYBOARD, EventKind.SELECT, EventKind.DESELECT}
)


def authoring_timeframes(
    events: Iterable[InteractionEvent],
) -> list[AuthoringTimeframe]:
    """One timeframe per send, from the first authoring interaction
    (open_keyboard/select/deselect) after the previous send to the send
    itself. A send with no such interaction has duration zero.
    """
    frames: list[AuthoringTimeframe] = []
    window_start: int | None = None
    for ev in events:
        if window_start is None and ev.kind in _AUTHORING_KINDS:
            window_start = ev.ts_ms
        if ev.kind is EventKind.SEND:
            frames.append(
                AuthoringTimeframe(
                    start_ts_ms=window_start if window_start is not None else ev.ts_ms,
                    end_ts_ms=ev.ts_ms,
                    payload=ev.payload,
                )
            )
            window_start = None
    return frames


def _lower_median(values: Sequence[int]) -> int:
    ordered = sorted(values)
    return ordered[(len(ordered) - 1) // 2]


class HistoryStore:
    """Pair counts plus the event log, persisted to one file per deployment.

    With path=None the store is memory-only (tests, simulations).
    """

    def __init__(
        self,
        catalog: Catalog | None,
        path: str | Path | None = None,
        readonly: bool = False,
    ):
        self._catalog = catalog
        self._path = Path(path) if path is not None else None
        self._lock = threading.Lock()
        self._pairs: dict[str, dict[PairKey, int]] = {}
        self._events: dict[str, list[InteractionEvent]] = {}
        self._file = None
        if self._path is not None:
            if self._path.exists():
                self._replay_file()
            if not readonly:
                self._path.parent.mkdir(parents=True, exist_ok=True)
                self._file = open(self._path, "a", encoding="utf-8")

    # -- persistence ------------------------------------------------------

    def _replay_file(self) -> None:
        for line in self._path.read_text(encoding="utf-8").splitlines():
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                continue
            ts_raw, user_id, kind_raw, payload = parts
            try:
                ev = InteractionEvent(int(ts_raw), user_id, EventKind(kind_raw), payload)
            except ValueError:
                continue
            self._ingest(ev)

    def _ingest(self, ev: InteractionEvent) -> None:
        self._events.setdefault(ev.user_id, []).append(ev)
        if ev.kind is EventKind.SEND and ev.payload:
            pairs = self._pairs.setdefault(ev.user_id, {})
            for emoticon in decode_body(ev.payload).emoticons():
                if _unknown_elements(self._catalog, emoticon):
                    continue
                for key in _emoticon_pairs(emoticon):
                    pairs[key] = pairs.get(key, 0) + 1

    def _append(self, ev: InteractionEvent) -> None:
        self._ingest(ev)
        if self._file is not None:
            self._file.write(
                "%d\t%s\t%s\t%s\n" % (ev.ts_ms, ev.user_id, ev.kind.value, ev.payload)
            )
            self._file.flush()

    def close(self) -> None:
        with self._lock:
            if self._file is not None:
                self._file.close()
                self._file = None

    # -- recording --------------------------------------------------------

    def record_event(
        self,
        user_id: str,
        kind: EventKind,
        element_id: str = "",
        ts_ms: int | None = None,
    ) -> None:
        """Log a non-send keyboard interaction."""
        if kind is EventKind.SEND:
            raise ValueError("use record_send for send events")
        with self._lock:
            self._append(
                InteractionEvent(
                    ts_ms if ts_ms is not None else now_ms(), user_id, kind, element_id
                )
            )

    def record_send(
        self,
        user_id: str,
        emoticon: MultimodalEmoticon,
        ts_ms: int | None = None,
    ) -> dict[PairKey, int]:
        """Count one sent emoticon's pairings and log the send.

        Every referenced element must exist in the catalog. Returns the
        user's updated pair counts.
        """
        unknown = _unknown_elements(self._catalog, emoticon)
        if unknown:
            raise ValueError("unknown element id: %s" % ", ".join(unknown))
        with self._lock:
            self._append(
                InteractionEvent(
                    ts_ms if ts_ms is not None else now_ms(),
                    user_id,
                    EventKind.SEND,
                    encode_emoticon(emoticon),
                )
            )
            return dict(self._pairs.get(user_id, {}))

    def record_send_body(
        self, user_id: str, body: MessageBody, ts_ms: int | None = None
    ) -> None:
        """Log a whole outgoing message: one send event, emoticons or not.

        Emoticons naming elements missing from the catalog still relay fine,
        so they are logged but skipped for pair counting.
        """
        payload = "".join(encode_emoticon(e) for e in body.emoticons())
        with self._lock:
            self._append(
                InteractionEvent(
                    ts_ms if ts_ms is not None else now_ms(),
                    user_id,
                    EventKind.SEND,
                    payload,
                )
            )

    # -- queries ----------------------------------------------------------

    def pair_count(self, user_id: str, a: str, b: str) -> int:
        with self._lock:
            return self._pairs.get(user_id, {}).get(pair_key(a, b), 0)

    def for_user(self, user_id: str) -> dict[PairKey, int]:
        """Snapshot of one user's pair counts, safe to hand to the ranker."""
        with self._lock:
            return dict(self._pairs.get(user_id, {}))

    def events_for(self, user_id: str) -> list[InteractionEvent]:
        with self._lock:
            return list(self._events.get(user_id, []))

    def users(self) -> list[str]:
        with self._lock:
            return sorted(self._events.keys() | self._pairs.keys())

    def usage_summary(self, user_id: str) -> UsageSummary:
        """Counts of text and emoticon sends plus the median authoring time.

        The median covers only sends that carried at least one emoticon,
        taking the lower middle value for even counts. None when the user
        never sent an emoticon.
        """
        frames = authoring_timeframes(self.events_for(user_id))
        messages_sent = 0
        emoticons_sent = 0
        emoticon_durations: list[int] = []
        for frame in frames:
            if frame.has_emoticon:
                emoticons_sent += len(decode_body(frame.payload).emoticons())
                emoticon_durations.append(frame.duration_ms)
            else:
                messages_sent += 1
        median = _lower_median(emoticon_durations) if emoticon_durations else None
        return UsageSummary(
            messages_sent=messages_sent,
            emoticons_sent=emoticons_sent,
            median_timeframe_ms=median,
        )
