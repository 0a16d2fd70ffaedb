"""Deterministic relay logic, free of sockets and clocks.

The core consumes parsed frames plus connection lifecycle calls and returns
a list of effects (frames to write, connections to close, notifications to
fire). All I/O lives in the transport adapter, which makes the whole relay
drivable from a simulated network in tests.

Delivery contract:

* Clients number their own ops (msg, replay) with a per-user strictly
  increasing ``seq``. The relay journals an op before acknowledging it and
  remembers the highest seq per user (the high-water mark), so a client can
  resend after a lost ack and get an idempotent re-ack instead of a
  duplicate delivery.
* Each accepted message joins the recipient's FIFO queue and stays there
  until the recipient acknowledges it by (sender, seq), cumulatively.
  Deliveries therefore repeat across reconnects (at least once); receivers
  de-duplicate by (sender, seq), which yields exactly-once observation.
* A replay op fans the referenced message out to both parties of the
  original exchange through those same queues.
* hello on a user who is already connected supersedes the old connection:
  the old one is told and closed, the new one wins.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Union

from ..catalog import Catalog, Modality
from ..codec import decode_body
from ..history import EventKind, HistoryStore, now_ms
from ..reco import Selection, Weights, rank_modality, ranking_score
from .journal import Journal

DEFAULT_MAX_BODY_BYTES = 64 * 1024

_CLIENT_EVENT_KINDS = {
    EventKind.OPEN_KEYBOARD.value,
    EventKind.SELECT.value,
    EventKind.DESELECT.value,
}


@dataclass(frozen=True)
class UserConfig:
    token: str
    partner_id: str


@dataclass(frozen=True)
class SendFrame:
    conn_id: str
    frame: dict


@dataclass(frozen=True)
class CloseConn:
    conn_id: str


@dataclass(frozen=True)
class Notify:
    recipient_id: str
    message_id: tuple[str, int]
    sent_ts: int


Effect = Union[SendFrame, CloseConn, Notify]


@dataclass(frozen=True)
class MessageRecord:
    sender: str
    seq: int
    recipient: str
    ts: int
    body: str


@dataclass(frozen=True)
class QueueEntry:
    kind: str  # "msg" or "replay_event"
    sender: str
    seq: int
    ts: int
    body: str
    ref: tuple[str, int] | None = None

    def frame(self) -> dict:
        if self.kind == "msg":
            return {
                "type": "msg",
                "sender_id": self.sender,
                "seq": self.seq,
                "ts": self.ts,
                "body": self.body,
            }
        return {
            "type": "replay_event",
            "initiator_id": self.sender,
            "seq": self.seq,
            "ts": self.ts,
            "message_id": list(self.ref),
            "body": self.body,
        }


def _is_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


class RelayCore:
    def __init__(
        self,
        catalog: Catalog,
        history: HistoryStore,
        journal: Journal,
        users: Mapping[str, UserConfig],
        weights: Weights | None = None,
        clock: Callable[[], int] = now_ms,
        max_body_bytes: int = DEFAULT_MAX_BODY_BYTES,
    ):
        for user_id, cfg in users.items():
            if cfg.partner_id not in users:
                raise ValueError(
                    "user %r has unknown partner %r" % (user_id, cfg.partner_id)
                )
            if cfg.partner_id == user_id:
                raise ValueError("user %r cannot partner with itself" % user_id)
        self.catalog = catalog
        self.history = history
        self.journal = journal
        self.users = dict(users)
        self.weights = weights if weights is not None else Weights()
        self.clock = clock
        self.max_body_bytes = max_body_bytes

        self._conn_user: dict[str, str] = {}
        self._active_conn: dict[str, str] = {}
        self._hwm: dict[str, int] = {}
        self._queues: dict[str, list[QueueEntry]] = {u: [] for u in users}
        self._last_acked: dict[tuple[str, str], int] = {}
        self._messages: dict[tuple[str, int], MessageRecord] = {}
        self._sent: dict[tuple[str, str], int] = {}
        self._acked: dict[tuple[str, str], int] = {}
        self._recover()

    # -- recovery ----------------------------------------------------------

    def _recover(self) -> None:
        records = self.journal.records()
        for rec in records:
            if rec.get("op") == "ack":
                key = (rec["user"], rec["sender"])
                if rec["seq"] > self._last_acked.get(key, 0):
                    self._last_acked[key] = rec["seq"]
        for rec in records:
            op = rec.get("op")
            if op == "send":
                sender, seq = rec["sender"], rec["seq"]
                recipient = rec["recipient"]
                self._hwm[sender] = max(self._hwm.get(sender, 0), seq)
                self._messages[(sender, seq)] = MessageRecord(
                    sender, seq, recipient, rec["ts"], rec["body"]
                )
                lane = (sender, recipient)
                self._sent[lane] = self._sent.get(lane, 0) + 1
                if seq <= self._last_acked.get((recipient, sender), 0):
                    self._acked[lane] = self._acked.get(lane, 0) + 1
                else:
                    self._queues.setdefault(recipient, []).append(
                        QueueEntry("msg", sender, seq, rec["ts"], rec["body"])
                    )
            elif op == "replay":
                initiator, seq = rec["initiator"], rec["seq"]
                self._hwm[initiator] = max(self._hwm.get(initiator, 0), seq)
                ref = tuple(rec["ref"])
                original = self._messages.get(ref)
                if original is None:
                    continue
                for member in rec["fanout"]:
                    if seq <= self._last_acked.get((member, initiator), 0):
                        continue
                    self._queues.setdefault(member, []).append(
                        QueueEntry(
                            "replay_event",
                            initiator,
                            seq,
                            rec["ts"],
                            original.body,
                            ref,
                        )
                    )

    # -- connection lifecycle -----------------------------------------------

    def client_connected(self, conn_id: str) -> list[Effect]:
        return []

    def client_disconnected(self, conn_id: str) -> list[Effect]:
        user = self._conn_user.pop(conn_id, None)
        if user is not None and self._active_conn.get(user) == conn_id:
            del self._active_conn[user]
        return []

    # -- frame dispatch ------------------------------------------------------

    def client_frame(self, conn_id: str, frame) -> list[Effect]:
        if not isinstance(frame, dict) or not isinstance(frame.get("type"), str):
            return [self._error(conn_id, "bad_frame", "frame must be an object with a type")]
        ftype = frame["type"]
        if ftype == "hello":
            return self._handle_hello(conn_id, frame)
        user = self._conn_user.get(conn_id)
        if user is None:
            return [self._error(conn_id, "not_connected", "hello required first", frame.get("seq"))]
        if ftype == "msg":
            return self._handle_msg(conn_id, user, frame)
        if ftype == "ack":
            return self._handle_ack(conn_id, user, frame)
        if ftype == "recommend":
            return self._handle_recommend(conn_id, user, frame)
        if ftype == "replay":
            return self._handle_replay(conn_id, user, frame)
        return [self._error(conn_id, "bad_frame", "unknown frame type %r" % ftype, frame.get("seq"))]

    # -- handlers -------------------------------------------------------------

    def _handle_hello(self, conn_id: str, frame: dict) -> list[Effect]:
        seq = frame.get("seq", 0)
        user_id = frame.get("user_id")
        token = frame.get("token")
        if self._conn_user.get(conn_id) is not None:
            return [self._error(conn_id, "bad_frame", "already authenticated", seq)]
        cfg = self.users.get(user_id) if isinstance(user_id, str) else None
        if cfg is None or not isinstance(token, str) or token != cfg.token:
            return [
                self._error(conn_id, "auth_failed", "unknown user or bad token", seq),
                CloseConn(conn_id),
            ]
        effects: list[Effect] = []
        old_conn = self._active_conn.get(user_id)
        if old_conn is not None and old_conn != conn_id:
            effects.append(
                self._error(old_conn, "superseded", "a newer connection took over")
            )
            effects.append(CloseConn(old_conn))
            self._conn_user.pop(old_conn, None)
        self._conn_user[conn_id] = user_id
        self._active_conn[user_id] = conn_id
        effects.append(
            SendFrame(
                conn_id,
                {
                    "type": "hello_ok",
                    "seq": seq,
                    "user_id": user_id,
                    "last_seq": self._hwm.get(user_id, 0),
                    "server_ts": self.clock(),
                },
            )
        )
        for entry in self._queues.get(user_id, []):
            effects.append(SendFrame(conn_id, entry.frame()))
        return effects

    def _handle_msg(self, conn_id: str, sender: str, frame: dict) -> list[Effect]:
        seq = frame.get("seq")
        if not _is_int(seq) or seq < 1:
            return [self._error(conn_id, "bad_frame", "msg needs a positive integer seq")]
        if seq <= self._hwm.get(sender, 0):
            return [SendFrame(conn_id, {"type": "ack", "seq": seq})]
        body = frame.get("body")
        if not isinstance(body, str):
            return [self._error(conn_id, "bad_frame", "msg needs a string body", seq)]
        if len(body.encode("utf-8")) > self.max_body_bytes:
            return [
                self._error(
                    conn_id,
                    "body_too_large",
                    "body exceeds %d bytes" % self.max_body_bytes,
                    seq,
                )
            ]
        events = frame.get("events", [])
        if not self._valid_events(events):
            return [
                self._error(
                    conn_id,
                    "bad_frame",
                    "events must be [ts_ms, kind, payload] triples",
                    seq,
                )
            ]
        recipient = self.users[sender].partner_id
        if "to" in frame and frame["to"] != recipient:
            return [
                self._error(
                    conn_id, "not_partner", "can only send to %r" % recipient, seq
                )
            ]
        ts = self.clock()
        self.journal.append(
            {
                "op": "send",
                "sender": sender,
                "seq": seq,
                "recipient": recipient,
                "ts": ts,
                "body": body,
            }
        )
        self._hwm[sender] = seq
        self._messages[(sender, seq)] = MessageRecord(sender, seq, recipient, ts, body)
        lane = (sender, recipient)
        self._sent[lane] = self._sent.get(lane, 0) + 1

        for ev_ts, kind, payload in events:
            self.history.record_event(sender, EventKind(kind), payload, ts_ms=ev_ts)
        send_ts = frame["ts"] if _is_int(frame.get("ts")) else ts
        self.history.record_send_body(sender, decode_body(body), ts_ms=send_ts)

        entry = QueueEntry("msg", sender, seq, ts, body)
        effects: list[Effect] = []
        self._queues.setdefault(recipient, []).append(entry)
        effects.append(SendFrame(conn_id, {"type": "ack", "seq": seq}))
        recipient_conn = self._active_conn.get(recipient)
        if recipient_conn is not None:
            effects.append(SendFrame(recipient_conn, entry.frame()))
        else:
            effects.append(Notify(recipient, (sender, seq), ts))
        return effects

    def _valid_events(self, events) -> bool:
        if not isinstance(events, list):
            return False
        for item in events:
            if not isinstance(item, (list, tuple)) or len(item) != 3:
                return False
            ev_ts, kind, payload = item
            if not _is_int(ev_ts) or ev_ts < 0:
                return False
            if kind not in _CLIENT_EVENT_KINDS:
                return False
            if not isinstance(payload, str) or "\t" in payload or "\n" in payload:
                return False
        return True

    def _handle_ack(self, conn_id: str, user: str, frame: dict) -> list[Effect]:
        seq = frame.get("seq")
        sender = frame.get("sender_id")
        if not _is_int(seq) or seq < 0 or not isinstance(sender, str) or not sender:
            return [self._error(conn_id, "bad_frame", "ack needs sender_id and seq")]
        key = (user, sender)
        if seq <= self._last_acked.get(key, 0):
            return []
        self.journal.append({"op": "ack", "user": user, "sender": sender, "seq": seq})
        self._last_acked[key] = seq
        queue = self._queues.get(user, [])
        kept: list[QueueEntry] = []
        for entry in queue:
            if entry.sender == sender and entry.seq <= seq:
                if entry.kind == "msg":
                    lane = (sender, user)
                    self._acked[lane] = self._acked.get(lane, 0) + 1
            else:
                kept.append(entry)
        self._queues[user] = kept
        return []

    def _handle_recommend(self, conn_id: str, user: str, frame: dict) -> list[Effect]:
        seq = frame.get("seq", 0)
        target_raw = frame.get("target")
        try:
            target = Modality(target_raw)
        except ValueError:
            return [self._error(conn_id, "unknown_target", "no modality %r" % target_raw, seq)]
        picks_raw = frame.get("selected")
        if (
            not isinstance(picks_raw, list)
            or not picks_raw
            or not all(
                isinstance(p, (list, tuple))
                and len(p) == 2
                and isinstance(p[0], str)
                and isinstance(p[1], str)
                for p in picks_raw
            )
        ):
            return [
                self._error(
                    conn_id, "bad_frame", "selected must be [modality, id] pairs", seq
                )
            ]
        elements = []
        for modality_raw, element_id in picks_raw:
            try:
                modality = Modality(modality_raw)
            except ValueError:
                return [
                    self._error(conn_id, "unknown_target", "no modality %r" % modality_raw, seq)
                ]
            element = self.catalog.get(modality, element_id)
            if element is None:
                return [
                    self._error(
                        conn_id,
                        "unknown_element",
                        "no %s with id %r" % (modality.value, element_id),
                        seq,
                    )
                ]
            elements.append(element)
        weights = self.weights
        if "alpha" in frame or "beta" in frame:
            try:
                weights = Weights(
                    alpha=float(frame.get("alpha", self.weights.alpha)),
                    beta=float(frame.get("beta", self.weights.beta)),
                )
            except (TypeError, ValueError) as exc:
                return [self._error(conn_id, "bad_frame", str(exc), seq)]
        try:
            selection = Selection(elements=tuple(elements))
            pair_counts = self.history.for_user(user)
            order = rank_modality(selection, target, self.catalog, pair_counts, weights)
        except ValueError as exc:
            return [self._error(conn_id, "bad_frame", str(exc), seq)]
        scores = []
        for element_id in order:
            score = ranking_score(
                selection,
                self.catalog.require(target, element_id),
                self.catalog,
                pair_counts,
                weights,
            )
            scores.append(
                {"id": element_id, "p": score.p, "tf_idf": score.tf_idf, "r": score.r}
            )
        return [
            SendFrame(
                conn_id,
                {
                    "type": "recommend_ok",
                    "seq": seq,
                    "target": target.value,
                    "order": order,
                    "scores": scores,
                },
            )
        ]

    def _handle_replay(self, conn_id: str, initiator: str, frame: dict) -> list[Effect]:
        seq = frame.get("seq")
        if not _is_int(seq) or seq < 1:
            return [self._error(conn_id, "bad_frame", "replay needs a positive integer seq")]
        if seq <= self._hwm.get(initiator, 0):
            return [SendFrame(conn_id, {"type": "ack", "seq": seq})]
        ref_raw = frame.get("message_id")
        if (
            not isinstance(ref_raw, (list, tuple))
            or len(ref_raw) != 2
            or not isinstance(ref_raw[0], str)
            or not _is_int(ref_raw[1])
        ):
            return [
                self._error(conn_id, "bad_frame", "replay needs message_id [sender, seq]", seq)
            ]
        ref = (ref_raw[0], ref_raw[1])
        record = self._messages.get(ref)
        if record is None or initiator not in (record.sender, record.recipient):
            return [
                self._error(conn_id, "unknown_message", "no such message for this user", seq)
            ]
        if not decode_body(record.body).has_emoticon():
            return [
                self._error(conn_id, "no_emoticon", "message has no emoticon to replay", seq)
            ]
        ts = self.clock()
        fanout = [record.sender, record.recipient]
        self.journal.append(
            {
                "op": "replay",
                "initiator": initiator,
                "seq": seq,
                "ref": list(ref),
                "ts": ts,
                "fanout": fanout,
            }
        )
        self._hwm[initiator] = seq
        self.history.record_event(initiator, EventKind.REPLAY, "", ts_ms=ts)
        effects: list[Effect] = [SendFrame(conn_id, {"type": "ack", "seq": seq})]
        for member in fanout:
            entry = QueueEntry("replay_event", initiator, seq, ts, record.body, ref)
            self._queues.setdefault(member, []).append(entry)
            member_conn = self._active_conn.get(member)
            if member_conn is not None:
                effects.append(SendFrame(member_conn, entry.frame()))
        return effects

    def _error(self, conn_id: str, code: str, detail: str, seq=None) -> SendFrame:
        frame = {"type": "error", "code": code, "detail": detail}
        if _is_int(seq):
            frame["seq"] = seq
        return SendFrame(conn_id, frame)

    # -- introspection ---------------------------------------------------------

    def connected_users(self) -> set[str]:
        return set(self._active_conn)

    def queued_for(self, user_id: str) -> list[QueueEntry]:
        return list(self._queues.get(user_id, []))

    def high_water_mark(self, user_id: str) -> int:
        return self._hwm.get(user_id, 0)

    def stats(self) -> dict:
        """Counters for conservation checks: sent = acked + queued per lane."""
        queued: dict[tuple[str, str], int] = {}
        for recipient, entries in self._queues.items():
            for entry in entries:
                if entry.kind == "msg":
                    lane = (entry.sender, recipient)
                    queued[lane] = queued.get(lane, 0) + 1
        return {
            "sent": dict(self._sent),
            "acked": dict(self._acked),
            "queued": queued,
        }
