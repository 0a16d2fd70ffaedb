"""Client-side session logic and a small blocking TCP client.

ClientCore mirrors RelayCore's sans-IO style: feed it frames, get back
events for the application plus frames to write. It owns the pieces that
make delivery exactly-once in the user's eyes:

* ops (msg, replay) are numbered once from a per-user counter resumed at
  hello_ok's last_seq, kept in an outbox, and resent after every reconnect
  until the server acks the seq;
* inbound deliveries are de-duplicated per sender by highest seq observed,
  and every delivery is (re-)acknowledged cumulatively.

TcpClient wraps a ClientCore around a real socket with newline-delimited
JSON frames, for integration tests and scripted sessions.
"""

from __future__ import annotations

import json
import queue
import socket
import threading
from dataclasses import dataclass
from typing import Iterable, Mapping


class RelayError(Exception):
    """Server rejected an operation; raised by TcpClient's blocking calls."""

    def __init__(self, code: str, detail: str, seq: int | None = None):
        super().__init__("%s: %s" % (code, detail))
        self.code = code
        self.detail = detail
        self.seq = seq


@dataclass
class Pending:
    """An op waiting for its server ack. seq stays None until a session

    assigns it, and never changes afterwards so retries are idempotent.
    """

    kind: str  # "msg" or "replay"
    body: str = ""
    events: tuple = ()
    ts: int | None = None
    message_id: tuple[str, int] | None = None
    seq: int | None = None


@dataclass(frozen=True)
class SessionUp:
    last_seq: int


@dataclass(frozen=True)
class OpAcked:
    seq: int
    pending: Pending


@dataclass(frozen=True)
class Delivery:
    kind: str  # "msg" or "replay_event"
    sender: str
    seq: int
    ts: int
    body: str
    message_id: tuple[str, int] | None = None


@dataclass(frozen=True)
class RecommendResult:
    seq: int
    target: str
    order: tuple[str, ...]
    scores: tuple[dict, ...]


@dataclass(frozen=True)
class ProtocolError:
    code: str
    detail: str
    seq: int | None


class ClientCore:
    def __init__(self, user_id: str, token: str, auto_ack: bool = True):
        self.user_id = user_id
        self.token = token
        self.auto_ack = auto_ack
        self.session_up = False
        self.outbox: list[Pending] = []
        self.observed: dict[str, int] = {}
        self._next_seq = 1
        self._next_corr = 1

    # -- outgoing ops ------------------------------------------------------

    def send_body(self, body: str, events: Iterable = (), ts: int | None = None) -> Pending:
        pending = Pending(kind="msg", body=body, events=tuple(events), ts=ts)
        return self._submit(pending)

    def replay(self, message_id: tuple[str, int]) -> Pending:
        pending = Pending(kind="replay", message_id=tuple(message_id))
        return self._submit(pending)

    def _submit(self, pending: Pending) -> Pending:
        if self.session_up:
            pending.seq = self._next_seq
            self._next_seq += 1
        self.outbox.append(pending)
        return pending

    def recommend(self, target: str, selected, alpha=None, beta=None) -> tuple[int, dict]:
        corr = self._next_corr
        self._next_corr += 1
        pairs = selected.items() if isinstance(selected, Mapping) else selected
        frame = {
            "type": "recommend",
            "seq": corr,
            "target": target,
            "selected": [list(pair) for pair in pairs],
        }
        if alpha is not None:
            frame["alpha"] = alpha
        if beta is not None:
            frame["beta"] = beta
        return corr, frame

    def pending_frames(self) -> list[dict]:
        """Frames for every numbered, un-acked op, in seq order."""
        frames = []
        for pending in self.outbox:
            if pending.seq is None:
                continue
            frames.append(self._op_frame(pending))
        return frames

    def _op_frame(self, pending: Pending) -> dict:
        if pending.kind == "msg":
            frame = {"type": "msg", "seq": pending.seq, "body": pending.body}
            if pending.events:
                frame["events"] = [list(ev) for ev in pending.events]
            if pending.ts is not None:
                frame["ts"] = pending.ts
            return frame
        return {
            "type": "replay",
            "seq": pending.seq,
            "message_id": list(pending.message_id),
        }

    # -- connection lifecycle ----------------------------------------------

    def hello_frame(self) -> dict:
        return {
            "type": "hello",
            "seq": self._next_corr,
            "user_id": self.user_id,
            "token": self.token,
        }

    def connection_lost(self) -> None:
        self.session_up = False

    # -- inbound -------------------------------------------------------------

    def on_frame(self, frame: dict) -> tuple[list, list[dict]]:
        """Digest one server frame: (events for the app, frames to write)."""
        events: list = []
        out: list[dict] = []
        ftype = frame.get("type")
        if ftype == "hello_ok":
            self.session_up = True
            last_seq = frame.get("last_seq", 0)
            self._next_seq = max(self._next_seq, last_seq + 1)
            for pending in self.outbox:
                if pending.seq is None:
                    pending.seq = self._next_seq
                    self._next_seq += 1
            events.append(SessionUp(last_seq=last_seq))
            out.extend(self.pending_frames())
        elif ftype == "ack":
            seq = frame.get("seq")
            for pending in list(self.outbox):
                if pending.seq == seq:
                    self.outbox.remove(pending)
                    events.append(OpAcked(seq=seq, pending=pending))
        elif ftype in ("msg", "replay_event"):
            sender_key = "sender_id" if ftype == "msg" else "initiator_id"
            sender = frame[sender_key]
            seq = frame["seq"]
            if seq > self.observed.get(sender, 0):
                self.observed[sender] = seq
                message_id = frame.get("message_id")
                events.append(
                    Delivery(
                        kind=ftype,
                        sender=sender,
                        seq=seq,
                        ts=frame["ts"],
                        body=frame["body"],
                        message_id=tuple(message_id) if message_id else (sender, seq),
                    )
                )
            if self.auto_ack:
                out.append(
                    {
                        "type": "ack",
                        "sender_id": sender,
                        "seq": self.observed[sender],
                    }
                )
        elif ftype == "recommend_ok":
            events.append(
                RecommendResult(
                    seq=frame.get("seq", 0),
                    target=frame.get("target", ""),
                    order=tuple(frame.get("order", [])),
                    scores=tuple(frame.get("scores", [])),
                )
            )
        elif ftype == "error":
            events.append(
                ProtocolError(
                    code=frame.get("code", ""),
                    detail=frame.get("detail", ""),
                    seq=frame.get("seq"),
                )
            )
        return events, out


class TcpClient:
    """Blocking newline-JSON client over TCP, built on ClientCore."""

    def __init__(self, host: str, port: int, user_id: str, token: str, timeout: float = 10.0):
        self.core = ClientCore(user_id, token)
        self.timeout = timeout
        self.events: "queue.Queue" = queue.Queue()
        self.deliveries: "queue.Queue[Delivery]" = queue.Queue()
        self._sock = socket.create_connection((host, port), timeout=timeout)
        self._reader_file = self._sock.makefile("r", encoding="utf-8", newline="\n")
        self._write_lock = threading.Lock()
        self._acked: dict[int, Pending] = {}
        self._recommends: dict[int, RecommendResult] = {}
        self._errors: dict[int, ProtocolError] = {}
        self._cond = threading.Condition()
        self._closed = False
        self._thread = threading.Thread(target=self._read_loop, daemon=True)
        self._thread.start()
        self._write(self.core.hello_frame())
        self._wait_for(lambda: self.core.session_up, "hello_ok")

    def _write(self, frame: dict) -> None:
        data = (json.dumps(frame) + "\n").encode("utf-8")
        with self._write_lock:
            self._sock.sendall(data)

    def _read_loop(self) -> None:
        try:
            for line in self._reader_file:
                frame = json.loads(line)
                events, out = self.core.on_frame(frame)
                for f in out:
                    self._write(f)
                with self._cond:
                    for ev in events:
                        self.events.put(ev)
                        if isinstance(ev, Delivery):
                            self.deliveries.put(ev)
                        elif isinstance(ev, OpAcked):
                            self._acked[ev.seq] = ev.pending
                        elif isinstance(ev, RecommendResult):
                            self._recommends[ev.seq] = ev
                        elif isinstance(ev, ProtocolError) and ev.seq is not None:
                            self._errors[ev.seq] = ev
                    self._cond.notify_all()
        except (OSError, ValueError):
            pass
        finally:
            self.core.connection_lost()
            with self._cond:
                self._closed = True
                self._cond.notify_all()

    def _wait_for(self, predicate, what: str):
        with self._cond:
            ok = self._cond.wait_for(
                lambda: predicate() or self._closed, timeout=self.timeout
            )
            if not ok or (self._closed and not predicate()):
                raise TimeoutError("timed out waiting for %s" % what)

    def _await(self, key: int, done: dict, what: str):
        """Block until `key` shows up in `done` or in the error map.

        Any error already recorded under `key` predates the frame we just
        wrote (same numbers reappear only when an op is resent), so callers
        clear the slot before writing.
        """
        self._wait_for(lambda: key in done or key in self._errors, what)
        with self._cond:
            err = self._errors.pop(key, None)
        if err is not None:
            raise RelayError(err.code, err.detail, err.seq)
        return done[key]

    def send_text(self, body: str, events=(), ts: int | None = None) -> int:
        pending = self.core.send_body(body, events=events, ts=ts)
        with self._cond:
            self._errors.pop(pending.seq, None)
        self._write(self.core._op_frame(pending))
        self._await(pending.seq, self._acked, "ack of msg")
        return pending.seq

    def replay(self, message_id: tuple[str, int]) -> int:
        pending = self.core.replay(message_id)
        with self._cond:
            self._errors.pop(pending.seq, None)
        self._write(self.core._op_frame(pending))
        self._await(pending.seq, self._acked, "ack of replay")
        return pending.seq

    def recommend(self, target: str, selected, alpha=None, beta=None) -> RecommendResult:
        corr, frame = self.core.recommend(target, selected, alpha=alpha, beta=beta)
        with self._cond:
            self._errors.pop(corr, None)
        self._write(frame)
        return self._await(corr, self._recommends, "recommend_ok")

    def next_delivery(self, timeout: float | None = None) -> Delivery:
        return self.deliveries.get(timeout=timeout if timeout is not None else self.timeout)

    def close(self) -> None:
        try:
            self._sock.close()
        except OSError:
            pass
