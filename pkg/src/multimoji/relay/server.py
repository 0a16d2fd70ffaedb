"""Asyncio transport in front of RelayCore.

One listener serves three kinds of traffic, sniffed from the first byte:

* a line starting with ``{``: a raw TCP session speaking newline-delimited
  JSON frames (the native protocol, used by tests and scripted clients);
* anything else: HTTP. ``GET /catalog`` returns the catalog document,
  ``GET /ws`` upgrades to a WebSocket carrying one JSON frame per text
  message, and other GETs serve static files from the configured directory
  so the browser client can be hosted by the relay itself.

The core is synchronous and runs on the event loop thread, so no locking is
needed; this adapter only moves bytes and executes the core's effects.
"""

from __future__ import annotations

import asyncio
import base64
import hashlib
import json
import logging
from pathlib import Path

from ..catalog import Catalog, catalog_to_document
from ..history import HistoryStore, now_ms
from ..reco import Weights
from .core import CloseConn, Notify, RelayCore, SendFrame, UserConfig
from .journal import Journal
from .notify import WebhookNotifier

log = logging.getLogger(__name__)

MAX_FRAME_BYTES = 1 << 20
WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".mjs": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".json": "application/json",
    ".map": "application/json",
    ".svg": "image/svg+xml",
    ".png": "image/png",
    ".ico": "image/x-icon",
}


class RelayServer:
    def __init__(
        self,
        catalog: Catalog,
        users: dict[str, UserConfig],
        data_dir: str | Path,
        host: str = "127.0.0.1",
        port: int = 0,
        weights: Weights | None = None,
        webhook_url: str | None = None,
        static_dir: str | Path | None = None,
        clock=now_ms,
    ):
        data_dir = Path(data_dir)
        data_dir.mkdir(parents=True, exist_ok=True)
        self.catalog = catalog
        self.history = HistoryStore(catalog, data_dir / "events.log")
        self.journal = Journal(data_dir / "journal.log")
        self.core = RelayCore(
            catalog,
            self.history,
            self.journal,
            users,
            weights=weights,
            clock=clock,
        )
        self.notifier = WebhookNotifier(webhook_url) if webhook_url else None
        self.host = host
        self.port = port
        self.static_dir = Path(static_dir).resolve() if static_dir else None
        self._server: asyncio.AbstractServer | None = None
        self._conns: dict[str, tuple[asyncio.StreamWriter, str]] = {}
        self._next_conn = 0

    async def start(self) -> None:
        self._server = await asyncio.start_server(
            self._handle_conn, self.host, self.port, limit=MAX_FRAME_BYTES
        )
        self.port = self._server.sockets[0].getsockname()[1]

    async def serve_forever(self) -> None:
        assert self._server is not None
        async with self._server:
            await self._server.serve_forever()

    async def stop(self) -> None:
        if self._server is not None:
            self._server.close()
            await self._server.wait_closed()
        for writer, _ in list(self._conns.values()):
            writer.close()
        self.journal.close()
        self.history.close()

    # -- effect execution ---------------------------------------------------

    def _apply(self, effects) -> None:
        for effect in effects:
            if isinstance(effect, SendFrame):
                self._send_frame(effect.conn_id, effect.frame)
            elif isinstance(effect, CloseConn):
                conn = self._conns.get(effect.conn_id)
                if conn is not None:
                    conn[0].close()
            elif isinstance(effect, Notify):
                if self.notifier is not None:
                    self.notifier(effect.recipient_id, effect.message_id, effect.sent_ts)

    def _send_frame(self, conn_id: str, frame: dict) -> None:
        conn = self._conns.get(conn_id)
        if conn is None:
            return
        writer, mode = conn
        payload = json.dumps(frame, separators=(",", ":"))
        try:
            if mode == "ws":
                writer.write(_ws_frame(0x1, payload.encode("utf-8")))
            else:
                writer.write(payload.encode("utf-8") + b"\n")
        except (ConnectionError, RuntimeError):
            pass

    # -- connection handling ---------------------------------------------------

    async def _handle_conn(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter):
        try:
            first = await reader.read(1)
        except (ConnectionError, asyncio.IncompleteReadError):
            writer.close()
            return
        if not first:
            writer.close()
            return
        try:
            if first == b"{":
                await self._serve_raw(first, reader, writer)
            else:
                await self._serve_http(first, reader, writer)
        except (ConnectionError, asyncio.IncompleteReadError, asyncio.LimitOverrunError):
            pass
        except Exception:
            log.exception("connection handler failed")
        finally:
            writer.close()

    def _register(self, writer: asyncio.StreamWriter, mode: str) -> str:
        self._next_conn += 1
        conn_id = "c%d" % self._next_conn
        self._conns[conn_id] = (writer, mode)
        self._apply(self.core.client_connected(conn_id))
        return conn_id

    def _unregister(self, conn_id: str) -> None:
        self._conns.pop(conn_id, None)
        self._apply(self.core.client_disconnected(conn_id))

    async def _serve_raw(self, first: bytes, reader, writer) -> None:
        conn_id = self._register(writer, "raw")
        try:
            buf = first
            while True:
                line = await reader.readline()
                if not line:
                    break
                buf += line
                if not buf.endswith(b"\n"):
                    break
                self._dispatch(conn_id, buf)
                buf = b""
                if conn_id not in self._conns:
                    break
        finally:
            self._unregister(conn_id)

    def _dispatch(self, conn_id: str, raw: bytes) -> None:
        try:
            frame = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError):
            frame = None
        self._apply(self.core.client_frame(conn_id, frame))

    # -- HTTP ----------------------------------------------------------------

    async def _serve_http(self, first: bytes, reader, writer) -> None:
        head = first + await reader.readuntil(b"\r\n\r\n")
        request_line, _, rest = head.partition(b"\r\n")
        parts = request_line.decode("latin-1").split()
        if len(parts) != 3:
            _http_response(writer, 400, "bad request")
            return
        method, path, _version = parts
        headers = {}
        for line in rest.split(b"\r\n"):
            name, sep, value = line.decode("latin-1").partition(":")
            if sep:
                headers[name.strip().lower()] = value.strip()
        path = path.split("?", 1)[0]
        if method != "GET":
            _http_response(writer, 405, "method not allowed")
            return
        if path == "/catalog":
            body = json.dumps(catalog_to_document(self.catalog)).encode("utf-8")
            _http_response(writer, 200, body, content_type="application/json")
            return
        if path == "/ws":
            await self._serve_websocket(reader, writer, headers)
            return
        self._serve_static(writer, path)

    def _serve_static(self, writer, path: str) -> None:
        if self.static_dir is None:
            _http_response(writer, 404, "not found")
            return
        rel = path.lstrip("/") or "index.html"
        target = (self.static_dir / rel).resolve()
        if not str(target).startswith(str(self.static_dir) + "/") and target != self.static_dir:
            _http_response(writer, 404, "not found")
            return
        if target.is_dir():
            target = target / "index.html"
        if not target.is_file():
            _http_response(writer, 404, "not found")
            return
        content_type = _CONTENT_TYPES.get(target.suffix, "application/octet-stream")
        _http_response(writer, 200, target.read_bytes(), content_type=content_type)

    # -- WebSocket --------------------------------------------------------------

    async def _serve_websocket(self, reader, writer, headers: dict) -> None:
        key = headers.get("sec-websocket-key")
        if headers.get("upgrade", "").lower() != "websocket" or not key:
            _http_response(writer, 400, "expected websocket upgrade")
            return
        accept = base64.b64encode(
            hashlib.sha1((key + WS_GUID).encode("latin-1")).digest()
        ).decode("latin-1")
        writer.write(
            (
                "HTTP/1.1 101 Switching Protocols\r\n"
                "Upgrade: websocket\r\n"
                "Connection: Upgrade\r\n"
                "Sec-WebSocket-Accept: %s\r\n\r\n" % accept
            ).encode("latin-1")
        )
        conn_id = self._register(writer, "ws")
        try:
            while True:
                message = await _read_ws_message(reader, writer)
                if message is None:
                    break
                self._dispatch(conn_id, message)
                if conn_id not in self._conns:
                    break
        finally:
            self._unregister(conn_id)


def _http_response(writer, status: int, body, content_type="text/plain; charset=utf-8"):
    if isinstance(body, str):
        body = body.encode("utf-8")
    reason = {200: "OK", 400: "Bad Request", 404: "Not Found", 405: "Method Not Allowed"}
    head = (
        "HTTP/1.1 %d %s\r\n"
        "Content-Type: %s\r\n"
        "Content-Length: %d\r\n"
        "Access-Control-Allow-Origin: *\r\n"
        "Connection: close\r\n\r\n" % (status, reason.get(status, "OK"), content_type, len(body))
    )
    writer.write(head.encode("latin-1") + body)


def _ws_frame(opcode: int, payload: bytes) -> bytes:
    head = bytes([0x80 | opcode])
    n = len(payload)
    if n < 126:
        head += bytes([n])
    elif n < 1 << 16:
        head += bytes([126]) + n.to_bytes(2, "big")
    else:
        head += bytes([127]) + n.to_bytes(8, "big")
    return head + payload


async def _read_ws_message(reader, writer) -> bytes | None:
    """One complete text message, handling ping/pong and fragmentation."""
    parts: list[bytes] = []
    while True:
        try:
            b0, b1 = await reader.readexactly(2)
        except asyncio.IncompleteReadError:
            return None
        fin = b0 & 0x80
        opcode = b0 & 0x0F
        length = b1 & 0x7F
        if length == 126:
            length = int.from_bytes(await reader.readexactly(2), "big")
        elif length == 127:
            length = int.from_bytes(await reader.readexactly(8), "big")
        if length > MAX_FRAME_BYTES:
            return None
        mask = await reader.readexactly(4) if b1 & 0x80 else None
        payload = await reader.readexactly(length) if length else b""
        if mask:
            payload = bytes(c ^ mask[i % 4] for i, c in enumerate(payload))
        if opcode == 0x8:
            writer.write(_ws_frame(0x8, b""))
            return None
        if opcode == 0x9:
            writer.write(_ws_frame(0xA, payload))
            continue
        if opcode == 0xA:
            continue
        parts.append(payload)
        if fin:
            return b"".join(parts)
