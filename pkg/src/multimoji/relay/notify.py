"""Offline-recipient notification stub.

When a message is queued for a user with no live connection, the relay can
ping an external push service. This stays a stub on purpose: it fires one
best-effort HTTP POST per queued message and never blocks or fails the
relay, logging delivery problems instead.
"""

from __future__ import annotations

import json
import logging
import threading
import urllib.request

log = logging.getLogger(__name__)


class WebhookNotifier:
    """POSTs {recipient_id, message_id, sent_ts} as JSON to one URL."""

    def __init__(self, url: str, timeout: float = 5.0):
        self.url = url
        self.timeout = timeout

    def __call__(self, recipient_id: str, message_id, sent_ts: int) -> None:
        payload = {
            "recipient_id": recipient_id,
            "message_id": list(message_id),
            "sent_ts": sent_ts,
        }
        thread = threading.Thread(
            target=self._post, args=(payload,), daemon=True, name="notify-webhook"
        )
        thread.start()

    def _post(self, payload: dict) -> None:
        request = urllib.request.Request(
            self.url,
            data=json.dumps(payload).encode("utf-8"),
            headers={"Content-Type": "application/json"},
            method="POST",
        )
        try:
            with urllib.request.urlopen(request, timeout=self.timeout):
                pass
        except Exception as exc:
            log.warning("notify webhook failed for %s: %s", payload["recipient_id"], exc)


class RecordingNotifier:
    """Test double: keeps every notification in a list."""

    def __init__(self):
        self.calls: list[dict] = []

    def __call__(self, recipient_id: str, message_id, sent_ts: int) -> None:
        self.calls.append(
            {
                "recipient_id": recipient_id,
                "message_id": tuple(message_id),
                "sent_ts": sent_ts,
            }
        )
