"""Plain-text wire encoding for multi-modal emoticons.

An emoticon travels inside an ordinary chat message as a single-line token:

    [[VE1:<sticker_id>:<vibration_id>:<animation_id>]]

with ``-`` marking an absent vibration or animation. The sticker field is
mandatory. Anything that is not a well-formed token (unknown version, wrong
field count, empty or absent sticker) is left in the message as literal text,
so a message never fails to decode.

The codec is catalog-agnostic: ids are not resolved here. Receivers render a
placeholder for ids missing from their catalog.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

TOKEN_VERSION = "VE1"
ABSENT = "-"

# Characters an element id may never contain: they would break the token
# grammar or the line-oriented transports the tokens travel over.
FORBIDDEN_ID_CHARS = frozenset(":[]\n\r")

_FIELD = r"[^\[\]:\n\r]+"
_TOKEN_RE = re.compile(r"\[\[VE1:(%s):(%s):(%s)\]\]" % (_FIELD, _FIELD, _FIELD))


class CodecError(ValueError):
    """An emoticon cannot be encoded (invalid id at authoring time)."""


@dataclass(frozen=True)
class MultimodalEmoticon:
    """A sticker with optional vibration and animation, as authored."""

    sticker_id: str
    vibration_id: str | None = None
    animation_id: str | None = None

    def element_ids(self) -> list[str]:
        """Present ids, sticker first."""
        return [i for i in (self.sticker_id, self.vibration_id, self.animation_id) if i]


@dataclass(frozen=True)
class Text:
    value: str


@dataclass(frozen=True)
class Emoticon:
    emoticon: MultimodalEmoticon


Segment = Union[Text, Emoticon]


@dataclass(frozen=True)
class MessageBody:
    """An ordered mix of literal text and emoticon segments."""

    segments: tuple[Segment, ...]

    def emoticons(self) -> list[MultimodalEmoticon]:
        return [seg.emoticon for seg in self.segments if isinstance(seg, Emoticon)]

    def has_emoticon(self) -> bool:
        return any(isinstance(seg, Emoticon) for seg in self.segments)

    def text(self) -> str:
        """Literal text content, emoticons omitted."""
        return "".join(seg.value for seg in self.segments if isinstance(seg, Text))


def validate_element_id(element_id: str) -> None:
    """Raise CodecError unless the id is safe to embed in a token."""
    if not element_id:
        raise CodecError("element id is empty")
    if element_id == ABSENT:
        raise CodecError("element id %r collides with the absence marker" % element_id)
    bad = FORBIDDEN_ID_CHARS.intersection(element_id)
    if bad:
        raise CodecError(
            "element id %r contains reserved character(s) %s"
            % (element_id, ", ".join(repr(c) for c in sorted(bad)))
        )
    if not element_id.isprintable():
        raise CodecError("element id %r contains non-printable characters" % element_id)


def _format_token(e: MultimodalEmoticon) -> str:
    return "[[%s:%s:%s:%s]]" % (
        TOKEN_VERSION,
        e.sticker_id,
        e.vibration_id or ABSENT,
        e.animation_id or ABSENT,
    )


def encode_emoticon(e: MultimodalEmoticon) -> str:
    """Render an emoticon as its wire token.

    Ids are re-checked defensively even though catalog validation already
    rejects ids that could not round-trip.
    """
    validate_element_id(e.sticker_id)
    for optional in (e.vibration_id, e.animation_id):
        if optional is not None:
            validate_element_id(optional)
    return _format_token(e)


def decode_body(text: str) -> MessageBody:
    """Split a message string into text and emoticon segments.

    Total: any input decodes. Malformed candidate tokens stay literal text,
    and re-encoding the segments concatenates back to the input exactly.
    """
    segments: list[Segment] = []
    pos = 0
    for match in _TOKEN_RE.finditer(text):
        sticker, vibration, animation = match.groups()
        if sticker == ABSENT:
            # Absent sticker is not a valid emoticon; the span stays literal
            # and is merged with the surrounding text.
            continue
        if match.start() > pos:
            segments.append(Text(text[pos : match.start()]))
        segments.append(
            Emoticon(
                MultimodalEmoticon(
                    sticker_id=sticker,
                    vibration_id=None if vibration == ABSENT else vibration,
                    animation_id=None if animation == ABSENT else animation,
                )
            )
        )
        pos = match.end()
    if pos < len(text):
        segments.append(Text(text[pos:]))
    return MessageBody(tuple(segments))


def body_to_wire(body: MessageBody) -> str:
    """Inverse of decode_body: text verbatim, emoticons re-tokenized."""
    parts = []
    for seg in body.segments:
        if isinstance(seg, Text):
            parts.append(seg.value)
        else:
            parts.append(_format_token(seg.emoticon))
    return "".join(parts)


def text_body(text: str) -> MessageBody:
    """Wrap plain text as a message body (no token parsing)."""
    return MessageBody((Text(text),) if text else ())


def emoticon_body(e: MultimodalEmoticon, text: str = "") -> MessageBody:
    """A body holding one emoticon, optionally preceded by text."""
    segments: list[Segment] = []
    if text:
        segments.append(Text(text))
    segments.append(Emoticon(e))
    return MessageBody(tuple(segments))
