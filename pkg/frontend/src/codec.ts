// Inline emoticon tokens: [[VE1:sticker:vibration:animation]] with "-" for
// an absent optional part. Decoding is total: anything that does not parse
// as a complete token stays literal text, so round-tripping never loses
// bytes. Mirrors the relay's published body grammar (see repository README).

export const TOKEN_VERSION = "VE1";
export const ABSENT = "-";

// A field may not contain ":", "[", "]", or line breaks; since "[" is
// excluded, no token can begin inside another token's span.
const TOKEN_AT_START = /^\[\[VE1:([^[\]:\n\r]+):([^[\]:\n\r]+):([^[\]:\n\r]+)\]\]/;

const RESERVED_ID_CHARS = /[[\]:\n\r]/;
// The relay only accepts printable ids: Unicode "Other" (C*) and
// "Separator" (Z*) categories are rejected, except the plain space.
const UNPRINTABLE = /[\p{C}\p{Z}]/u;

export interface EmoticonToken {
  kind: "emoticon";
  sticker: string;
  vibration: string | null;
  animation: string | null;
}

export interface TextSegment {
  kind: "text";
  text: string;
}

export type Segment = TextSegment | EmoticonToken;

export function validateElementId(id: string): void {
  if (!id || id === ABSENT || RESERVED_ID_CHARS.test(id)) {
    throw new Error(`invalid element id: ${JSON.stringify(id)}`);
  }
  for (const ch of id) {
    if (ch !== " " && UNPRINTABLE.test(ch)) {
      throw new Error(`invalid element id: ${JSON.stringify(id)}`);
    }
  }
}

export function encodeEmoticon(
  sticker: string,
  vibration: string | null = null,
  animation: string | null = null,
): string {
  validateElementId(sticker);
  if (vibration !== null) validateElementId(vibration);
  if (animation !== null) validateElementId(animation);
  return `[[${TOKEN_VERSION}:${sticker}:${vibration ?? ABSENT}:${animation ?? ABSENT}]]`;
}

export function decodeBody(body: string): Segment[] {
  const segments: Segment[] = [];
  let textStart = 0;
  let pos = 0;
  while (pos < body.length) {
    const open = body.indexOf("[[", pos);
    if (open < 0) break;
    const match = TOKEN_AT_START.exec(body.slice(open));
    if (!match || match[1] === ABSENT) {
      // Not a token here; the next candidate may begin one char later
      // (e.g. "[[[VE1:..." hides a token behind a literal bracket).
      pos = open + 1;
      continue;
    }
    if (open > textStart) {
      segments.push({ kind: "text", text: body.slice(textStart, open) });
    }
    segments.push({
      kind: "emoticon",
      sticker: match[1],
      vibration: match[2] === ABSENT ? null : match[2],
      animation: match[3] === ABSENT ? null : match[3],
    });
    textStart = open + match[0].length;
    pos = textStart;
  }
  if (textStart < body.length) {
    segments.push({ kind: "text", text: body.slice(textStart) });
  }
  return segments;
}

export function segmentToWire(segment: Segment): string {
  if (segment.kind === "text") return segment.text;
  return encodeEmoticon(segment.sticker, segment.vibration, segment.animation);
}

export function bodyToWire(segments: Segment[]): string {
  return segments.map(segmentToWire).join("");
}

export function hasEmoticon(segments: Segment[]): boolean {
  return segments.some((s) => s.kind === "emoticon");
}
