// Browser entry point: wires the catalog, protocol client, keyboard, and
// chat view together. Configuration comes from URL parameters:
//   ?user=alice&token=secret-a&server=127.0.0.1:9400
// `server` defaults to the host the page was loaded from.

import { Catalog, fetchCatalog, MODALITIES, type Modality } from "./catalog.js";
import { ChatViewModel, type ChatMessage } from "./chat.js";
import type { EmoticonToken } from "./codec.js";
import { Keyboard } from "./keyboard.js";
import {
  flashWaveform,
  playAnimation,
  playVibration,
  waveformSvg,
  type AnimationHandle,
} from "./preview.js";
import { ProtocolClient, type Frame, type PendingOp } from "./protocol.js";

const NEUTRAL_GLYPH = "\u{1F642}";
const REORDER_MS = 200;
const MODALITY_LABELS: Record<Modality, string> = {
  sticker: "Stickers",
  vibration: "Vibrations",
  animation: "Animations",
};

const params = new URLSearchParams(location.search);
const userId = params.get("user") ?? "";
const token = params.get("token") ?? "";
const server = params.get("server") ?? location.host;
const httpBase = `${location.protocol}//${server}`;
const wsUrl = `${location.protocol === "https:" ? "wss" : "ws"}://${server}/ws`;

const app = document.getElementById("app") as HTMLElement;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = "",
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

if (!userId || !token) {
  app.appendChild(
    el("p", "status", "missing ?user= and ?token= URL parameters"),
  );
  throw new Error("missing credentials");
}

// ---- static layout ---------------------------------------------------------

const statusLine = el("div", "status", "connecting…");
const messagesPane = el("div", "messages");
const composeRow = el("div", "compose");
const textInput = el("input") as HTMLInputElement;
textInput.placeholder = "message";
const keyboardToggle = el("button", "", "\u{1F600}");
keyboardToggle.title = "emoticon keyboard";
const sendButton = el("button", "send", "Send");
composeRow.append(keyboardToggle, textInput, sendButton);
const keyboardPane = el("div", "keyboard hidden");
app.append(statusLine, messagesPane, composeRow, keyboardPane);

// ---- interaction trail ------------------------------------------------------

let trail: [number, string, string][] = [];
function record(kind: string, payload: string): void {
  trail.push([Date.now(), kind, payload]);
  if (trail.length > 200) trail = trail.slice(-200);
}

// ---- protocol ---------------------------------------------------------------

const messageEls = new WeakMap<ChatMessage, HTMLElement>();
const opEls = new WeakMap<PendingOp, HTMLElement>();

const vm = new ChatViewModel(userId, {
  onAppend: renderMessage,
  onReplay: replayEffects,
});

const client = new ProtocolClient(userId, token, {
  onSession(lastSeq) {
    statusLine.textContent = `connected as ${userId} (last seq ${lastSeq})`;
  },
  onDelivery(delivery) {
    vm.applyDelivery(delivery);
  },
  onAck(op) {
    const bubble = opEls.get(op);
    if (bubble) bubble.classList.add("acked");
  },
  onError(code, detail) {
    statusLine.textContent = `server rejected an operation: ${code} (${detail})`;
  },
  onDetach() {
    statusLine.textContent = "reconnecting…";
  },
});

let retryMs = 500;
function connect(): void {
  const ws = new WebSocket(wsUrl);
  ws.onopen = () => {
    retryMs = 500;
    client.attach({
      send: (frame: Frame) => ws.send(JSON.stringify(frame)),
      close: () => ws.close(),
    });
  };
  ws.onmessage = (ev) => client.handleFrame(JSON.parse(ev.data as string) as Frame);
  ws.onclose = () => {
    client.detach();
    retryMs = Math.min(retryMs * 2, 10_000);
    setTimeout(connect, retryMs);
  };
}

// ---- keyboard ---------------------------------------------------------------

interface Tile {
  button: HTMLButtonElement;
  glyph: HTMLElement;
  loop: AnimationHandle | null;
}

const tiles: Record<Modality, Map<string, Tile>> = {
  sticker: new Map(),
  vibration: new Map(),
  animation: new Map(),
};
const strips = {} as Record<Modality, HTMLElement>;

let catalog: Catalog;
let keyboard: Keyboard;

function buildKeyboard(): void {
  for (const modality of MODALITIES) {
    const segment = el("div", "segment");
    segment.appendChild(el("div", "segment-label", MODALITY_LABELS[modality]));
    const strip = el("div", "strip");
    strips[modality] = strip;
    segment.appendChild(strip);
    keyboardPane.appendChild(segment);
    for (const id of catalog.order(modality)) {
      const tile = buildTile(modality, id);
      tiles[modality].set(id, tile);
      strip.appendChild(tile.button);
    }
  }
}

function buildTile(modality: Modality, id: string): Tile {
  const button = el("button", "tile") as HTMLButtonElement;
  const element = catalog.list(modality).find((e) => e.id === id)!;
  button.title = element.label;
  let glyph: HTMLElement;
  if (modality === "sticker") {
    glyph = el("span", "glyph", catalog.glyph(id));
  } else if (modality === "animation") {
    glyph = el("span", "glyph", previewGlyph());
  } else {
    glyph = el("span", "waveform");
    glyph.innerHTML = waveformSvg(catalog.vibration(id)!.asset);
  }
  button.appendChild(glyph);
  button.onclick = () => {
    const wasSelected = keyboard.selected(modality) === id;
    record(wasSelected ? "deselect" : "select", id);
    void keyboard.toggleSelect(modality, id).then(refreshSelection);
    refreshSelection();
    if (!wasSelected && modality === "vibration") onVibrationSelected(id);
  };
  const tile: Tile = { button, glyph, loop: null };
  if (modality === "animation") {
    tile.loop = playAnimation(glyph, catalog.animation(id)!.asset, true);
  }
  return tile;
}

function previewGlyph(): string {
  const sticker = keyboard?.selected("sticker");
  return sticker ? catalog.glyph(sticker) : NEUTRAL_GLYPH;
}

function refreshSelection(): void {
  for (const modality of MODALITIES) {
    const selectedId = keyboard.selected(modality);
    for (const [id, tile] of tiles[modality]) {
      tile.button.classList.toggle("selected", id === selectedId);
    }
  }
  const glyph = previewGlyph();
  for (const [id, tile] of tiles.animation) {
    if (tile.glyph.textContent !== glyph) {
      tile.glyph.textContent = glyph;
      tile.loop?.cancel();
      tile.loop = playAnimation(tile.glyph, catalog.animation(id)!.asset, true);
    }
  }
}

/** Move tiles to a new order, animating each from its old position. */
function reorderStrip(modality: Modality, order: string[]): void {
  const strip = strips[modality];
  if (!strip) return;
  const before = new Map<string, DOMRect>();
  for (const [id, tile] of tiles[modality]) {
    before.set(id, tile.button.getBoundingClientRect());
  }
  for (const id of order) {
    const tile = tiles[modality].get(id);
    if (tile) strip.appendChild(tile.button);
  }
  for (const [id, tile] of tiles[modality]) {
    const prev = before.get(id);
    if (!prev || typeof tile.button.animate !== "function") continue;
    const now = tile.button.getBoundingClientRect();
    const dx = prev.left - now.left;
    const dy = prev.top - now.top;
    if (dx === 0 && dy === 0) continue;
    tile.button.animate(
      [{ transform: `translate(${dx}px, ${dy}px)` }, { transform: "translate(0, 0)" }],
      { duration: REORDER_MS, easing: "ease-out" },
    );
  }
}

function onVibrationSelected(id: string): void {
  const vib = catalog.vibration(id)!.asset;
  playVibration(vib);
  const tile = tiles.vibration.get(id);
  if (tile) flashWaveform(tile.button, vib);
  const animId = keyboard.selected("animation");
  if (animId) {
    // Restart the loop so its cycle starts together with the vibration.
    const animTile = tiles.animation.get(animId);
    if (animTile) {
      animTile.loop?.cancel();
      animTile.loop = playAnimation(animTile.glyph, catalog.animation(animId)!.asset, true);
    }
  }
}

// ---- chat rendering ---------------------------------------------------------

function renderMessage(message: ChatMessage): void {
  const bubble = el("div", message.mine ? "bubble mine" : "bubble");
  for (const segment of message.segments) {
    if (segment.kind === "text") {
      bubble.appendChild(el("span", "text", segment.text));
    } else {
      bubble.appendChild(renderEmoticon(message, segment));
    }
  }
  if (message.mine && message.op) opEls.set(message.op, bubble);
  messageEls.set(message, bubble);
  messagesPane.appendChild(bubble);
  messagesPane.scrollTop = messagesPane.scrollHeight;
}

function renderEmoticon(message: ChatMessage, segment: EmoticonToken): HTMLElement {
  const wrap = el("span", "emoticon");
  wrap.title = "tap to replay";
  const glyph = el("span", "glyph", catalog.glyph(segment.sticker));
  wrap.appendChild(glyph);
  if (segment.vibration) {
    const wave = el("span", "waveform");
    const vib = catalog.vibration(segment.vibration);
    if (vib) wave.innerHTML = waveformSvg(vib.asset, 40, 14);
    wrap.appendChild(wave);
  }
  if (segment.animation) {
    const anim = catalog.animation(segment.animation);
    if (anim) playAnimation(glyph, anim.asset, true);
  }
  wrap.onclick = () => {
    const ref = vm.refOf(message);
    if (ref && vm.replayable(message)) {
      record("replay", "");
      client.replay(ref);
    }
  };
  return wrap;
}

function replayEffects(message: ChatMessage): void {
  const bubble = messageEls.get(message);
  bubble?.scrollIntoView({ behavior: "smooth", block: "nearest" });
  for (const segment of message.segments) {
    if (segment.kind !== "emoticon") continue;
    if (segment.vibration) {
      const vib = catalog.vibration(segment.vibration);
      if (vib) {
        playVibration(vib.asset);
        if (bubble) flashWaveform(bubble, vib.asset);
      }
    }
    if (segment.animation && bubble) {
      const anim = catalog.animation(segment.animation);
      const glyph = bubble.querySelector(".emoticon .glyph");
      if (anim && glyph) playAnimation(glyph, anim.asset, false);
    }
  }
}

// ---- composing --------------------------------------------------------------

function sendCurrent(): void {
  const token_ = keyboard.emoticonToken();
  const text = textInput.value;
  if (!token_ && text.trim() === "") return;
  const body = token_ ? text + token_ : text;
  const op = client.sendBody(body, trail, Date.now());
  trail = [];
  vm.appendOwn(op);
  keyboard.clearSelection();
  refreshSelection();
  textInput.value = "";
}

keyboardToggle.onclick = () => {
  const opening = keyboardPane.classList.contains("hidden");
  keyboardPane.classList.toggle("hidden");
  if (opening) record("open_keyboard", "");
};
sendButton.onclick = sendCurrent;
textInput.onkeydown = (ev) => {
  if (ev.key === "Enter") sendCurrent();
};

// ---- boot ---------------------------------------------------------------

fetchCatalog(httpBase)
  .then((cat) => {
    catalog = cat;
    keyboard = new Keyboard(
      {
        sticker: cat.order("sticker"),
        vibration: cat.order("vibration"),
        animation: cat.order("animation"),
      },
      (target, selected) =>
        client.recommend(target, selected).then((rec) => rec.order),
      { onReorder: reorderStrip },
    );
    buildKeyboard();
    connect();
  })
  .catch((err) => {
    statusLine.textContent = `failed to load catalog: ${err}`;
  });
