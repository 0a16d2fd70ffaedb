// Catalog document as served by GET /catalog, plus lookup helpers.

export type Modality = "sticker" | "vibration" | "animation";

export const MODALITIES: readonly Modality[] = ["sticker", "vibration", "animation"];

export interface StickerAsset {
  codepoints: number[];
}

export interface AnimationAsset {
  behavior: string;
  period_ms: number;
  amplitude: number;
}

export interface VibrationEvent {
  offset_ms: number;
  duration_ms: number;
  intensity: number;
  sharpness: number;
}

export interface VibrationAsset {
  events: VibrationEvent[];
}

export interface CatalogElement<A> {
  id: string;
  label: string;
  valence: number;
  arousal: number;
  asset: A;
}

export interface CatalogDocument {
  version: number;
  behaviors: string[];
  stickers: CatalogElement<StickerAsset>[];
  animations: CatalogElement<AnimationAsset>[];
  vibrations: CatalogElement<VibrationAsset>[];
}

export class Catalog {
  readonly doc: CatalogDocument;
  private byId: Record<Modality, Map<string, CatalogElement<unknown>>>;

  constructor(doc: CatalogDocument) {
    this.doc = doc;
    this.byId = {
      sticker: new Map(doc.stickers.map((e) => [e.id, e])),
      vibration: new Map(doc.vibrations.map((e) => [e.id, e])),
      animation: new Map(doc.animations.map((e) => [e.id, e])),
    };
  }

  /** Element ids in document order; the keyboard's default display order. */
  order(modality: Modality): string[] {
    return this.list(modality).map((e) => e.id);
  }

  list(modality: Modality): CatalogElement<unknown>[] {
    if (modality === "sticker") return this.doc.stickers;
    if (modality === "vibration") return this.doc.vibrations;
    return this.doc.animations;
  }

  has(modality: Modality, id: string): boolean {
    return this.byId[modality].has(id);
  }

  sticker(id: string): CatalogElement<StickerAsset> | undefined {
    return this.byId.sticker.get(id) as CatalogElement<StickerAsset> | undefined;
  }

  animation(id: string): CatalogElement<AnimationAsset> | undefined {
    return this.byId.animation.get(id) as CatalogElement<AnimationAsset> | undefined;
  }

  vibration(id: string): CatalogElement<VibrationAsset> | undefined {
    return this.byId.vibration.get(id) as CatalogElement<VibrationAsset> | undefined;
  }

  /** The renderable character sequence for a sticker. */
  glyph(stickerId: string): string {
    const el = this.sticker(stickerId);
    if (!el) return "?";
    return String.fromCodePoint(...el.asset.codepoints);
  }
}

export async function fetchCatalog(httpBase: string): Promise<Catalog> {
  const resp = await fetch(`${httpBase}/catalog`);
  if (!resp.ok) {
    throw new Error(`catalog fetch failed: ${resp.status}`);
  }
  return new Catalog((await resp.json()) as CatalogDocument);
}
