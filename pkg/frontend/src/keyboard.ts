// The three-segment authoring keyboard: one segment per element type, every
// catalog element always visible, display order driven by server
// recommendations while the user composes.

import { MODALITIES, type Modality } from "./catalog.js";
import { encodeEmoticon } from "./codec.js";

/** Resolves to the recommended id order for the target segment. */
export type RecommendFn = (
  target: Modality,
  selected: [Modality, string][],
) => Promise<string[]>;

export interface KeyboardHooks {
  /** A segment's display order changed (recommendation applied or reset). */
  onReorder?(modality: Modality, order: string[]): void;
  /** Selection or pending state changed. */
  onChange?(): void;
}

function isPermutationOf(candidate: string[], reference: string[]): boolean {
  if (candidate.length !== reference.length) return false;
  const seen = new Set(candidate);
  if (seen.size !== candidate.length) return false;
  return reference.every((id) => seen.has(id));
}

function withTimeout<T>(promise: Promise<T>, ms: number): Promise<T> {
  return new Promise((resolve, reject) => {
    const timer = setTimeout(() => reject(new Error("recommendation timed out")), ms);
    promise.then(
      (value) => {
        clearTimeout(timer);
        resolve(value);
      },
      (err) => {
        clearTimeout(timer);
        reject(err);
      },
    );
  });
}

export class Keyboard {
  readonly defaultOrder: Record<Modality, string[]>;
  displayOrder: Record<Modality, string[]>;
  private chosen = new Map<Modality, string>();
  private generation = 0;
  private inflight = 0;
  private readonly recommendFn: RecommendFn;
  private readonly hooks: KeyboardHooks;
  private readonly timeoutMs: number;

  constructor(
    catalogOrder: Record<Modality, string[]>,
    recommendFn: RecommendFn,
    hooks: KeyboardHooks = {},
    timeoutMs = 3000,
  ) {
    this.defaultOrder = {
      sticker: [...catalogOrder.sticker],
      vibration: [...catalogOrder.vibration],
      animation: [...catalogOrder.animation],
    };
    this.displayOrder = {
      sticker: [...catalogOrder.sticker],
      vibration: [...catalogOrder.vibration],
      animation: [...catalogOrder.animation],
    };
    this.recommendFn = recommendFn;
    this.hooks = hooks;
    this.timeoutMs = timeoutMs;
  }

  selected(modality: Modality): string | null {
    return this.chosen.get(modality) ?? null;
  }

  selectionPairs(): [Modality, string][] {
    return MODALITIES.filter((m) => this.chosen.has(m)).map((m) => [
      m,
      this.chosen.get(m) as string,
    ]);
  }

  get selectionCount(): number {
    return this.chosen.size;
  }

  get pendingRecommendation(): boolean {
    return this.inflight > 0;
  }

  /**
   * Select an element, or deselect it when pressed a second time. Resolves
   * once every resulting reorder request has been applied or given up on;
   * orders are kept as-is on timeouts and network errors.
   */
  async toggleSelect(modality: Modality, id: string): Promise<void> {
    if (!this.defaultOrder[modality].includes(id)) {
      throw new Error(`unknown ${modality} id: ${id}`);
    }
    if (this.chosen.get(modality) === id) {
      this.chosen.delete(modality);
    } else {
      this.chosen.set(modality, id);
    }
    const generation = ++this.generation;
    this.hooks.onChange?.();
    if (this.chosen.size === 0) {
      for (const m of MODALITIES) {
        this.displayOrder[m] = [...this.defaultOrder[m]];
        this.hooks.onReorder?.(m, this.displayOrder[m]);
      }
      return;
    }
    const pairs = this.selectionPairs();
    const targets = MODALITIES.filter((m) => !this.chosen.has(m));
    await Promise.all(targets.map((t) => this.requestOrder(generation, t, pairs)));
  }

  /** Drop the whole selection and restore catalog order (after a send). */
  clearSelection(): void {
    this.chosen.clear();
    this.generation++;
    for (const m of MODALITIES) {
      this.displayOrder[m] = [...this.defaultOrder[m]];
      this.hooks.onReorder?.(m, this.displayOrder[m]);
    }
    this.hooks.onChange?.();
  }

  /** The wire token for the current selection, or null without a sticker. */
  emoticonToken(): string | null {
    const sticker = this.chosen.get("sticker");
    if (!sticker) return null;
    return encodeEmoticon(
      sticker,
      this.chosen.get("vibration") ?? null,
      this.chosen.get("animation") ?? null,
    );
  }

  private async requestOrder(
    generation: number,
    target: Modality,
    pairs: [Modality, string][],
  ): Promise<void> {
    this.inflight++;
    try {
      const order = await withTimeout(this.recommendFn(target, pairs), this.timeoutMs);
      if (generation !== this.generation) return;
      if (!isPermutationOf(order, this.defaultOrder[target])) return;
      this.displayOrder[target] = [...order];
      this.hooks.onReorder?.(target, this.displayOrder[target]);
    } catch {
      // Timeout or network failure: the current order stands.
    } finally {
      this.inflight--;
      this.hooks.onChange?.();
    }
  }
}
