// Rendering primitives for the three element types: keyframe tables for the
// animation behaviors, vibration playback via the browser vibration API with
// a synchronized visual flash, and waveform thumbnails (bar height is
// intensity, bar darkness is sharpness).

import type { AnimationAsset, VibrationAsset } from "./catalog.js";

export interface BehaviorSpec {
  keyframes(amplitude: number): Keyframe[];
  easing: string;
}

function px(n: number): string {
  return `${Math.round(n * 10) / 10}px`;
}

export const BEHAVIOR_SPECS: Record<string, BehaviorSpec> = {
  bounce: {
    easing: "ease-in-out",
    keyframes: (a) => [
      { transform: "translateY(0)" },
      { transform: `translateY(-${px(22 * a)})` },
      { transform: "translateY(0)" },
    ],
  },
  spin: {
    easing: "linear",
    keyframes: () => [
      { transform: "rotate(0deg)" },
      { transform: "rotate(360deg)" },
    ],
  },
  shake: {
    easing: "ease-in-out",
    keyframes: (a) => [
      { transform: "translateX(0)" },
      { transform: `translateX(-${px(9 * a)})` },
      { transform: `translateX(${px(9 * a)})` },
      { transform: `translateX(-${px(6 * a)})` },
      { transform: `translateX(${px(6 * a)})` },
      { transform: "translateX(0)" },
    ],
  },
  pulse: {
    easing: "ease-in-out",
    keyframes: (a) => [
      { transform: "scale(1)" },
      { transform: `scale(${1 + 0.35 * a})` },
      { transform: "scale(1)" },
    ],
  },
  wobble: {
    easing: "ease-in-out",
    keyframes: (a) => [
      { transform: "rotate(0deg)" },
      { transform: `rotate(-${12 * a}deg)` },
      { transform: `rotate(${12 * a}deg)` },
      { transform: `rotate(-${7 * a}deg)` },
      { transform: "rotate(0deg)" },
    ],
  },
  jump: {
    easing: "cubic-bezier(0.3, 0, 0.4, 1)",
    keyframes: (a) => [
      { transform: "translateY(0) scale(1)" },
      { transform: `translateY(0) scale(${1 + 0.08 * a}, ${1 - 0.12 * a})`, offset: 0.15 },
      { transform: `translateY(-${px(26 * a)}) scale(1)`, offset: 0.55 },
      { transform: "translateY(0) scale(1)" },
    ],
  },
  swing: {
    easing: "ease-in-out",
    keyframes: (a) => [
      { transform: "rotate(0deg)" },
      { transform: `rotate(${15 * a}deg)` },
      { transform: `rotate(-${15 * a}deg)` },
      { transform: "rotate(0deg)" },
    ],
  },
  tilt: {
    easing: "ease-in-out",
    keyframes: (a) => [
      { transform: "rotate(0deg)" },
      { transform: `rotate(${10 * a}deg)` },
      { transform: "rotate(0deg)" },
      { transform: `rotate(-${10 * a}deg)` },
      { transform: "rotate(0deg)" },
    ],
  },
  zoom: {
    easing: "ease-in-out",
    keyframes: (a) => [
      { transform: "scale(1)" },
      { transform: `scale(${1 + 0.6 * a})` },
      { transform: "scale(1)" },
    ],
  },
  slide: {
    easing: "ease-in-out",
    keyframes: (a) => [
      { transform: "translateX(0)" },
      { transform: `translateX(${px(18 * a)})` },
      { transform: "translateX(0)" },
    ],
  },
  drift: {
    easing: "ease-in-out",
    keyframes: (a) => [
      { transform: "translate(0, 0)" },
      { transform: `translate(${px(9 * a)}, -${px(7 * a)})` },
      { transform: `translate(-${px(6 * a)}, -${px(10 * a)})` },
      { transform: "translate(0, 0)" },
    ],
  },
  flip: {
    easing: "ease-in-out",
    keyframes: () => [
      { transform: "rotateY(0deg)" },
      { transform: "rotateY(360deg)" },
    ],
  },
  quiver: {
    easing: "linear",
    keyframes: (a) => {
      const d = 1.5 + 3 * a;
      const frames: Keyframe[] = [{ transform: "translate(0, 0)" }];
      for (let i = 0; i < 6; i++) {
        const sign = i % 2 === 0 ? 1 : -1;
        frames.push({ transform: `translate(${px(sign * d)}, ${px(-sign * d * 0.4)})` });
      }
      frames.push({ transform: "translate(0, 0)" });
      return frames;
    },
  },
  breathe: {
    easing: "ease-in-out",
    keyframes: (a) => [
      { transform: "scale(1)", opacity: 1 },
      { transform: `scale(${1 + 0.15 * a})`, opacity: 0.82 },
      { transform: "scale(1)", opacity: 1 },
    ],
  },
  ripple: {
    easing: "ease-out",
    keyframes: (a) => [
      { transform: "scale(1)", opacity: 1 },
      { transform: `scale(${1 + 0.25 * a})`, opacity: 0.6 },
      { transform: `scale(${1 + 0.1 * a})`, opacity: 0.9 },
      { transform: "scale(1)", opacity: 1 },
    ],
  },
};

export interface AnimationHandle {
  cancel(): void;
}

const NOOP_HANDLE: AnimationHandle = { cancel() {} };

/**
 * Start the element's behavior animation. Looping previews run until
 * cancelled; one-shot playback (replay, vibration sync) runs a single
 * period. Returns a no-op handle where the animation API is unavailable.
 */
export function playAnimation(
  el: Element,
  asset: AnimationAsset,
  loop = true,
): AnimationHandle {
  const spec = BEHAVIOR_SPECS[asset.behavior];
  const animate = (el as HTMLElement).animate;
  if (!spec || typeof animate !== "function") return NOOP_HANDLE;
  const animation = (el as HTMLElement).animate(spec.keyframes(asset.amplitude), {
    duration: asset.period_ms,
    iterations: loop ? Infinity : 1,
    easing: spec.easing,
  });
  return { cancel: () => animation.cancel() };
}

/** Total footprint of a vibration in milliseconds. */
export function vibrationSpanMs(asset: VibrationAsset): number {
  let span = 0;
  for (const ev of asset.events) {
    span = Math.max(span, ev.offset_ms + ev.duration_ms);
  }
  return span;
}

/**
 * Translate a vibration into the browser API's on/off millisecond pattern.
 * The API has no amplitude control, so intensity becomes duty cycle (how
 * much of the event actually buzzes) and sharpness becomes micro-gaps (a
 * sharp event is chopped into more, crisper pulses). The pattern's total
 * length always equals the event footprint.
 */
export function vibratePattern(asset: VibrationAsset): number[] {
  const pattern: number[] = [];
  let cursor = 0;
  const events = [...asset.events].sort((x, y) => x.offset_ms - y.offset_ms);
  for (const ev of events) {
    const lead = ev.offset_ms - cursor;
    if (lead > 0) {
      if (pattern.length === 0) {
        pattern.push(0, lead);
      } else {
        pattern[pattern.length - 1] += lead;
      }
    }
    const pulses = 1 + Math.round(ev.sharpness * 4);
    const onBudget = ev.duration_ms * (0.35 + 0.65 * ev.intensity);
    const onSlice = onBudget / pulses;
    const offSlice = (ev.duration_ms - onBudget) / pulses;
    for (let i = 0; i < pulses; i++) {
      pattern.push(onSlice, offSlice);
    }
    cursor = Math.max(cursor, ev.offset_ms + ev.duration_ms);
  }
  const rounded = pattern.map((ms) => Math.max(0, Math.round(ms)));
  while (rounded.length > 0 && rounded[rounded.length - 1] === 0) rounded.pop();
  return rounded;
}

export interface VibratorLike {
  vibrate(pattern: number[]): boolean;
}

/** Run the vibration where supported; returns the pattern either way. */
export function playVibration(asset: VibrationAsset, vibrator?: VibratorLike): number[] {
  const pattern = vibratePattern(asset);
  const nav = vibrator ?? (globalThis.navigator as unknown as VibratorLike | undefined);
  if (nav && typeof nav.vibrate === "function" && pattern.length > 0) {
    nav.vibrate(pattern);
  }
  return pattern;
}

export interface WaveformBar {
  x: number;
  width: number;
  height: number;
  darkness: number;
}

export function waveformBars(
  asset: VibrationAsset,
  width: number,
  height: number,
): WaveformBar[] {
  const span = Math.max(1, vibrationSpanMs(asset));
  return asset.events.map((ev) => ({
    x: (ev.offset_ms / span) * width,
    width: Math.max(1, (ev.duration_ms / span) * width),
    height: Math.max(1, ev.intensity * height),
    darkness: 0.25 + 0.75 * ev.sharpness,
  }));
}

/** Thumbnail markup: one bar per vibration event. */
export function waveformSvg(asset: VibrationAsset, width = 64, height = 24): string {
  const bars = waveformBars(asset, width, height)
    .map(
      (b) =>
        `<rect x="${b.x.toFixed(1)}" y="${(height - b.height).toFixed(1)}" ` +
        `width="${b.width.toFixed(1)}" height="${b.height.toFixed(1)}" ` +
        `fill="currentColor" fill-opacity="${b.darkness.toFixed(2)}"/>`,
    )
    .join("");
  return (
    `<svg viewBox="0 0 ${width} ${height}" width="${width}" height="${height}" ` +
    `xmlns="http://www.w3.org/2000/svg" aria-hidden="true">${bars}</svg>`
  );
}

/**
 * Flash an element in sync with a vibration: visible at each event start,
 * faded at each event end, flash strength following intensity. This is the
 * always-available visual stand-in for devices without a vibration motor.
 */
export function flashWaveform(el: HTMLElement, asset: VibrationAsset): void {
  for (const ev of asset.events) {
    setTimeout(() => {
      el.style.opacity = String(0.35 + 0.65 * ev.intensity);
      el.classList.add("vibrating");
    }, ev.offset_ms);
    setTimeout(() => {
      el.style.opacity = "1";
      el.classList.remove("vibrating");
    }, ev.offset_ms + ev.duration_ms);
  }
}
