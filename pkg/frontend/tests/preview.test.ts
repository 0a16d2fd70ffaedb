import { describe, expect, it } from "vitest";

import type { VibrationAsset } from "../src/catalog.js";
import {
  BEHAVIOR_SPECS,
  playAnimation,
  playVibration,
  vibratePattern,
  vibrationSpanMs,
  waveformBars,
  waveformSvg,
} from "../src/preview.js";

const KNOWN_BEHAVIORS = [
  "bounce", "spin", "shake", "pulse", "wobble", "jump", "swing", "tilt",
  "zoom", "slide", "drift", "flip", "quiver", "breathe", "ripple",
];

function vib(events: [number, number, number, number][]): VibrationAsset {
  return {
    events: events.map(([offset_ms, duration_ms, intensity, sharpness]) => ({
      offset_ms,
      duration_ms,
      intensity,
      sharpness,
    })),
  };
}

describe("behavior table", () => {
  it("covers every behavior the catalog can name", () => {
    expect(Object.keys(BEHAVIOR_SPECS).sort()).toEqual([...KNOWN_BEHAVIORS].sort());
  });

  it("produces at least two keyframes at any amplitude", () => {
    for (const name of KNOWN_BEHAVIORS) {
      for (const amplitude of [0.05, 0.5, 1.0]) {
        const frames = BEHAVIOR_SPECS[name].keyframes(amplitude);
        expect(frames.length).toBeGreaterThanOrEqual(2);
      }
    }
  });

  it("playAnimation degrades to a no-op without the animation API", () => {
    const fake = {} as Element;
    const handle = playAnimation(fake, { behavior: "bounce", period_ms: 500, amplitude: 0.5 });
    expect(() => handle.cancel()).not.toThrow();
  });
});

describe("vibratePattern", () => {
  it("is empty for an empty pattern", () => {
    expect(vibratePattern(vib([]))).toEqual([]);
  });

  it("keeps the total footprint of the events", () => {
    const asset = vib([
      [0, 100, 0.8, 0.3],
      [250, 120, 0.5, 0.9],
    ]);
    const pattern = vibratePattern(asset);
    const total = pattern.reduce((a, b) => a + b, 0);
    expect(Math.abs(total - vibrationSpanMs(asset))).toBeLessThanOrEqual(pattern.length);
  });

  it("chops sharper events into more pulses", () => {
    const smooth = vibratePattern(vib([[0, 200, 0.6, 0.0]]));
    const sharp = vibratePattern(vib([[0, 200, 0.6, 1.0]]));
    expect(sharp.length).toBeGreaterThan(smooth.length);
  });

  it("buzzes longer for more intense events", () => {
    const onTime = (p: number[]) => p.filter((_, i) => i % 2 === 0).reduce((a, b) => a + b, 0);
    const faint = vibratePattern(vib([[0, 200, 0.1, 0.5]]));
    const strong = vibratePattern(vib([[0, 200, 0.9, 0.5]]));
    expect(onTime(strong)).toBeGreaterThan(onTime(faint));
  });

  it("playVibration forwards the pattern to the vibrator", () => {
    const seen: number[][] = [];
    const pattern = playVibration(vib([[0, 80, 0.5, 0.5]]), {
      vibrate(p) {
        seen.push(p);
        return true;
      },
    });
    expect(seen).toEqual([pattern]);
  });
});

describe("waveform thumbnails", () => {
  const asset = vib([
    [0, 100, 0.2, 0.1],
    [150, 100, 0.9, 0.9],
  ]);

  it("draws one bar per event", () => {
    expect(waveformBars(asset, 64, 24)).toHaveLength(2);
    const svg = waveformSvg(asset);
    expect(svg.match(/<rect /g)).toHaveLength(2);
  });

  it("maps intensity to height and sharpness to darkness", () => {
    const [weak, strong] = waveformBars(asset, 64, 24);
    expect(strong.height).toBeGreaterThan(weak.height);
    expect(strong.darkness).toBeGreaterThan(weak.darkness);
  });
});
