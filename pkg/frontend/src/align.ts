/** Multi-select alignment; mirrors the service-side semantics exactly:
 * edges move to the selection-wide extremum, centers to the mean, sizes
 * never change.
 */

import { bottom, left, right, top } from "./geometry";
import type { Rect } from "./types";

export type AlignMode =
  | "left"
  | "right"
  | "top"
  | "bottom"
  | "center-h"
  | "center-v";

export function alignRects(rects: readonly Rect[], mode: AlignMode): Rect[] {
  if (rects.length < 2) {
    throw new Error("alignment needs at least two views");
  }
  switch (mode) {
    case "left": {
      const edge = Math.min(...rects.map(left));
      return rects.map((r) => ({ ...r, x: edge + r.w / 2 }));
    }
    case "right": {
      const edge = Math.max(...rects.map(right));
      return rects.map((r) => ({ ...r, x: edge - r.w / 2 }));
    }
    case "top": {
      const edge = Math.min(...rects.map(top));
      return rects.map((r) => ({ ...r, y: edge + r.h / 2 }));
    }
    case "bottom": {
      const edge = Math.max(...rects.map(bottom));
      return rects.map((r) => ({ ...r, y: edge - r.h / 2 }));
    }
    case "center-h": {
      const c = rects.reduce((acc, r) => acc + r.x, 0) / rects.length;
      return rects.map((r) => ({ ...r, x: c }));
    }
    case "center-v": {
      const c = rects.reduce((acc, r) => acc + r.y, 0) / rects.length;
      return rects.map((r) => ({ ...r, y: c }));
    }
  }
}
