/** Rectangle helpers used for alignment and template application.
 *
 * Everything here is presentation-side geometry; similarity scores always
 * come from the service.
 */

import type { Rect } from "./types";

export function left(r: Rect): number {
  return r.x - r.w / 2;
}

export function right(r: Rect): number {
  return r.x + r.w / 2;
}

export function top(r: Rect): number {
  return r.y - r.h / 2;
}

export function bottom(r: Rect): number {
  return r.y + r.h / 2;
}

export function area(r: Rect): number {
  return r.w * r.h;
}

export function enclosingRect(rects: readonly Rect[]): Rect {
  if (rects.length === 0) throw new Error("enclosingRect of nothing");
  let x0 = Infinity;
  let y0 = Infinity;
  let x1 = -Infinity;
  let y1 = -Infinity;
  for (const r of rects) {
    x0 = Math.min(x0, left(r));
    y0 = Math.min(y0, top(r));
    x1 = Math.max(x1, right(r));
    y1 = Math.max(y1, bottom(r));
  }
  return { x: (x0 + x1) / 2, y: (y0 + y1) / 2, w: x1 - x0, h: y1 - y0 };
}

/** Normalize a rect against an enclosing frame onto the unit square. */
export function normalizeInto(r: Rect, frame: Rect): Rect {
  return {
    x: (r.x - left(frame)) / frame.w,
    y: (r.y - top(frame)) / frame.h,
    w: r.w / frame.w,
    h: r.h / frame.h,
  };
}

function overlap1d(a0: number, a1: number, b0: number, b1: number): number {
  return Math.max(0, Math.min(a1, b1) - Math.max(a0, b0));
}

/** Overlap area with each cell of the 3x3 unit-square partition. */
export function positionGrid(r: Rect): number[] {
  const grid: number[] = [];
  for (let row = 0; row < 3; row++) {
    const hy = overlap1d(top(r), bottom(r), row / 3, (row + 1) / 3);
    for (let col = 0; col < 3; col++) {
      const hx = overlap1d(left(r), right(r), col / 3, (col + 1) / 3);
      grid.push(hx * hy);
    }
  }
  return grid;
}

/** Half the L1 distance between two position grids. */
export function gridDistance(a: readonly number[], b: readonly number[]): number {
  let total = 0;
  for (let i = 0; i < 9; i++) total += Math.abs((a[i] ?? 0) - (b[i] ?? 0));
  return total / 2;
}
