/** Pour the canvas views into a recommended template's slots.
 *
 * Slots are the template's level-1 boxes, visited largest first. A slot
 * takes an exact-type view when one remains (closest by position-grid
 * distance), then leftover views fill leftover slots by minimal distance;
 * slots still empty keep the template's own type as a placeholder. The
 * output geometry is exactly the template geometry.
 */

import { area, enclosingRect, gridDistance, normalizeInto, positionGrid } from "./geometry";
import type { CanvasView, NodeDoc, Rect, ViewTypeName } from "./types";

interface Slot {
  rect: Rect;
  type: ViewTypeName;
}

function slotsOf(nodes: readonly NodeDoc[]): Slot[] {
  return nodes.map((n) => ({
    rect: { ...n.bbox },
    type: n.kind === "small_multiples" ? n.children![0]!.type! : n.type!,
  }));
}

export function applyTemplate(
  nodes: readonly NodeDoc[],
  views: readonly CanvasView[],
): CanvasView[] {
  const slots = slotsOf(nodes);
  if (slots.length < views.length) {
    throw new Error(
      `template has ${slots.length} slots for ${views.length} views`,
    );
  }
  const frame = enclosingRect(views.map((v) => v.rect));
  const viewGrids = views.map((v) => positionGrid(normalizeInto(v.rect, frame)));
  const slotGrids = slots.map((s) => positionGrid(s.rect));

  const order = slots
    .map((s, i) => i)
    .sort((a, b) => area(slots[b]!.rect) - area(slots[a]!.rect) || a - b);
  const assigned = new Map<number, number>(); // slot index -> view index
  const taken = new Set<number>();

  const closest = (slotIdx: number, candidates: number[]): number | undefined => {
    let best: [number, number] | undefined;
    for (const vi of candidates) {
      const d = gridDistance(slotGrids[slotIdx]!, viewGrids[vi]!);
      if (!best || d < best[0] || (d === best[0] && vi < best[1])) {
        best = [d, vi];
      }
    }
    return best?.[1];
  };

  for (const si of order) {
    const sameType = views
      .map((v, vi) => vi)
      .filter((vi) => !taken.has(vi) && views[vi]!.type === slots[si]!.type);
    const vi = closest(si, sameType);
    if (vi !== undefined) {
      assigned.set(si, vi);
      taken.add(vi);
    }
  }
  for (const si of order) {
    if (assigned.has(si)) continue;
    const rest = views.map((v, vi) => vi).filter((vi) => !taken.has(vi));
    const vi = closest(si, rest);
    if (vi === undefined) break;
    assigned.set(si, vi);
    taken.add(vi);
  }

  return slots.map((slot, si) => {
    const vi = assigned.get(si);
    return {
      id: si + 1,
      type: vi !== undefined ? views[vi]!.type : slot.type,
      rect: { ...slot.rect },
      selected: false,
    };
  });
}
