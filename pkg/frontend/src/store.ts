/** Design-canvas state with snapshot-based undo (bounded depth). */

import { alignRects, type AlignMode } from "./align";
import { applyTemplate } from "./applyLayout";
import type { CanvasView, NodeDoc, Rect, ViewTypeName } from "./types";

export const UNDO_DEPTH = 100;

export interface CanvasState {
  views: readonly CanvasView[];
  appliedTemplate: string | null; // doi of the applied recommendation
}

const EMPTY: CanvasState = { views: [], appliedTemplate: null };

function cloneState(state: CanvasState): CanvasState {
  return {
    views: state.views.map((v) => ({ ...v, rect: { ...v.rect } })),
    appliedTemplate: state.appliedTemplate,
  };
}

export class CanvasStore {
  private state: CanvasState = EMPTY;
  private past: CanvasState[] = [];
  private nextId = 1;
  private listeners = new Set<() => void>();

  get current(): CanvasState {
    return this.state;
  }

  get views(): readonly CanvasView[] {
    return this.state.views;
  }

  get selection(): readonly CanvasView[] {
    return this.state.views.filter((v) => v.selected);
  }

  get undoDepth(): number {
    return this.past.length;
  }

  subscribe(fn: () => void): () => void {
    this.listeners.add(fn);
    return () => this.listeners.delete(fn);
  }

  private commit(next: CanvasState): void {
    this.past.push(cloneState(this.state));
    if (this.past.length > UNDO_DEPTH) this.past.shift();
    this.state = next;
    this.listeners.forEach((fn) => fn());
  }

  undo(): boolean {
    const prev = this.past.pop();
    if (!prev) return false;
    this.state = prev;
    this.listeners.forEach((fn) => fn());
    return true;
  }

  addView(type: ViewTypeName, rect: Rect): CanvasView {
    if (rect.w <= 0 || rect.h <= 0) throw new Error("views need positive sizes");
    const view: CanvasView = { id: this.nextId++, type, rect, selected: false };
    this.commit({ ...this.state, views: [...this.state.views, view] });
    return view;
  }

  moveView(id: number, x: number, y: number): void {
    this.updateRect(id, (r) => ({ ...r, x, y }));
  }

  resizeView(id: number, w: number, h: number): void {
    if (w <= 0 || h <= 0) throw new Error("views need positive sizes");
    this.updateRect(id, (r) => ({ ...r, w, h }));
  }

  private updateRect(id: number, fn: (r: Rect) => Rect): void {
    this.commit({
      ...this.state,
      views: this.state.views.map((v) =>
        v.id === id ? { ...v, rect: fn(v.rect) } : v,
      ),
    });
  }

  removeView(id: number): void {
    this.commit({
      ...this.state,
      views: this.state.views.filter((v) => v.id !== id),
    });
  }

  removeAll(): void {
    this.commit({ views: [], appliedTemplate: null });
  }

  select(id: number, additive = false): void {
    this.commit({
      ...this.state,
      views: this.state.views.map((v) => ({
        ...v,
        selected: v.id === id ? true : additive ? v.selected : false,
      })),
    });
  }

  clearSelection(): void {
    this.commit({
      ...this.state,
      views: this.state.views.map((v) => ({ ...v, selected: false })),
    });
  }

  alignSelected(mode: AlignMode): void {
    const selected = this.state.views.filter((v) => v.selected);
    if (selected.length < 2) return;
    const aligned = alignRects(
      selected.map((v) => v.rect),
      mode,
    );
    const byId = new Map(selected.map((v, i) => [v.id, aligned[i]!]));
    this.commit({
      ...this.state,
      views: this.state.views.map((v) =>
        byId.has(v.id) ? { ...v, rect: byId.get(v.id)! } : v,
      ),
    });
  }

  /** Replace canvas geometry with a recommended template's geometry. */
  applyRecommendation(doi: string, nodes: readonly NodeDoc[]): void {
    const placed = applyTemplate(nodes, this.state.views);
    this.nextId = placed.length + 1;
    this.commit({ views: placed, appliedTemplate: doi });
  }
}
