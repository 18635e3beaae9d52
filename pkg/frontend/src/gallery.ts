/** Recommendation gallery state: request orchestration and results.
 *
 * At most one request counts at a time; responses arriving out of order
 * are dropped (latest wins). Results keep the exact server order.
 */

import type { ApiClient } from "./api";
import type { CanvasView, RecommendResult } from "./types";

export class RecommendationController {
  private requestSeq = 0;
  results: RecommendResult[] = [];
  viewCountFilter: number[] | null = null;
  topK = 10;
  private listeners = new Set<() => void>();

  constructor(private api: ApiClient) {}

  subscribe(fn: () => void): () => void {
    this.listeners.add(fn);
    return () => this.listeners.delete(fn);
  }

  /** Request fresh recommendations; stale responses are discarded. */
  async refresh(views: readonly CanvasView[]): Promise<RecommendResult[] | null> {
    if (views.length === 0) {
      this.results = [];
      this.listeners.forEach((fn) => fn());
      return null;
    }
    const seq = ++this.requestSeq;
    const results = await this.api.recommend({
      sketch: {
        views: views.map((v) => ({ type: v.type, ...v.rect })),
      },
      view_counts: this.viewCountFilter,
      top_k: this.topK,
    });
    if (seq !== this.requestSeq) return null; // a newer request superseded us
    this.results = results;
    this.listeners.forEach((fn) => fn());
    return results;
  }

  setViewCountFilter(counts: number[] | null): void {
    this.viewCountFilter = counts && counts.length > 0 ? counts : null;
  }

  get enabled(): boolean {
    return this.results.length > 0;
  }
}
