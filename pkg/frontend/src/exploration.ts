/** View-model logic for the exploration unit visualization.
 *
 * Each corpus design becomes one dot; dots can be grouped by view count
 * or layout code (at most the first 10 groups) and colored by year or
 * venue. Rendering itself lives in render.ts; everything here is pure.
 */

import type { ColorBy, GroupBy } from "./facets";
import type { MVListResponse, MVSummary } from "./types";

export const MAX_GROUPS = 10;

export interface DotGroup {
  key: string;
  items: MVSummary[];
}

/** Group client-side exactly the way the service does, for offline data
 * or pre-grouped responses alike. */
export function groupSummaries(items: readonly MVSummary[], by: GroupBy): DotGroup[] {
  if (by === "none") return [{ key: "all", items: [...items] }];
  if (by === "count") {
    const buckets = new Map<string, MVSummary[]>();
    for (const item of items) {
      const key = item.count >= 10 ? "10+" : String(item.count);
      buckets.set(key, [...(buckets.get(key) ?? []), item]);
    }
    return [...buckets.entries()]
      .sort((a, b) => bucketOrder(a[0]) - bucketOrder(b[0]))
      .map(([key, members]) => ({ key, items: members }))
      .slice(0, MAX_GROUPS);
  }
  const buckets = new Map<string, MVSummary[]>();
  for (const item of items) {
    buckets.set(item.layout, [...(buckets.get(item.layout) ?? []), item]);
  }
  return [...buckets.entries()]
    .sort((a, b) => b[1].length - a[1].length || (a[0] < b[0] ? -1 : 1))
    .map(([key, members]) => ({ key, items: members }))
    .slice(0, MAX_GROUPS);
}

function bucketOrder(key: string): number {
  return key === "10+" ? 10 : Number(key);
}

export function groupsFromResponse(body: MVListResponse, by: GroupBy): DotGroup[] {
  if (body.groups) return body.groups.slice(0, MAX_GROUPS);
  return groupSummaries(body.items ?? [], by);
}

const PALETTE = [
  "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
  "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
];

/** Stable value -> color assignment in first-seen order. */
export function colorScale(
  items: readonly MVSummary[],
  by: ColorBy,
): Map<string, string> {
  const scale = new Map<string, string>();
  for (const item of items) {
    const value = String(by === "year" ? (item.year ?? "?") : (item.venue ?? "?"));
    if (!scale.has(value)) {
      scale.set(value, PALETTE[scale.size % PALETTE.length]!);
    }
  }
  return scale;
}

export function dotColor(
  item: MVSummary,
  by: ColorBy,
  scale: Map<string, string>,
): string {
  const value = String(by === "year" ? (item.year ?? "?") : (item.venue ?? "?"));
  return scale.get(value) ?? "#999999";
}
