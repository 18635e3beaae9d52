/** Faceted query state for exploration mode.
 *
 * Within a facet, selected values form a union; the facets themselves
 * intersect (the service enforces the semantics, the client only builds
 * the query). An empty selection in a facet means "everything", but a
 * facet whose every value was explicitly deselected yields no results,
 * so the state distinguishes "all" from "none".
 */

import { VIEW_TYPES, type ViewTypeName } from "./types";

export const COUNT_VALUES = ["2", "3", "4", "5", "6", "7", "8", "9", "10+"] as const;
export type CountValue = (typeof COUNT_VALUES)[number];

export type GroupBy = "none" | "count" | "layout";
export type ColorBy = "year" | "venue";

export interface FacetState {
  types: Set<ViewTypeName>;
  counts: Set<CountValue>;
  layouts: Set<string>;
  allLayouts: string[]; // the layout codes present in the corpus
  groupBy: GroupBy;
  colorBy: ColorBy;
}

export function initialFacets(allLayouts: string[] = []): FacetState {
  return {
    types: new Set(VIEW_TYPES),
    counts: new Set(COUNT_VALUES),
    layouts: new Set(allLayouts),
    allLayouts: [...allLayouts],
    groupBy: "none",
    colorBy: "venue",
  };
}

export function toggle<T>(values: Set<T>, value: T): Set<T> {
  const next = new Set(values);
  if (next.has(value)) next.delete(value);
  else next.add(value);
  return next;
}

/** Query params for GET /mvs; full facets are omitted (no constraint). */
export function toQuery(state: FacetState): URLSearchParams {
  const params = new URLSearchParams();
  if (state.types.size < VIEW_TYPES.length) {
    params.set("types", [...state.types].join(","));
  }
  if (state.counts.size < COUNT_VALUES.length) {
    params.set("counts", [...state.counts].join(","));
  }
  if (state.allLayouts.length > 0 && state.layouts.size < state.allLayouts.length) {
    params.set("layouts", [...state.layouts].join(","));
  }
  if (state.groupBy !== "none") params.set("group_by", state.groupBy);
  params.set("color_by", state.colorBy);
  return params;
}

/** A facet with every value deselected can never match anything. */
export function isEmptySelection(state: FacetState): boolean {
  return (
    state.types.size === 0 ||
    state.counts.size === 0 ||
    (state.allLayouts.length > 0 && state.layouts.size === 0)
  );
}
