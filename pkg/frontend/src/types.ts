/** Data contracts shared with the HTTP service. */

export const VIEW_TYPES = [
  "Area",
  "Bar",
  "Circle",
  "Diagram",
  "Distribution",
  "GridMatrix",
  "Line",
  "Map",
  "Point",
  "Table",
  "Text",
  "TreesNetworks",
  "SciVis",
  "Panel",
] as const;

export type ViewTypeName = (typeof VIEW_TYPES)[number];

/** Center position + size, in abstract canvas units. */
export interface Rect {
  x: number;
  y: number;
  w: number;
  h: number;
}

export interface BBoxDoc {
  x: number;
  y: number;
  w: number;
  h: number;
}

export interface NodeDoc {
  id: string;
  kind: "view" | "small_multiples";
  type?: ViewTypeName;
  bbox: BBoxDoc;
  children?: NodeDoc[];
}

export interface MVSummary {
  doi: string;
  title: string | null;
  venue: string | null;
  year: number | null;
  count: number;
  layout: string;
  thumbnail: string | null;
}

export interface MVListResponse {
  total: number;
  items?: MVSummary[];
  groups?: { key: string; items: MVSummary[] }[];
  truncated?: boolean;
}

export interface MVDetail {
  doi: string;
  metadata: {
    title: string | null;
    authors: string[];
    venue: string | null;
    year: number | null;
  };
  layout: string;
  non_guillotine: boolean;
  count: number;
  nodes: NodeDoc[];
  tensor: number[];
}

export interface SketchViewPayload extends Rect {
  type: ViewTypeName;
}

export interface RecommendRequest {
  sketch: { views: SketchViewPayload[]; canvas?: { w: number; h: number } };
  view_counts?: number[] | null;
  top_k?: number;
}

export interface RecommendResult {
  doi: string;
  score: number;
  layout: string;
  rank: number;
  count: number;
  template: { nodes: NodeDoc[] };
}

export interface CooccurrenceStats {
  types: ViewTypeName[];
  matrix: (number | null)[][];
  missing: ViewTypeName[];
}

export type CountsStats = Record<string, number>;

export interface StabilityStats {
  type: ViewTypeName;
  layout: string | null;
  stability: number | null;
}

/** A view placed on the design canvas. */
export interface CanvasView {
  id: number;
  type: ViewTypeName;
  rect: Rect;
  selected: boolean;
}
