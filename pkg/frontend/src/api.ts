/** Typed client for the corpus service. */

import type {
  CooccurrenceStats,
  CountsStats,
  MVDetail,
  MVListResponse,
  RecommendRequest,
  RecommendResult,
  StabilityStats,
  ViewTypeName,
} from "./types";

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    public baseUrl: string,
    private fetchImpl: typeof fetch = fetch,
  ) {}

  private async get<T>(path: string, params?: URLSearchParams): Promise<T> {
    const query = params && [...params].length > 0 ? `?${params}` : "";
    const resp = await this.fetchImpl(`${this.baseUrl}${path}${query}`);
    if (!resp.ok) throw new ApiError(resp.status, await resp.text());
    return (await resp.json()) as T;
  }

  listMvs(params?: URLSearchParams): Promise<MVListResponse> {
    return this.get("/mvs", params);
  }

  getMv(doi: string): Promise<MVDetail> {
    return this.get(`/mv/${doi}`);
  }

  async recommend(request: RecommendRequest): Promise<RecommendResult[]> {
    const resp = await this.fetchImpl(`${this.baseUrl}/recommend`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(request),
    });
    if (!resp.ok) throw new ApiError(resp.status, await resp.text());
    const body = (await resp.json()) as { results: RecommendResult[] };
    return body.results;
  }

  counts(): Promise<CountsStats> {
    return this.get("/stats/counts");
  }

  frequency(): Promise<Record<ViewTypeName, number>> {
    return this.get("/stats/frequency");
  }

  cooccurrence(): Promise<CooccurrenceStats> {
    return this.get("/stats/cooccurrence");
  }

  stability(type: ViewTypeName, layout?: string): Promise<StabilityStats> {
    const params = new URLSearchParams({ type });
    if (layout) params.set("layout", layout);
    return this.get("/stats/stability", params);
  }
}

/** Types most correlated with `type`, largest first, self excluded.
 * Probabilities come straight from the service's co-occurrence matrix;
 * the client never recomputes them. */
export function correlatedTypes(
  stats: CooccurrenceStats,
  type: ViewTypeName,
  topK?: number,
): [ViewTypeName, number][] {
  const j = stats.types.indexOf(type);
  if (j < 0 || stats.missing.includes(type)) return [];
  const pairs: [ViewTypeName, number][] = [];
  for (let i = 0; i < stats.types.length; i++) {
    if (i === j) continue;
    const p = stats.matrix[i]?.[j];
    if (p !== null && p !== undefined) pairs.push([stats.types[i]!, p]);
  }
  pairs.sort((a, b) => b[1] - a[1] || stats.types.indexOf(a[0]) - stats.types.indexOf(b[0]));
  return topK !== undefined ? pairs.slice(0, topK) : pairs;
}
