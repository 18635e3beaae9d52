/** Page bootstrap: exploration mode + design mode against the service. */

import { ApiClient, correlatedTypes } from "./api";
import type { AlignMode } from "./align";
import {
  COUNT_VALUES,
  initialFacets,
  isEmptySelection,
  toggle,
  toQuery,
  type FacetState,
} from "./facets";
import { colorScale, groupsFromResponse } from "./exploration";
import { RecommendationController } from "./gallery";
import { detailCard, dot, el, wireframe } from "./render";
import { CanvasStore } from "./store";
import { VIEW_TYPES, type CooccurrenceStats, type ViewTypeName } from "./types";

const params = new URLSearchParams(location.search);
const BASE_URL =
  params.get("api") ?? localStorage.getItem("mvlab.api") ?? "http://127.0.0.1:8080";
localStorage.setItem("mvlab.api", BASE_URL);

const api = new ApiClient(BASE_URL);
const store = new CanvasStore();
const gallery = new RecommendationController(api);

let facets: FacetState = initialFacets();
let cooccurrence: CooccurrenceStats | null = null;

function byId(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

// ---------------------------------------------------------------------------
// Exploration mode

async function refreshExploration(): Promise<void> {
  const container = byId("dots");
  container.textContent = "";
  if (isEmptySelection(facets)) {
    byId("result-count").textContent = "0 designs";
    return;
  }
  let body;
  try {
    body = await api.listMvs(toQuery(facets));
  } catch {
    byId("offline").hidden = false;
    return;
  }
  byId("offline").hidden = true;
  byId("result-count").textContent = `${body.total} designs`;
  const groups = groupsFromResponse(body, facets.groupBy);
  const everything = groups.flatMap((g) => g.items);
  const scale = colorScale(everything, facets.colorBy);
  for (const group of groups) {
    const section = el("div", "dot-group");
    if (facets.groupBy !== "none") {
      section.appendChild(el("h4", undefined, `${group.key} (${group.items.length})`));
    }
    const row = el("div", "dot-row");
    for (const item of group.items) {
      const node = dot(item, facets.colorBy, scale);
      node.addEventListener("mouseenter", () => showDetail(item.doi, item.thumbnail));
      row.appendChild(node);
    }
    section.appendChild(row);
    container.appendChild(section);
  }
}

async function showDetail(doi: string, thumbnail: string | null): Promise<void> {
  const host = byId("detail");
  host.textContent = "";
  const detail = await api.getMv(doi);
  host.appendChild(
    detailCard({
      ...detail,
      thumbnail: thumbnail ? `${BASE_URL}${thumbnail}` : null,
    }),
  );
}

function facetPanel<T extends string>(
  host: HTMLElement,
  values: readonly T[],
  selected: Set<T>,
  onToggle: (value: T) => void,
): void {
  host.textContent = "";
  for (const value of values) {
    const label = el("label", "facet-value");
    const box = el("input") as HTMLInputElement;
    box.type = "checkbox";
    box.checked = selected.has(value);
    box.addEventListener("change", () => onToggle(value));
    label.appendChild(box);
    label.appendChild(document.createTextNode(value));
    host.appendChild(label);
  }
}

function renderFacets(): void {
  facetPanel(byId("facet-types"), VIEW_TYPES, facets.types, (v) => {
    facets = { ...facets, types: toggle(facets.types, v) };
    renderFacets();
    void refreshExploration();
  });
  facetPanel(byId("facet-counts"), COUNT_VALUES, facets.counts, (v) => {
    facets = { ...facets, counts: toggle(facets.counts, v) };
    renderFacets();
    void refreshExploration();
  });
  facetPanel(byId("facet-layouts"), facets.allLayouts, facets.layouts, (v) => {
    facets = { ...facets, layouts: toggle(facets.layouts, v) };
    renderFacets();
    void refreshExploration();
  });
}

// ---------------------------------------------------------------------------
// Design mode

const CANVAS_W = 800;
const CANVAS_H = 600;

function renderPalette(): void {
  const host = byId("palette");
  host.textContent = "";
  for (const type of VIEW_TYPES) {
    const chip = el("button", "type-chip", type);
    chip.draggable = true;
    chip.addEventListener("click", () => {
      store.addView(type, { x: CANVAS_W / 2, y: CANVAS_H / 2, w: 200, h: 150 });
    });
    chip.addEventListener("dragstart", (ev) => {
      ev.dataTransfer?.setData("text/mv-type", type);
    });
    host.appendChild(chip);
  }
}

function renderCanvas(): void {
  const host = byId("canvas");
  host.textContent = "";
  for (const view of store.views) {
    const node = el("div", view.selected ? "view selected" : "view");
    node.style.left = `${view.rect.x - view.rect.w / 2}px`;
    node.style.top = `${view.rect.y - view.rect.h / 2}px`;
    node.style.width = `${view.rect.w}px`;
    node.style.height = `${view.rect.h}px`;
    node.textContent = view.type;
    node.addEventListener("mousedown", (ev) => beginDrag(ev, view.id));
    node.addEventListener("click", (ev) => {
      store.select(view.id, ev.shiftKey);
      ev.stopPropagation();
    });
    const handle = el("span", "resize-handle");
    handle.addEventListener("mousedown", (ev) => beginResize(ev, view.id));
    node.appendChild(handle);
    host.appendChild(node);
  }
  renderCorrelated();
}

function renderCorrelated(): void {
  const host = byId("correlated");
  host.textContent = "";
  const selected = store.selection;
  if (!cooccurrence || selected.length !== 1) return;
  const first = selected[0];
  if (!first) return;
  for (const [type, p] of correlatedTypes(cooccurrence, first.type, 6)) {
    if (p <= 0) continue;
    const chip = el("button", "type-chip correlated", `${type} ${(p * 100).toFixed(0)}%`);
    chip.style.fontSize = `${10 + 14 * p}px`; // icon size tracks correlation
    chip.addEventListener("click", () => {
      const rect = first.rect;
      store.addView(type, { ...rect, x: rect.x + rect.w + 10 });
    });
    host.appendChild(chip);
  }
}

function beginDrag(ev: MouseEvent, id: number): void {
  const view = store.views.find((v) => v.id === id);
  if (!view) return;
  const startX = ev.clientX;
  const startY = ev.clientY;
  const origin = { ...view.rect };
  const onMove = (move: MouseEvent) => {
    store.moveView(id, origin.x + move.clientX - startX, origin.y + move.clientY - startY);
  };
  const onUp = () => {
    window.removeEventListener("mousemove", onMove);
    window.removeEventListener("mouseup", onUp);
    void gallery.refresh(store.views);
  };
  window.addEventListener("mousemove", onMove);
  window.addEventListener("mouseup", onUp);
}

function beginResize(ev: MouseEvent, id: number): void {
  ev.stopPropagation();
  const view = store.views.find((v) => v.id === id);
  if (!view) return;
  const startX = ev.clientX;
  const startY = ev.clientY;
  const origin = { ...view.rect };
  const onMove = (move: MouseEvent) => {
    store.resizeView(
      id,
      Math.max(20, origin.w + (move.clientX - startX)),
      Math.max(20, origin.h + (move.clientY - startY)),
    );
  };
  const onUp = () => {
    window.removeEventListener("mousemove", onMove);
    window.removeEventListener("mouseup", onUp);
    void gallery.refresh(store.views);
  };
  window.addEventListener("mousemove", onMove);
  window.addEventListener("mouseup", onUp);
}

function renderGallery(): void {
  const host = byId("gallery");
  host.textContent = "";
  if (store.views.length === 0) {
    host.appendChild(el("p", "hint", "Place views on the canvas to get recommendations."));
    return;
  }
  for (const result of gallery.results) {
    const card = el("div", "gallery-card");
    card.appendChild(wireframe(result.template.nodes));
    card.appendChild(
      el("p", undefined, `#${result.rank} ${result.layout} - ${result.score.toFixed(3)}`),
    );
    card.appendChild(el("p", "doi", result.doi));
    const apply = el("button", "apply", "apply");
    apply.addEventListener("click", () => {
      store.applyRecommendation(result.doi, result.template.nodes);
    });
    card.appendChild(apply);
    host.appendChild(card);
  }
}

// ---------------------------------------------------------------------------
// Wiring

export async function boot(): Promise<void> {
  renderPalette();
  renderCanvas();
  store.subscribe(renderCanvas);
  gallery.subscribe(renderGallery);

  byId("canvas").addEventListener("click", () => store.clearSelection());
  byId("canvas").addEventListener("dragover", (ev) => ev.preventDefault());
  byId("canvas").addEventListener("drop", (ev) => {
    ev.preventDefault();
    const type = ev.dataTransfer?.getData("text/mv-type") as ViewTypeName | "";
    if (!type) return;
    const host = byId("canvas").getBoundingClientRect();
    store.addView(type, {
      x: ev.clientX - host.left,
      y: ev.clientY - host.top,
      w: 200,
      h: 150,
    });
    void gallery.refresh(store.views);
  });

  for (const mode of ["left", "right", "top", "bottom", "center-h", "center-v"]) {
    byId(`align-${mode}`).addEventListener("click", () =>
      store.alignSelected(mode as AlignMode),
    );
  }
  byId("undo").addEventListener("click", () => store.undo());
  byId("remove-all").addEventListener("click", () => {
    store.removeAll();
    void gallery.refresh(store.views);
  });
  byId("delete").addEventListener("click", () => {
    for (const view of store.selection) store.removeView(view.id);
    void gallery.refresh(store.views);
  });
  byId("recommend").addEventListener("click", () => void gallery.refresh(store.views));
  byId("gallery-filter").addEventListener("change", (ev) => {
    const raw = (ev.target as HTMLInputElement).value.trim();
    gallery.setViewCountFilter(
      raw ? raw.split(",").map((s) => Number(s.trim())).filter((n) => !isNaN(n)) : null,
    );
    void gallery.refresh(store.views);
  });

  const groupSelect = byId("group-by") as HTMLSelectElement;
  groupSelect.addEventListener("change", () => {
    facets = { ...facets, groupBy: groupSelect.value as FacetState["groupBy"] };
    void refreshExploration();
  });
  const colorSelect = byId("color-by") as HTMLSelectElement;
  colorSelect.addEventListener("change", () => {
    facets = { ...facets, colorBy: colorSelect.value as FacetState["colorBy"] };
    void refreshExploration();
  });

  try {
    const everything = await api.listMvs();
    const layouts = [...new Set((everything.items ?? []).map((i) => i.layout))].sort();
    facets = initialFacets(layouts);
    cooccurrence = await api.cooccurrence();
  } catch {
    byId("offline").hidden = false;
  }
  renderFacets();
  await refreshExploration();
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  void boot();
}
