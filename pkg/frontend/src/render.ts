/** DOM construction helpers: wireframes, dots, detail cards. */

import { dotColor } from "./exploration";
import type { ColorBy } from "./facets";
import type { MVSummary, NodeDoc } from "./types";

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

const SVG_NS = "http://www.w3.org/2000/svg";

/** Wireframe of a refined layout: one rectangle per level-1 node, nested
 * children dashed. */
export function wireframe(nodes: readonly NodeDoc[], size = 120): SVGSVGElement {
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", "0 0 1 1");
  svg.setAttribute("width", String(size));
  svg.setAttribute("height", String(size * 0.75));
  svg.setAttribute("preserveAspectRatio", "none");
  svg.classList.add("wireframe");
  const draw = (node: NodeDoc, dashed: boolean) => {
    const rect = document.createElementNS(SVG_NS, "rect");
    rect.setAttribute("x", String(node.bbox.x - node.bbox.w / 2));
    rect.setAttribute("y", String(node.bbox.y - node.bbox.h / 2));
    rect.setAttribute("width", String(node.bbox.w));
    rect.setAttribute("height", String(node.bbox.h));
    if (dashed) rect.setAttribute("stroke-dasharray", "0.02,0.02");
    svg.appendChild(rect);
    const label = node.kind === "view" ? node.type : undefined;
    if (label) {
      const text = document.createElementNS(SVG_NS, "text");
      text.setAttribute("x", String(node.bbox.x));
      text.setAttribute("y", String(node.bbox.y));
      text.textContent = label;
      svg.appendChild(text);
    }
    node.children?.forEach((child) => draw(child, true));
  };
  nodes.forEach((n) => draw(n, false));
  return svg;
}

export function dot(
  item: MVSummary,
  colorBy: ColorBy,
  scale: Map<string, string>,
): HTMLElement {
  const node = el("span", "dot");
  node.style.backgroundColor = dotColor(item, colorBy, scale);
  node.title = item.doi;
  node.dataset["doi"] = item.doi;
  return node;
}

export function detailCard(detail: {
  doi: string;
  metadata: { title: string | null; authors: string[]; venue: string | null; year: number | null };
  layout: string;
  nodes: NodeDoc[];
  thumbnail?: string | null;
}): HTMLElement {
  const card = el("div", "detail-card");
  if (detail.thumbnail) {
    const img = el("img");
    img.src = detail.thumbnail;
    img.alt = detail.doi;
    card.appendChild(img);
  } else {
    card.appendChild(wireframe(detail.nodes, 160));
  }
  const meta = el("div", "detail-meta");
  meta.appendChild(el("h3", undefined, detail.metadata.title ?? detail.doi));
  meta.appendChild(el("p", "authors", detail.metadata.authors.join(", ")));
  const doiLink = el("a");
  doiLink.href = `https://doi.org/${detail.doi}`;
  doiLink.textContent = detail.doi;
  doiLink.target = "_blank";
  meta.appendChild(doiLink);
  meta.appendChild(
    el(
      "p",
      "venue",
      `${detail.metadata.venue ?? "?"} ${detail.metadata.year ?? ""} - layout ${detail.layout}`,
    ),
  );
  card.appendChild(meta);
  return card;
}
