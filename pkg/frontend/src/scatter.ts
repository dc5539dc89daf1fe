/** Scatter view of grouped value variants: one dot per variant, dot area
 * affine in occurrence count (so areas are monotone in frequency), color by
 * cluster, box selection to filter the table to the underlying records. */

import type { GroupingView, GroupPointView } from "./types.js";

export const SCATTER_WIDTH = 640;
export const SCATTER_HEIGHT = 420;
export const SCATTER_MARGIN = 36;

const MIN_DOT_AREA = 28;
const DOT_AREA_PER_COUNT = 22;

export const CLUSTER_COLORS = [
  "#1f77b4",
  "#ff7f0e",
  "#2ca02c",
  "#d62728",
  "#9467bd",
  "#8c564b",
  "#e377c2",
  "#7f7f7f",
  "#bcbd22",
  "#17becf",
];

export function clusterColor(clusterId: number): string {
  return CLUSTER_COLORS[((clusterId % CLUSTER_COLORS.length) + CLUSTER_COLORS.length) % CLUSTER_COLORS.length];
}

export function dotArea(frequency: number): number {
  return MIN_DOT_AREA + DOT_AREA_PER_COUNT * Math.max(0, frequency);
}

export function dotRadius(frequency: number): number {
  return Math.sqrt(dotArea(frequency) / Math.PI);
}

export interface PlacedPoint {
  x: number;
  y: number;
  point: GroupPointView;
}

function makeScale(values: number[], lo: number, hi: number): (v: number) => number {
  const min = Math.min(...values);
  const max = Math.max(...values);
  if (!(max > min)) {
    const mid = (lo + hi) / 2;
    return () => mid;
  }
  const ratio = (hi - lo) / (max - min);
  return (v: number) => lo + (v - min) * ratio;
}

/** Screen placement for every grouping point, in drawing order. */
export function placePoints(grouping: GroupingView): PlacedPoint[] {
  const points = grouping.points;
  if (points.length === 0) {
    return [];
  }
  const sx = makeScale(points.map((p) => p.x), SCATTER_MARGIN, SCATTER_WIDTH - SCATTER_MARGIN);
  const sy = makeScale(points.map((p) => p.y), SCATTER_HEIGHT - SCATTER_MARGIN, SCATTER_MARGIN);
  return points.map((point) => ({ x: sx(point.x), y: sy(point.y), point }));
}

export interface SelectionRect {
  x0: number;
  y0: number;
  x1: number;
  y1: number;
}

/** Record ids under a selection rectangle (deduplicated, ascending). */
export function selectRids(placed: PlacedPoint[], rect: SelectionRect): number[] {
  const lox = Math.min(rect.x0, rect.x1);
  const hix = Math.max(rect.x0, rect.x1);
  const loy = Math.min(rect.y0, rect.y1);
  const hiy = Math.max(rect.y0, rect.y1);
  const rids = new Set<number>();
  for (const { x, y, point } of placed) {
    if (x >= lox && x <= hix && y >= loy && y <= hiy) {
      for (const rid of point.record_indices) {
        rids.add(rid);
      }
    }
  }
  return [...rids].sort((a, b) => a - b);
}

export interface ScatterHandlers {
  /** Box selection finished; null means the selection was cleared. */
  onSelect?: (rids: number[] | null) => void;
}

const SVG_NS = "http://www.w3.org/2000/svg";
const CLICK_TOLERANCE_PX = 3;

export function renderScatter(
  grouping: GroupingView,
  handlers: ScatterHandlers = {},
): HTMLElement {
  const wrapper = document.createElement("div");
  wrapper.className = "scatter";

  const placed = placePoints(grouping);
  if (placed.length === 0) {
    const empty = document.createElement("p");
    empty.className = "scatter-empty";
    empty.textContent = `no values to plot for ${grouping.column}; every cell in the selection is Empty`;
    wrapper.appendChild(empty);
    return wrapper;
  }

  const labelByCluster = new Map<number, string>();
  for (const cluster of grouping.clusters) {
    labelByCluster.set(cluster.cluster_id, cluster.label);
  }

  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${SCATTER_WIDTH} ${SCATTER_HEIGHT}`);
  svg.setAttribute("width", String(SCATTER_WIDTH));
  svg.setAttribute("height", String(SCATTER_HEIGHT));
  svg.classList.add("scatter-svg");

  const tooltip = document.createElement("div");
  tooltip.className = "scatter-tooltip";
  tooltip.hidden = true;

  for (const { x, y, point } of placed) {
    const circle = document.createElementNS(SVG_NS, "circle");
    circle.setAttribute("cx", x.toFixed(2));
    circle.setAttribute("cy", y.toFixed(2));
    circle.setAttribute("r", dotRadius(point.frequency).toFixed(2));
    circle.setAttribute("fill", clusterColor(point.cluster_id));
    circle.classList.add("dot", `cluster-${point.cluster_id}`);
    circle.dataset.variant = point.variant;
    circle.dataset.frequency = String(point.frequency);
    const label = labelByCluster.get(point.cluster_id) ?? `cluster ${point.cluster_id}`;
    const hover = `${point.variant} (x${point.frequency}) in ${label}`;
    const title = document.createElementNS(SVG_NS, "title");
    title.textContent = hover;
    circle.appendChild(title);
    circle.addEventListener("mouseenter", () => {
      tooltip.textContent = hover;
      tooltip.hidden = false;
    });
    circle.addEventListener("mouseleave", () => {
      tooltip.hidden = true;
    });
    svg.appendChild(circle);
  }

  let band: SVGRectElement | null = null;
  let origin: { x: number; y: number } | null = null;

  const localPoint = (event: MouseEvent): { x: number; y: number } => {
    const bounds = svg.getBoundingClientRect();
    const width = bounds.width || SCATTER_WIDTH;
    const height = bounds.height || SCATTER_HEIGHT;
    return {
      x: ((event.clientX - bounds.left) / width) * SCATTER_WIDTH,
      y: ((event.clientY - bounds.top) / height) * SCATTER_HEIGHT,
    };
  };

  svg.addEventListener("mousedown", (event) => {
    origin = localPoint(event);
    band = document.createElementNS(SVG_NS, "rect");
    band.classList.add("selection-band");
    band.setAttribute("fill", "rgba(70, 130, 180, 0.2)");
    band.setAttribute("stroke", "steelblue");
    svg.appendChild(band);
  });

  svg.addEventListener("mousemove", (event) => {
    if (!origin || !band) {
      return;
    }
    const at = localPoint(event);
    band.setAttribute("x", Math.min(origin.x, at.x).toFixed(2));
    band.setAttribute("y", Math.min(origin.y, at.y).toFixed(2));
    band.setAttribute("width", Math.abs(at.x - origin.x).toFixed(2));
    band.setAttribute("height", Math.abs(at.y - origin.y).toFixed(2));
  });

  svg.addEventListener("mouseup", (event) => {
    if (!origin) {
      return;
    }
    const at = localPoint(event);
    const rect: SelectionRect = { x0: origin.x, y0: origin.y, x1: at.x, y1: at.y };
    if (band) {
      band.remove();
      band = null;
    }
    origin = null;
    const tiny =
      Math.abs(rect.x1 - rect.x0) < CLICK_TOLERANCE_PX &&
      Math.abs(rect.y1 - rect.y0) < CLICK_TOLERANCE_PX;
    handlers.onSelect?.(tiny ? null : selectRids(placed, rect));
  });

  const legend = document.createElement("div");
  legend.className = "scatter-legend";
  for (const cluster of grouping.clusters) {
    const item = document.createElement("span");
    item.className = "legend-item";
    const chip = document.createElement("span");
    chip.className = "legend-chip";
    chip.style.backgroundColor = clusterColor(cluster.cluster_id);
    item.appendChild(chip);
    item.appendChild(document.createTextNode(` ${cluster.label}`));
    legend.appendChild(item);
  }

  wrapper.appendChild(svg);
  wrapper.appendChild(tooltip);
  wrapper.appendChild(legend);
  return wrapper;
}
