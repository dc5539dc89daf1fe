// @vitest-environment jsdom
import { describe, expect, it } from "vitest";

import {
  clusterColor,
  CLUSTER_COLORS,
  dotArea,
  dotRadius,
  placePoints,
  renderScatter,
  SCATTER_HEIGHT,
  SCATTER_MARGIN,
  SCATTER_WIDTH,
  selectRids,
} from "../src/scatter.js";
import type { GroupingView } from "../src/types.js";
import { fixtureGrouping, mulberry32 } from "./fixtures.js";

describe("dot sizing", () => {
  it("keeps dot area strictly monotone in frequency", () => {
    const random = mulberry32(99);
    const frequencies = Array.from({ length: 200 }, () => Math.floor(random() * 500));
    const sorted = [...frequencies].sort((a, b) => a - b);
    for (let i = 1; i < sorted.length; i++) {
      const previous = dotArea(sorted[i - 1]);
      const current = dotArea(sorted[i]);
      if (sorted[i] === sorted[i - 1]) {
        expect(current).toBe(previous);
      } else {
        expect(current).toBeGreaterThan(previous);
      }
    }
  });

  it("adds a fixed area per occurrence", () => {
    const step = dotArea(2) - dotArea(1);
    expect(dotArea(10) - dotArea(9)).toBeCloseTo(step, 10);
    expect(dotArea(0)).toBeGreaterThan(0);
  });

  it("derives the radius from the area", () => {
    expect(Math.PI * dotRadius(7) ** 2).toBeCloseTo(dotArea(7), 8);
  });

  it("cycles cluster colors", () => {
    expect(clusterColor(0)).toBe(CLUSTER_COLORS[0]);
    expect(clusterColor(13)).toBe(CLUSTER_COLORS[3]);
  });
});

describe("point placement", () => {
  it("maps the data extent onto the drawing area", () => {
    const placed = placePoints(fixtureGrouping());
    const xs = placed.map((p) => p.x);
    const ys = placed.map((p) => p.y);
    expect(Math.min(...xs)).toBeCloseTo(SCATTER_MARGIN, 6);
    expect(Math.max(...xs)).toBeCloseTo(SCATTER_WIDTH - SCATTER_MARGIN, 6);
    expect(Math.min(...ys)).toBeGreaterThanOrEqual(SCATTER_MARGIN);
    expect(Math.max(...ys)).toBeLessThanOrEqual(SCATTER_HEIGHT - SCATTER_MARGIN);
  });

  it("keeps the y axis pointing up", () => {
    const grouping = fixtureGrouping();
    const placed = placePoints(grouping);
    const top = grouping.points.findIndex((p) => p.y === 0.4);
    const bottom = grouping.points.findIndex((p) => p.y === -0.3);
    expect(placed[top].y).toBeLessThan(placed[bottom].y);
  });

  it("centers a degenerate extent", () => {
    const grouping: GroupingView = {
      column: "unit",
      points: [
        { x: 5, y: 2, cluster_id: 0, frequency: 1, variant: "mg", record_indices: [0] },
        { x: 5, y: 2, cluster_id: 0, frequency: 2, variant: "MG", record_indices: [1] },
      ],
      clusters: [],
      k: 1,
    };
    const placed = placePoints(grouping);
    expect(placed[0].x).toBeCloseTo(SCATTER_WIDTH / 2, 6);
    expect(placed[0].y).toBeCloseTo(SCATTER_HEIGHT / 2, 6);
  });
});

describe("box selection", () => {
  it("collects the records under the rectangle, deduplicated and sorted", () => {
    const placed = [
      { x: 10, y: 10, point: { ...fixtureGrouping().points[0], record_indices: [4, 1] } },
      { x: 20, y: 12, point: { ...fixtureGrouping().points[1], record_indices: [1, 2] } },
      { x: 400, y: 300, point: { ...fixtureGrouping().points[3], record_indices: [9] } },
    ];
    const rids = selectRids(placed, { x0: 0, y0: 0, x1: 30, y1: 30 });
    expect(rids).toEqual([1, 2, 4]);
  });

  it("accepts rectangles drawn in any direction", () => {
    const placed = placePoints(fixtureGrouping());
    const forward = selectRids(placed, { x0: 0, y0: 0, x1: SCATTER_WIDTH, y1: SCATTER_HEIGHT });
    const backward = selectRids(placed, { x0: SCATTER_WIDTH, y0: SCATTER_HEIGHT, x1: 0, y1: 0 });
    expect(forward).toEqual([0, 1, 2, 3]);
    expect(backward).toEqual(forward);
  });
});

describe("scatter rendering", () => {
  it("draws one dot per variant with cluster colors and sized radii", () => {
    const grouping = fixtureGrouping();
    const element = renderScatter(grouping);
    const dots = [...element.querySelectorAll("circle")];
    expect(dots).toHaveLength(grouping.points.length);
    for (let i = 0; i < dots.length; i++) {
      const point = grouping.points[i];
      expect(dots[i].getAttribute("fill")).toBe(clusterColor(point.cluster_id));
      expect(Number(dots[i].getAttribute("r"))).toBeCloseTo(dotRadius(point.frequency), 2);
    }
  });

  it("shows variant, count, and group label on hover", () => {
    const element = renderScatter(fixtureGrouping());
    const tooltip = element.querySelector<HTMLElement>(".scatter-tooltip")!;
    expect(tooltip.hidden).toBe(true);
    const maizeDot = [...element.querySelectorAll("circle")].find(
      (c) => (c as SVGCircleElement).dataset.variant === "maize",
    )!;
    maizeDot.dispatchEvent(new MouseEvent("mouseenter"));
    expect(tooltip.hidden).toBe(false);
    expect(tooltip.textContent).toBe("maize (x3) in maize");
    maizeDot.dispatchEvent(new MouseEvent("mouseleave"));
    expect(tooltip.hidden).toBe(true);
  });

  it("legend lists every cluster", () => {
    const element = renderScatter(fixtureGrouping());
    const labels = [...element.querySelectorAll(".legend-item")].map((i) =>
      i.textContent?.trim(),
    );
    expect(labels).toEqual(["sweet potatoes", "maize"]);
  });

  it("reports the records under a drawn selection box", () => {
    const selections: Array<number[] | null> = [];
    const element = renderScatter(fixtureGrouping(), {
      onSelect: (rids) => selections.push(rids),
    });
    const svg = element.querySelector("svg")!;
    svg.dispatchEvent(new MouseEvent("mousedown", { clientX: 0, clientY: 0, bubbles: true }));
    svg.dispatchEvent(
      new MouseEvent("mousemove", { clientX: 300, clientY: 420, bubbles: true }),
    );
    svg.dispatchEvent(new MouseEvent("mouseup", { clientX: 300, clientY: 420, bubbles: true }));
    expect(selections).toHaveLength(1);
    expect(selections[0]).toEqual([0, 1, 2]);
  });

  it("clears the selection on a plain click", () => {
    const selections: Array<number[] | null> = [];
    const element = renderScatter(fixtureGrouping(), {
      onSelect: (rids) => selections.push(rids),
    });
    const svg = element.querySelector("svg")!;
    svg.dispatchEvent(new MouseEvent("mousedown", { clientX: 50, clientY: 50, bubbles: true }));
    svg.dispatchEvent(new MouseEvent("mouseup", { clientX: 51, clientY: 51, bubbles: true }));
    expect(selections).toEqual([null]);
  });

  it("explains an all-Empty selection instead of plotting", () => {
    const element = renderScatter({ column: "crop", points: [], clusters: [], k: 0 });
    expect(element.querySelector("svg")).toBeNull();
    expect(element.querySelector(".scatter-empty")?.textContent).toContain("crop");
  });
});
