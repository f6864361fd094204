// SVG line chart. The chart displays API numbers verbatim: every point
// carries its bucket date and value in data attributes and a hover
// tooltip; only pixel positions are computed locally.

import type { SeriesPayload } from "./types";

export interface ChartHandlers {
  onPointClick?: (line: number, date: string) => void;
}

const WIDTH = 860;
const HEIGHT = 340;
const MARGIN = { top: 12, right: 16, bottom: 28, left: 64 };

const SVG_NS = "http://www.w3.org/2000/svg";

function svgEl<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) el.setAttribute(k, v);
  return el;
}

export function renderChart(
  container: HTMLElement,
  series: SeriesPayload[],
  handlers: ChartHandlers = {},
): void {
  container.textContent = "";
  const dates = Array.from(new Set(series.flatMap((s) => s.points.map((p) => p[0])))).sort();
  const hasData = dates.length > 0 && series.some((s) => s.points.length);
  if (!hasData) {
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.textContent = "No screen time matched these queries.";
    container.appendChild(empty);
    return;
  }

  const innerW = WIDTH - MARGIN.left - MARGIN.right;
  const innerH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const maxValue = Math.max(...series.flatMap((s) => s.points.map((p) => p[1])), 0);
  const yMax = maxValue > 0 ? maxValue : 1;
  const xOf = (date: string) =>
    MARGIN.left + (dates.length === 1 ? innerW / 2 : (dates.indexOf(date) / (dates.length - 1)) * innerW);
  const yOf = (value: number) => MARGIN.top + innerH - (value / yMax) * innerH;

  const svg = svgEl("svg", {
    viewBox: `0 0 ${WIDTH} ${HEIGHT}`,
    class: "chart",
    role: "img",
  });

  // axes
  svg.appendChild(
    svgEl("line", {
      x1: String(MARGIN.left),
      y1: String(MARGIN.top + innerH),
      x2: String(MARGIN.left + innerW),
      y2: String(MARGIN.top + innerH),
      class: "axis",
    }),
  );
  for (let i = 0; i <= 4; i++) {
    const value = (yMax * i) / 4;
    const y = yOf(value);
    const label = svgEl("text", { x: String(MARGIN.left - 8), y: String(y + 4), class: "tick" });
    label.textContent = formatTick(value);
    svg.appendChild(label);
    svg.appendChild(
      svgEl("line", {
        x1: String(MARGIN.left),
        y1: String(y),
        x2: String(MARGIN.left + innerW),
        y2: String(y),
        class: "grid",
      }),
    );
  }
  const xticks = dates.length <= 8 ? dates : dates.filter((_, i) => i % Math.ceil(dates.length / 8) === 0);
  for (const d of xticks) {
    const label = svgEl("text", {
      x: String(xOf(d)),
      y: String(MARGIN.top + innerH + 18),
      class: "tick x-tick",
      "text-anchor": "middle",
    });
    label.textContent = d;
    svg.appendChild(label);
  }

  series.forEach((s, lineIdx) => {
    const color = s.color ?? "#333";
    const byDate = new Map(s.points.map(([d, v]) => [d, v]));
    // break the polyline where buckets are missing
    let segment: string[] = [];
    const flush = () => {
      if (segment.length > 1) {
        svg.appendChild(
          svgEl("polyline", {
            points: segment.join(" "),
            fill: "none",
            stroke: color,
            "stroke-width": "2",
            class: "series-line",
            "data-series": String(lineIdx),
          }),
        );
      }
      segment = [];
    };
    for (const d of dates) {
      const v = byDate.get(d);
      if (v === undefined) {
        flush();
        continue;
      }
      segment.push(`${xOf(d)},${yOf(v)}`);
    }
    flush();
    for (const [d, v] of s.points) {
      const point = svgEl("circle", {
        cx: String(xOf(d)),
        cy: String(yOf(v)),
        r: "3.5",
        fill: color,
        class: "point",
        "data-series": String(lineIdx),
        "data-date": d,
        "data-value": String(v),
      });
      const tip = svgEl("title");
      tip.textContent = `${s.query}\n${d}: ${v}${s.normalized ? "" : " s"}`;
      point.appendChild(tip);
      point.addEventListener("click", () => handlers.onPointClick?.(lineIdx, d));
      svg.appendChild(point);
    }
  });
  container.appendChild(svg);

  const legend = document.createElement("ul");
  legend.className = "legend";
  series.forEach((s, i) => {
    const item = document.createElement("li");
    item.dataset.series = String(i);
    const swatch = document.createElement("span");
    swatch.className = "swatch";
    swatch.style.background = s.color ?? "#333";
    const text = document.createElement("span");
    text.className = "legend-query";
    text.textContent = s.query;
    item.append(swatch, text);
    legend.appendChild(item);
  });
  container.appendChild(legend);
}

function formatTick(value: number): string {
  if (value >= 3600) return `${(value / 3600).toFixed(1)}h`;
  if (value >= 60) return `${(value / 60).toFixed(1)}m`;
  if (value >= 1) return value.toFixed(0);
  return value.toPrecision(2);
}
