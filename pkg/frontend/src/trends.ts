/**
 * Trends view: mention % plus positive/negative sentiment shares per year,
 * with crossing years (negative share overtaking positive) annotated.
 * Point values are copied verbatim from the API payload; the only
 * client-side work is filtering to the selected date range and drawing.
 */

import { escapeHtml } from "./format.js";
import { DateRange, TrendsPayload } from "./types.js";

export interface TrendsSeriesPoint {
  period: number;
  mention: number;
  sharePos: number | null;
  shareNeg: number | null;
  lowSupport: boolean;
}

export interface TrendsViewModel {
  status: "ok" | "no-data" | "error";
  attribute: string;
  points: TrendsSeriesPoint[];
  crossings: number[];
  retriable: boolean;
}

export function buildTrendsViewModel(
  payload: TrendsPayload,
  range: DateRange = {},
): TrendsViewModel {
  const points = payload.points
    .filter(
      (p) =>
        (range.from === undefined || p.period >= range.from) &&
        (range.to === undefined || p.period <= range.to),
    )
    .map((p) => ({
      period: p.period,
      mention: p.mention,
      sharePos: p.share_pos,
      shareNeg: p.share_neg,
      lowSupport: p.low_support,
    }))
    .sort((a, b) => a.period - b.period);
  const periods = new Set(points.map((p) => p.period));
  return {
    status: points.length === 0 ? "no-data" : "ok",
    attribute: payload.attribute,
    points,
    crossings: payload.crossings.filter((year) => periods.has(year)),
    retriable: false,
  };
}

export function trendsErrorViewModel(attribute: string): TrendsViewModel {
  return { status: "error", attribute, points: [], crossings: [], retriable: true };
}

const WIDTH = 640;
const HEIGHT = 240;
const PAD = 32;

function xScale(points: TrendsSeriesPoint[]): (period: number) => number {
  const periods = points.map((p) => p.period);
  const lo = Math.min(...periods);
  const hi = Math.max(...periods);
  const span = hi - lo || 1;
  return (period) => PAD + ((period - lo) / span) * (WIDTH - 2 * PAD);
}

function yScale(value: number): number {
  return HEIGHT - PAD - value * (HEIGHT - 2 * PAD);
}

interface SeriesSpec {
  key: "mention" | "sharePos" | "shareNeg";
  color: string;
  label: string;
}

const SERIES: SeriesSpec[] = [
  { key: "mention", color: "#1565c0", label: "mention" },
  { key: "sharePos", color: "#2e7d32", label: "share positive" },
  { key: "shareNeg", color: "#c62828", label: "share negative" },
];

function seriesValue(point: TrendsSeriesPoint, key: SeriesSpec["key"]): number | null {
  return key === "mention" ? point.mention : point[key];
}

/** SVG with one polyline + one marker per point for each of the three series. */
export function renderTrendsSvg(vm: TrendsViewModel): string {
  const x = xScale(vm.points);
  const parts: string[] = [
    `<svg viewBox="0 0 ${WIDTH} ${HEIGHT}" role="img" aria-label="trends for ${escapeHtml(vm.attribute)}">`,
  ];
  for (const year of vm.crossings) {
    const at = x(year);
    parts.push(
      `<line class="crossing" x1="${at}" y1="${PAD}" x2="${at}" y2="${HEIGHT - PAD}" ` +
        `stroke="#7b1fa2" stroke-dasharray="4 3"/>`,
      `<text class="crossing-label" x="${at + 4}" y="${PAD + 12}" fill="#7b1fa2">` +
        `negative overtakes (${year})</text>`,
    );
  }
  for (const spec of SERIES) {
    const defined = vm.points.filter((p) => seriesValue(p, spec.key) !== null);
    const coords = defined.map(
      (p) => `${x(p.period).toFixed(1)},${yScale(seriesValue(p, spec.key)!).toFixed(1)}`,
    );
    if (coords.length > 1) {
      parts.push(
        `<polyline class="series-${spec.key}" fill="none" stroke="${spec.color}" points="${coords.join(" ")}"/>`,
      );
    }
    for (const p of defined) {
      parts.push(
        `<circle class="marker-${spec.key}" cx="${x(p.period).toFixed(1)}" ` +
          `cy="${yScale(seriesValue(p, spec.key)!).toFixed(1)}" r="3" fill="${spec.color}">` +
          `<title>${escapeHtml(spec.label)} ${p.period}: ${seriesValue(p, spec.key)}</title></circle>`,
      );
    }
  }
  parts.push("</svg>");
  return parts.join("\n");
}

export function renderTrendsPanel(vm: TrendsViewModel): string {
  if (vm.status === "error") {
    return (
      `<div class="trends error"><p>Could not load trends for ` +
      `${escapeHtml(vm.attribute)}.</p><button data-action="retry-trends">Retry</button></div>`
    );
  }
  if (vm.status === "no-data") {
    return `<div class="trends empty"><p>No data in the selected range.</p></div>`;
  }
  return `<div class="trends">${renderTrendsSvg(vm)}</div>`;
}
