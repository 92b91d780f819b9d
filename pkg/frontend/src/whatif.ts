/**
 * What-if panel: run a feature-uplift simulation and render per-store
 * rating deltas as an intensity list plus the revenue range the API
 * computed (the client never rederives statistics). The previous result is
 * kept for a side-by-side comparison of two features.
 */

import { ApiError, DashboardApi } from "./api.js";
import { escapeHtml, formatDelta, revenueRangeLabel } from "./format.js";
import { SelectionError, ViewState } from "./state.js";
import { SimulatePayload } from "./types.js";

export interface WhatIfRow {
  storeId: string;
  delta: number;
  intensity: number; // 0 (no effect, lightest shade) .. 1 (largest delta)
  shade: string;
  revenueLabel: string;
}

export interface WhatIfComparisonRow {
  storeId: string;
  current: number;
  previous: number | null;
}

export interface WhatIfPanelModel {
  feature: string;
  rows: WhatIfRow[];
  meanDelta: number;
  comparison: { previousFeature: string; rows: WhatIfComparisonRow[] } | null;
}

const LIGHTEST = [0xf5, 0xee, 0xe7] as const;
const DARKEST = [0x5d, 0x1f, 0x0e] as const;

export function shadeForIntensity(intensity: number): string {
  const t = Math.min(1, Math.max(0, intensity));
  const rgb = LIGHTEST.map((from, i) => Math.round(from + (DARKEST[i]! - from) * t));
  return `#${rgb.map((v) => v.toString(16).padStart(2, "0")).join("")}`;
}

export function buildWhatIfPanel(
  result: SimulatePayload,
  previous: SimulatePayload | null = null,
): WhatIfPanelModel {
  const maxDelta = Math.max(...result.stores.map((s) => s.delta), 0);
  const rows = result.stores
    .map((s) => {
      const intensity = maxDelta > 0 ? s.delta / maxDelta : 0;
      return {
        storeId: s.store_id,
        delta: s.delta,
        intensity,
        shade: shadeForIntensity(intensity),
        revenueLabel: revenueRangeLabel(s.revenue_low_pct, s.revenue_high_pct),
      };
    })
    .sort((a, b) => b.delta - a.delta);

  let comparison: WhatIfPanelModel["comparison"] = null;
  if (previous && previous.feature !== result.feature) {
    const previousByStore = new Map(previous.stores.map((s) => [s.store_id, s.delta]));
    comparison = {
      previousFeature: previous.feature,
      rows: rows.map((r) => ({
        storeId: r.storeId,
        current: r.delta,
        previous: previousByStore.get(r.storeId) ?? null,
      })),
    };
  }
  return { feature: result.feature, rows, meanDelta: result.mean, comparison };
}

/**
 * Issue a simulation through the API. The feature must come from the
 * fitted model fetched at load: requesting anything else throws locally
 * without touching the network.
 */
export async function runSimulation(
  api: DashboardApi,
  state: ViewState,
  feature: string,
  stores?: string[],
): Promise<WhatIfPanelModel> {
  if (!state.hasFeature(feature)) {
    throw new SelectionError(
      `feature ${JSON.stringify(feature)} is not in the fitted model`,
    );
  }
  const result = await api.simulate(feature, stores);
  state.recordSimulation(result);
  return buildWhatIfPanel(result, state.comparison);
}

export function renderWhatIfPanel(panel: WhatIfPanelModel): string {
  const parts = [
    `<div class="whatif"><h3>One-level improvement: ${escapeHtml(panel.feature)}</h3>`,
    `<p class="mean">Mean store delta ${formatDelta(panel.meanDelta)}</p>`,
    '<table class="impacts"><thead><tr><th>Store</th><th>Δ rating</th><th>Revenue range</th></tr></thead><tbody>',
  ];
  for (const row of panel.rows) {
    parts.push(
      `<tr data-store="${escapeHtml(row.storeId)}">` +
        `<td><span class="swatch" style="background:${row.shade}"></span>${escapeHtml(row.storeId)}</td>` +
        `<td>${formatDelta(row.delta)}</td>` +
        `<td class="revenue">${escapeHtml(row.revenueLabel)}</td></tr>`,
    );
  }
  parts.push("</tbody></table>");
  if (panel.comparison) {
    parts.push(
      `<h4>Compared with ${escapeHtml(panel.comparison.previousFeature)}</h4>`,
      '<table class="comparison"><thead><tr><th>Store</th><th>Current Δ</th><th>Previous Δ</th></tr></thead><tbody>',
    );
    for (const row of panel.comparison.rows) {
      parts.push(
        `<tr><td>${escapeHtml(row.storeId)}</td><td>${formatDelta(row.current)}</td>` +
          `<td>${row.previous === null ? "n/a" : formatDelta(row.previous)}</td></tr>`,
      );
    }
    parts.push("</tbody></table>");
  }
  parts.push("</div>");
  return parts.join("\n");
}

export function describeSimulationError(error: unknown): string {
  if (error instanceof ApiError && Object.keys(error.fieldErrors).length > 0) {
    return Object.entries(error.fieldErrors)
      .map(([field, message]) => `${field}: ${message}`)
      .join("; ");
  }
  if (error instanceof Error) {
    return error.message;
  }
  return String(error);
}
