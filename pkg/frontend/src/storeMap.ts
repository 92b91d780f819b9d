/**
 * Store bubble map for one attribute: bubble size grows with the store's
 * mention fraction, color runs red -> green with the positive share.
 * Stores without coordinates are listed in a side panel; when no store has
 * coordinates at all the view degrades to a ranked bar list.
 */

import { escapeHtml, formatShare } from "./format.js";
import { StoreItemStats, StoreSummary } from "./types.js";

export interface Bubble {
  storeId: string;
  name: string;
  x: number;
  y: number;
  radius: number;
  color: string;
  mention: number;
  sharePos: number | null;
}

export interface StoreMapViewModel {
  mode: "map" | "ranked";
  attribute: string;
  bubbles: Bubble[];
  sidePanel: { storeId: string; name: string; mention: number; sharePos: number | null }[];
}

const WIDTH = 640;
const HEIGHT = 400;
const PAD = 40;
const MIN_RADIUS = 4;
const MAX_RADIUS = 28;

const NO_SHARE_COLOR = "#9e9e9e";

function channel(from: number, to: number, t: number): number {
  return Math.round(from + (to - from) * t);
}

/** Red (#c62828) at share 0 through green (#2e7d32) at share 1. */
export function colorForShare(sharePos: number | null): string {
  if (sharePos === null) {
    return NO_SHARE_COLOR;
  }
  const t = Math.min(1, Math.max(0, sharePos));
  const r = channel(0xc6, 0x2e, t);
  const g = channel(0x28, 0x7d, t);
  const b = channel(0x28, 0x32, t);
  return `#${[r, g, b].map((v) => v.toString(16).padStart(2, "0")).join("")}`;
}

export function radiusForMention(mention: number): number {
  const t = Math.min(1, Math.max(0, mention));
  return MIN_RADIUS + t * (MAX_RADIUS - MIN_RADIUS);
}

export function buildStoreMapViewModel(
  attribute: string,
  stores: StoreSummary[],
  statsByStore: Map<string, StoreItemStats | undefined>,
): StoreMapViewModel {
  const located = stores.filter((s) => s.latitude !== null && s.longitude !== null);
  const unlocated = stores.filter((s) => s.latitude === null || s.longitude === null);

  const lats = located.map((s) => s.latitude!);
  const lons = located.map((s) => s.longitude!);
  const latSpan = Math.max(...lats) - Math.min(...lats) || 1;
  const lonSpan = Math.max(...lons) - Math.min(...lons) || 1;
  const minLat = Math.min(...lats);
  const minLon = Math.min(...lons);

  const bubbles: Bubble[] = located.map((s) => {
    const stats = statsByStore.get(s.store_id);
    const mention = stats?.mention ?? 0;
    const sharePos = stats?.share_pos ?? null;
    return {
      storeId: s.store_id,
      name: s.name,
      x: PAD + ((s.longitude! - minLon) / lonSpan) * (WIDTH - 2 * PAD),
      // latitude grows northward, screen y grows downward
      y: HEIGHT - PAD - ((s.latitude! - minLat) / latSpan) * (HEIGHT - 2 * PAD),
      radius: radiusForMention(mention),
      color: colorForShare(sharePos),
      mention,
      sharePos,
    };
  });

  const sidePanel = unlocated.map((s) => {
    const stats = statsByStore.get(s.store_id);
    return {
      storeId: s.store_id,
      name: s.name,
      mention: stats?.mention ?? 0,
      sharePos: stats?.share_pos ?? null,
    };
  });

  return {
    mode: bubbles.length > 0 ? "map" : "ranked",
    attribute,
    bubbles: bubbles.sort((a, b) => b.mention - a.mention),
    sidePanel: sidePanel.sort((a, b) => b.mention - a.mention),
  };
}

export function renderStoreMapSvg(vm: StoreMapViewModel): string {
  const parts = [
    `<svg viewBox="0 0 ${WIDTH} ${HEIGHT}" role="img" aria-label="store map for ${escapeHtml(vm.attribute)}">`,
  ];
  for (const b of vm.bubbles) {
    parts.push(
      `<circle class="store-bubble" data-store="${escapeHtml(b.storeId)}" ` +
        `cx="${b.x.toFixed(1)}" cy="${b.y.toFixed(1)}" r="${b.radius.toFixed(1)}" ` +
        `fill="${b.color}" fill-opacity="0.75">` +
        `<title>${escapeHtml(b.name)}: mention ${formatShare(b.mention)}, ` +
        `positive ${formatShare(b.sharePos)}</title></circle>`,
    );
  }
  parts.push("</svg>");
  return parts.join("\n");
}

/** Fallback when the fixture has no geocoding: ranked horizontal bars. */
export function renderRankedBars(
  rows: { storeId: string; name: string; mention: number; sharePos: number | null }[],
): string {
  const parts = ['<ol class="ranked-bars">'];
  for (const row of rows) {
    const width = Math.round(row.mention * 100);
    parts.push(
      `<li data-store="${escapeHtml(row.storeId)}">` +
        `<span class="bar" style="width:${width}%;background:${colorForShare(row.sharePos)}"></span>` +
        `<span class="label">${escapeHtml(row.name)} (${formatShare(row.mention)})</span></li>`,
    );
  }
  parts.push("</ol>");
  return parts.join("\n");
}

export function renderStoreMapPanel(vm: StoreMapViewModel): string {
  const side =
    vm.sidePanel.length > 0
      ? `<aside class="unlocated"><h3>No coordinates</h3>${renderRankedBars(vm.sidePanel)}</aside>`
      : "";
  if (vm.mode === "ranked") {
    return `<div class="store-map ranked">${renderRankedBars(vm.sidePanel)}</div>`;
  }
  return `<div class="store-map">${renderStoreMapSvg(vm)}${side}</div>`;
}
