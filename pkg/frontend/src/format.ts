/** Number formatting. The dashboard never derives statistics client-side:
 * these helpers only format values taken verbatim from API fields. */

export function formatPercentValue(value: number): string {
  if (value === 0) {
    return "0";
  }
  const fixed = Math.abs(value).toFixed(2);
  const sign = value < 0 ? "-" : "";
  return sign + (Math.abs(value) < 1 ? fixed.slice(1) : fixed);
}

/** ".95%–1.71%" style revenue range, straight from the API's fields. */
export function revenueRangeLabel(lowPct: number, highPct: number): string {
  return `${formatPercentValue(lowPct)}%–${formatPercentValue(highPct)}%`;
}

export function formatShare(share: number | null): string {
  if (share === null) {
    return "n/a";
  }
  return `${(share * 100).toFixed(1)}%`;
}

export function formatDelta(delta: number): string {
  return delta.toFixed(3).replace(/0+$/, "").replace(/\.$/, ".0");
}

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}
