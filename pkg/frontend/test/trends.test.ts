import { describe, expect, it } from "vitest";

import { buildTrendsViewModel, renderTrendsPanel, renderTrendsSvg, trendsErrorViewModel } from "../src/trends.js";
import { TrendsPayload } from "../src/types.js";

const PAYLOAD: TrendsPayload = {
  schema_version: 1,
  attribute: "Customer Service",
  points: [
    { period: 2014, item: "Customer Service", mention: 0.6, share_pos: 0.8, share_neg: 0.2, n_reviews: 40, low_support: false },
    { period: 2015, item: "Customer Service", mention: 0.7, share_pos: 0.55, share_neg: 0.45, n_reviews: 38, low_support: false },
    { period: 2016, item: "Customer Service", mention: 0.75, share_pos: 0.4, share_neg: 0.6, n_reviews: 41, low_support: false },
    { period: 2017, item: "Customer Service", mention: 0.8, share_pos: 0.35, share_neg: 0.65, n_reviews: 12, low_support: true },
  ],
  crossings: [2016],
};

describe("buildTrendsViewModel", () => {
  it("copies the three series values verbatim from the payload", () => {
    const vm = buildTrendsViewModel(PAYLOAD);
    expect(vm.status).toBe("ok");
    expect(vm.points.map((p) => p.mention)).toEqual(PAYLOAD.points.map((p) => p.mention));
    expect(vm.points.map((p) => p.sharePos)).toEqual(PAYLOAD.points.map((p) => p.share_pos));
    expect(vm.points.map((p) => p.shareNeg)).toEqual(PAYLOAD.points.map((p) => p.share_neg));
  });

  it("filters by date range and keeps in-range crossings", () => {
    const vm = buildTrendsViewModel(PAYLOAD, { from: 2015, to: 2016 });
    expect(vm.points.map((p) => p.period)).toEqual([2015, 2016]);
    expect(vm.crossings).toEqual([2016]);
  });

  it("drops crossings that fall outside the range", () => {
    const vm = buildTrendsViewModel(PAYLOAD, { from: 2014, to: 2015 });
    expect(vm.crossings).toEqual([]);
  });

  it("reports an explicit no-data state for an empty range", () => {
    const vm = buildTrendsViewModel(PAYLOAD, { from: 1999, to: 2001 });
    expect(vm.status).toBe("no-data");
    expect(renderTrendsPanel(vm)).toContain("No data");
  });
});

describe("renderTrendsSvg", () => {
  it("renders one marker per point for each of the three series", () => {
    const single = buildTrendsViewModel(PAYLOAD, { from: 2015, to: 2015 });
    const svg = renderTrendsSvg(single);
    for (const key of ["mention", "sharePos", "shareNeg"]) {
      expect(svg.match(new RegExp(`marker-${key}`, "g"))).toHaveLength(1);
    }
  });

  it("annotates the crossing year", () => {
    const svg = renderTrendsSvg(buildTrendsViewModel(PAYLOAD));
    expect(svg).toContain("negative overtakes (2016)");
    expect(svg).toContain('class="crossing"');
  });
});

describe("error state", () => {
  it("offers a retry affordance instead of stale data", () => {
    const html = renderTrendsPanel(trendsErrorViewModel("Customer Service"));
    expect(html).toContain("retry-trends");
    expect(html).not.toContain("svg");
  });
});
