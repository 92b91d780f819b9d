import { describe, expect, it } from "vitest";

import { DashboardApi } from "../src/api.js";
import { revenueRangeLabel } from "../src/format.js";
import { SelectionError, ViewState } from "../src/state.js";
import { SimulatePayload, StoreImpact } from "../src/types.js";
import {
  buildWhatIfPanel,
  describeSimulationError,
  renderWhatIfPanel,
  runSimulation,
  shadeForIntensity,
} from "../src/whatif.js";

function impact(storeId: string, delta: number, low: number, high: number): StoreImpact {
  return {
    store_id: storeId,
    delta,
    n_reviews: 10,
    n_mentions: 5,
    revenue_low_pct: low,
    revenue_high_pct: high,
  };
}

function payload(feature: string, stores: StoreImpact[]): SimulatePayload {
  const deltas = stores.map((s) => s.delta);
  return {
    schema_version: 1,
    feature,
    stores,
    mean: deltas.reduce((a, b) => a + b, 0) / deltas.length,
    sd: 0,
    min: Math.min(...deltas),
    max: Math.max(...deltas),
    histogram_bin_width: 0.05,
    histogram: [stores.length],
  };
}

describe("revenue label", () => {
  it("formats the published .19-delta range as .95%–1.71%", () => {
    expect(revenueRangeLabel(0.95, 1.71)).toBe(".95%–1.71%");
  });

  it("formats the .16-delta range as .80%–1.44%", () => {
    expect(revenueRangeLabel(0.8, 1.44)).toBe(".80%–1.44%");
  });

  it("formats zero as 0%–0%", () => {
    expect(revenueRangeLabel(0, 0)).toBe("0%–0%");
  });
});

describe("buildWhatIfPanel", () => {
  const result = payload("F", [
    impact("hot", 0.19, 0.95, 1.71),
    impact("mild", 0.05, 0.25, 0.45),
    impact("zero", 0, 0, 0),
  ]);

  it("renders delta-zero stores in the lightest shade", () => {
    const panel = buildWhatIfPanel(result);
    const zero = panel.rows.find((r) => r.storeId === "zero")!;
    expect(zero.intensity).toBe(0);
    expect(zero.shade).toBe(shadeForIntensity(0));
    const hot = panel.rows.find((r) => r.storeId === "hot")!;
    expect(hot.intensity).toBe(1);
    expect(hot.shade).not.toBe(zero.shade);
  });

  it("keeps the revenue label traceable to API fields", () => {
    const panel = buildWhatIfPanel(result);
    const hot = panel.rows.find((r) => r.storeId === "hot")!;
    expect(hot.revenueLabel).toBe(".95%–1.71%");
    expect(renderWhatIfPanel(panel)).toContain(".95%–1.71%");
  });

  it("builds a side-by-side comparison for two successive simulations", () => {
    const second = payload("G", [
      impact("hot", 0.1, 0.5, 0.9),
      impact("mild", 0.02, 0.1, 0.18),
      impact("zero", 0, 0, 0),
    ]);
    const panel = buildWhatIfPanel(second, result);
    expect(panel.comparison).not.toBeNull();
    expect(panel.comparison!.previousFeature).toBe("F");
    const hot = panel.comparison!.rows.find((r) => r.storeId === "hot")!;
    expect(hot.current).toBe(0.1);
    expect(hot.previous).toBe(0.19);
    expect(renderWhatIfPanel(panel)).toContain("Compared with F");
  });
});

describe("runSimulation", () => {
  const modelItems = [{ name: "Known Feature", neutral: 0.1, positive: 0.2 }];

  it("never issues a request for a feature outside the fitted model", async () => {
    let calls = 0;
    const api = new DashboardApi("http://x", async () => {
      calls += 1;
      return { ok: true, status: 200, json: () => Promise.resolve({}) };
    });
    const state = new ViewState([], modelItems);
    await expect(runSimulation(api, state, "Unknown Feature")).rejects.toBeInstanceOf(
      SelectionError,
    );
    expect(calls).toBe(0);
  });

  it("records successive results in view state for comparison", async () => {
    const responses = [payload("Known Feature", [impact("s", 0.19, 0.95, 1.71)])];
    const api = new DashboardApi("http://x", async () => ({
      ok: true,
      status: 200,
      json: () => Promise.resolve(responses[0]),
    }));
    const state = new ViewState([], modelItems);
    const panel = await runSimulation(api, state, "Known Feature");
    expect(panel.rows[0]!.revenueLabel).toBe(".95%–1.71%");
    expect(state.simulation?.feature).toBe("Known Feature");
  });

  it("surfaces server field errors verbatim", async () => {
    const { ApiError } = await import("../src/api.js");
    const message = describeSimulationError(
      new ApiError("request failed with status 400", 400, {
        feature: "feature 'X' is not in the fitted model",
      }),
    );
    expect(message).toBe("feature: feature 'X' is not in the fitted model");
  });
});

describe("ViewState", () => {
  it("validates attribute selections against the taxonomy", () => {
    const state = new ViewState([{ name: "Customer Service", features: [] }], []);
    state.setAttribute("Customer Service");
    expect(state.attribute).toBe("Customer Service");
    expect(() => state.setAttribute("Nope")).toThrow(SelectionError);
  });

  it("validates feature selections against the model", () => {
    const state = new ViewState([], [{ name: "F", neutral: 0, positive: 0 }]);
    state.setFeature("F");
    expect(() => state.setFeature("G")).toThrow(SelectionError);
  });

  it("rejects inverted date ranges", () => {
    const state = new ViewState([], []);
    expect(() => state.setDateRange({ from: 2020, to: 2010 })).toThrow(SelectionError);
  });
});
