import { describe, expect, it } from "vitest";

import {
  buildStoreMapViewModel,
  colorForShare,
  radiusForMention,
  renderRankedBars,
  renderStoreMapPanel,
} from "../src/storeMap.js";
import { StoreItemStats, StoreSummary } from "../src/types.js";

function store(id: string, lat: number | null, lon: number | null): StoreSummary {
  return {
    store_id: id,
    name: `Store ${id}`,
    state: "PA",
    latitude: lat,
    longitude: lon,
    n_reviews: 10,
    avg_stars: 3.2,
  };
}

function stats(mention: number, sharePos: number | null): StoreItemStats {
  return { name: "Customer Service", mention, n_mentions: 5, share_pos: sharePos, share_neg: sharePos === null ? null : 1 - sharePos };
}

describe("color scale", () => {
  it("renders full positive share as green and full negative as red", () => {
    expect(colorForShare(1)).toBe("#2e7d32");
    expect(colorForShare(0)).toBe("#c62828");
  });

  it("uses a neutral gray when the share is undefined", () => {
    expect(colorForShare(null)).toBe("#9e9e9e");
  });
});

describe("bubble sizing", () => {
  it("is monotone in the mention fraction", () => {
    const mentions = [0, 0.2, 0.5, 0.9, 1];
    const radii = mentions.map(radiusForMention);
    for (let i = 1; i < radii.length; i++) {
      expect(radii[i]!).toBeGreaterThan(radii[i - 1]!);
    }
  });

  it("orders bubbles identically to mention fractions", () => {
    const stores = [store("a", 40, -75), store("b", 41, -74), store("c", 39, -76)];
    const byStore = new Map([
      ["a", stats(0.9, 0.5)],
      ["b", stats(0.3, 0.5)],
      ["c", stats(0.6, 0.5)],
    ]);
    const vm = buildStoreMapViewModel("Customer Service", stores, byStore);
    const radiusById = new Map(vm.bubbles.map((b) => [b.storeId, b.radius]));
    expect(radiusById.get("a")!).toBeGreaterThan(radiusById.get("c")!);
    expect(radiusById.get("c")!).toBeGreaterThan(radiusById.get("b")!);
  });
});

describe("missing coordinates", () => {
  it("lists unlocated stores in the side panel instead of plotting them", () => {
    const stores = [store("a", 40, -75), store("b", 41, -74), store("x", null, null)];
    const byStore = new Map([
      ["a", stats(0.5, 0.6)],
      ["b", stats(0.4, 0.4)],
      ["x", stats(0.8, 0.1)],
    ]);
    const vm = buildStoreMapViewModel("Customer Service", stores, byStore);
    expect(vm.mode).toBe("map");
    expect(vm.bubbles.map((b) => b.storeId).sort()).toEqual(["a", "b"]);
    expect(vm.sidePanel.map((s) => s.storeId)).toEqual(["x"]);
    expect(renderStoreMapPanel(vm)).toContain("No coordinates");
  });

  it("degrades to ranked bars when no store has coordinates", () => {
    const stores = [store("x", null, null), store("y", null, null)];
    const byStore = new Map([
      ["x", stats(0.8, 0.9)],
      ["y", stats(0.2, 0.1)],
    ]);
    const vm = buildStoreMapViewModel("Customer Service", stores, byStore);
    expect(vm.mode).toBe("ranked");
    const html = renderStoreMapPanel(vm);
    expect(html).toContain("ranked-bars");
    expect(html.indexOf("Store x")).toBeLessThan(html.indexOf("Store y"));
  });
});

describe("rendering", () => {
  it("emits a clickable data-store handle per bubble", () => {
    const stores = [store("a", 40, -75), store("b", 41, -74)];
    const byStore = new Map([
      ["a", stats(0.5, 1)],
      ["b", stats(0.5, 0)],
    ]);
    const html = renderStoreMapPanel(buildStoreMapViewModel("Customer Service", stores, byStore));
    expect(html).toContain('data-store="a"');
    expect(html).toContain('data-store="b"');
    expect(html).toContain("#2e7d32"); // full-positive bubble is full green
  });

  it("ranked bars scale width with mention fraction", () => {
    const html = renderRankedBars([
      { storeId: "x", name: "X", mention: 0.75, sharePos: 0.5 },
      { storeId: "y", name: "Y", mention: 0.25, sharePos: 0.5 },
    ]);
    expect(html).toContain("width:75%");
    expect(html).toContain("width:25%");
  });
});
