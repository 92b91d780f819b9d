import { describe, expect, it } from "vitest";

import { ApiError, DashboardApi, SequenceGate } from "../src/api.js";

function jsonResponse(body: unknown, status = 200) {
  return {
    ok: status >= 200 && status < 300,
    status,
    json: () => Promise.resolve(body),
  };
}

describe("DashboardApi", () => {
  it("deduplicates concurrent identical requests by key", async () => {
    let calls = 0;
    const api = new DashboardApi("http://x", async () => {
      calls += 1;
      await new Promise((r) => setTimeout(r, 5));
      return jsonResponse({ schema_version: 1, taxonomy: { attributes: [] } });
    });
    const [a, b, c] = await Promise.all([api.taxonomy(), api.taxonomy(), api.taxonomy()]);
    expect(calls).toBe(1);
    expect(a).toEqual(b);
    expect(b).toEqual(c);
  });

  it("does not share in-flight entries across different keys", async () => {
    const urls: string[] = [];
    const api = new DashboardApi("http://x", async (url) => {
      urls.push(url);
      return jsonResponse({ schema_version: 1, attribute: "A", points: [], crossings: [] });
    });
    await Promise.all([api.trends("A"), api.trends("B")]);
    expect(urls).toHaveLength(2);
  });

  it("issues a fresh request after the previous one settles", async () => {
    let calls = 0;
    const api = new DashboardApi("http://x", async () => {
      calls += 1;
      return jsonResponse({ schema_version: 1, taxonomy: { attributes: [] } });
    });
    await api.taxonomy();
    await api.taxonomy();
    expect(calls).toBe(2);
  });

  it("rejects payloads with the wrong schema version", async () => {
    const api = new DashboardApi("http://x", async () =>
      jsonResponse({ schema_version: 99, taxonomy: { attributes: [] } }),
    );
    await expect(api.taxonomy()).rejects.toThrow(/schema version/);
  });

  it("surfaces field errors from a 400 simulate response", async () => {
    const api = new DashboardApi("http://x", async () =>
      jsonResponse({ field_errors: { feature: "unknown feature 'X'" } }, 400),
    );
    const error = await api.simulate("X").catch((e: unknown) => e);
    expect(error).toBeInstanceOf(ApiError);
    expect((error as ApiError).status).toBe(400);
    expect((error as ApiError).fieldErrors["feature"]).toMatch(/unknown feature/);
  });

  it("sends the store scope only when provided", async () => {
    const bodies: (string | undefined)[] = [];
    const api = new DashboardApi("http://x", async (_url, init) => {
      bodies.push(init?.body);
      return jsonResponse({
        schema_version: 1,
        feature: "F",
        stores: [],
        mean: 0,
        sd: 0,
        min: 0,
        max: 0,
        histogram_bin_width: 0.05,
        histogram: [],
      });
    });
    await api.simulate("F");
    await api.simulate("F", ["s1"]);
    expect(JSON.parse(bodies[0]!)).toEqual({ feature: "F" });
    expect(JSON.parse(bodies[1]!)).toEqual({ feature: "F", stores: ["s1"] });
  });
});

describe("SequenceGate", () => {
  it("marks older tokens stale once a newer request is issued", () => {
    const gate = new SequenceGate();
    const first = gate.next();
    expect(gate.isCurrent(first)).toBe(true);
    const second = gate.next();
    expect(gate.isCurrent(first)).toBe(false);
    expect(gate.isCurrent(second)).toBe(true);
  });
});
