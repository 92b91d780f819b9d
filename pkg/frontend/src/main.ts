/** Browser bootstrap: thin DOM glue over the testable view-model modules. */

import { DashboardApi, SequenceGate } from "./api.js";
import { escapeHtml, formatShare } from "./format.js";
import { ViewState } from "./state.js";
import { buildStoreMapViewModel, renderStoreMapPanel } from "./storeMap.js";
import { buildTrendsViewModel, renderTrendsPanel, trendsErrorViewModel } from "./trends.js";
import { StoreItemStats } from "./types.js";
import { describeSimulationError, renderWhatIfPanel, runSimulation } from "./whatif.js";

const trendsGate = new SequenceGate();
const mapGate = new SequenceGate();

async function loadTrends(api: DashboardApi, state: ViewState, mount: HTMLElement) {
  const attribute = state.attribute;
  if (!attribute) return;
  const token = trendsGate.next();
  try {
    const payload = await api.trends(attribute);
    if (!trendsGate.isCurrent(token)) return; // stale: a newer request exists
    mount.innerHTML = renderTrendsPanel(buildTrendsViewModel(payload, state.range));
  } catch {
    if (!trendsGate.isCurrent(token)) return;
    mount.innerHTML = renderTrendsPanel(trendsErrorViewModel(attribute));
    mount.querySelector('[data-action="retry-trends"]')?.addEventListener("click", () => {
      void loadTrends(api, state, mount);
    });
  }
}

async function loadStoreMap(api: DashboardApi, state: ViewState, mount: HTMLElement) {
  const attribute = state.attribute;
  if (!attribute) return;
  const token = mapGate.next();
  const storesPayload = await api.stores();
  const stats = new Map<string, StoreItemStats | undefined>();
  for (const store of storesPayload.stores) {
    const detail = await api.storeDetail(store.store_id);
    stats.set(store.store_id, detail.attributes.find((a) => a.name === attribute));
  }
  if (!mapGate.isCurrent(token)) return;
  const vm = buildStoreMapViewModel(attribute, storesPayload.stores, stats);
  mount.innerHTML = renderStoreMapPanel(vm);
  for (const bubble of mount.querySelectorAll<SVGElement>("[data-store]")) {
    bubble.addEventListener("click", () => {
      void openDrilldown(api, bubble.dataset["store"]!, mount);
    });
  }
}

async function openDrilldown(api: DashboardApi, storeId: string, mount: HTMLElement) {
  const detail = await api.storeDetail(storeId);
  const rows = detail.features
    .map(
      (f) =>
        `<tr><td>${escapeHtml(f.name)}</td><td>${formatShare(f.mention)}</td>` +
        `<td>${formatShare(f.share_pos)}</td><td>${formatShare(f.share_neg)}</td></tr>`,
    )
    .join("");
  const snippets = detail.snippets
    .map((s) => `<blockquote>${escapeHtml(s)}</blockquote>`)
    .join("");
  const panel = document.createElement("div");
  panel.className = "drilldown";
  panel.innerHTML =
    `<h3>${escapeHtml(storeId)}</h3>` +
    `<table><thead><tr><th>Feature</th><th>Mention</th><th>Pos</th><th>Neg</th></tr></thead>` +
    `<tbody>${rows}</tbody></table>${snippets}`;
  mount.appendChild(panel);
}

export async function bootstrap(root: HTMLElement): Promise<void> {
  const api = new DashboardApi("");
  const [taxonomy, model] = await Promise.all([api.taxonomy(), api.model("feature")]);
  const state = new ViewState(taxonomy.taxonomy.attributes, model.items);

  root.innerHTML = `
    <header><h1>reviewlens dashboard</h1></header>
    <section>
      <label>Attribute
        <select id="attribute">${state
          .attributeNames()
          .map((n) => `<option>${escapeHtml(n)}</option>`)
          .join("")}</select>
      </label>
      <div id="trends"></div>
      <div id="store-map"></div>
    </section>
    <section>
      <label>Feature
        <select id="feature">${state
          .simulatableFeatures()
          .map((n) => `<option>${escapeHtml(n)}</option>`)
          .join("")}</select>
      </label>
      <button id="simulate">Simulate one-level improvement</button>
      <div id="whatif"></div>
    </section>`;

  const trendsMount = root.querySelector<HTMLElement>("#trends")!;
  const mapMount = root.querySelector<HTMLElement>("#store-map")!;
  const whatifMount = root.querySelector<HTMLElement>("#whatif")!;

  root.querySelector<HTMLSelectElement>("#attribute")!.addEventListener("change", (ev) => {
    state.setAttribute((ev.target as HTMLSelectElement).value);
    void loadTrends(api, state, trendsMount);
    void loadStoreMap(api, state, mapMount);
  });
  root.querySelector<HTMLButtonElement>("#simulate")!.addEventListener("click", () => {
    const feature = root.querySelector<HTMLSelectElement>("#feature")!.value;
    runSimulation(api, state, feature, state.scope ?? undefined)
      .then((panel) => {
        whatifMount.innerHTML = renderWhatIfPanel(panel);
      })
      .catch((error) => {
        whatifMount.innerHTML = `<p class="error">${escapeHtml(
          describeSimulationError(error),
        )}</p>`;
      });
  });

  await loadTrends(api, state, trendsMount);
  await loadStoreMap(api, state, mapMount);
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  void bootstrap(document.getElementById("app")!);
}
