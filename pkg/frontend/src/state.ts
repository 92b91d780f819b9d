/**
 * Dashboard view state.
 *
 * Selections are validated against the taxonomy and fitted model fetched at
 * load, so the UI can never issue a request for an unknown attribute or a
 * feature the model has no coefficients for. The last two simulation
 * results are retained for side-by-side comparison.
 */

import { DateRange, ModelItem, SimulatePayload, TaxonomyAttribute } from "./types.js";

export class SelectionError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SelectionError";
  }
}

export class ViewState {
  private readonly attributes: TaxonomyAttribute[];
  private readonly modelItems: ModelItem[];
  private selectedAttribute: string | null = null;
  private selectedFeature: string | null = null;
  private dateRange: DateRange = {};
  private storeScope: string[] | null = null;
  private lastSimulation: SimulatePayload | null = null;
  private previousSimulation: SimulatePayload | null = null;

  constructor(attributes: TaxonomyAttribute[], modelItems: ModelItem[]) {
    this.attributes = attributes;
    this.modelItems = modelItems;
    if (attributes.length > 0) {
      this.selectedAttribute = attributes[0]!.name;
    }
  }

  attributeNames(): string[] {
    return this.attributes.map((a) => a.name);
  }

  simulatableFeatures(): string[] {
    return this.modelItems.map((m) => m.name);
  }

  hasFeature(feature: string): boolean {
    return this.modelItems.some((m) => m.name === feature);
  }

  setAttribute(name: string): void {
    if (!this.attributes.some((a) => a.name === name)) {
      throw new SelectionError(`attribute ${JSON.stringify(name)} is not in the taxonomy`);
    }
    this.selectedAttribute = name;
  }

  get attribute(): string | null {
    return this.selectedAttribute;
  }

  setFeature(name: string): void {
    if (!this.hasFeature(name)) {
      throw new SelectionError(
        `feature ${JSON.stringify(name)} is not in the fitted model`,
      );
    }
    this.selectedFeature = name;
  }

  get feature(): string | null {
    return this.selectedFeature;
  }

  setDateRange(range: DateRange): void {
    if (range.from !== undefined && range.to !== undefined && range.from > range.to) {
      throw new SelectionError("date range start is after its end");
    }
    this.dateRange = { ...range };
  }

  get range(): DateRange {
    return { ...this.dateRange };
  }

  setStoreScope(stores: string[] | null): void {
    this.storeScope = stores ? [...stores] : null;
  }

  get scope(): string[] | null {
    return this.storeScope ? [...this.storeScope] : null;
  }

  recordSimulation(result: SimulatePayload): void {
    this.previousSimulation = this.lastSimulation;
    this.lastSimulation = result;
  }

  get simulation(): SimulatePayload | null {
    return this.lastSimulation;
  }

  get comparison(): SimulatePayload | null {
    return this.previousSimulation;
  }
}
