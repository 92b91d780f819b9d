/** Typed payloads of the analytics API (schema version 1). */

export const API_SCHEMA_VERSION = 1;

export interface Versioned {
  schema_version: number;
}

export interface TaxonomyAttribute {
  name: string;
  features: string[];
}

export interface TaxonomyPayload extends Versioned {
  taxonomy: { attributes: TaxonomyAttribute[] };
}

export interface MetaPayload extends Versioned {
  snapshot_hash: string;
  built_at: string | null;
  counts: Record<string, number>;
  notes: string[];
}

export interface TrendPoint {
  period: number;
  item: string;
  mention: number;
  share_pos: number | null;
  share_neg: number | null;
  n_reviews: number;
  low_support: boolean;
}

export interface TrendsPayload extends Versioned {
  attribute: string;
  points: TrendPoint[];
  crossings: number[];
}

export interface StoreSummary {
  store_id: string;
  name: string;
  state: string;
  latitude: number | null;
  longitude: number | null;
  n_reviews: number;
  avg_stars: number | null;
}

export interface StoresPayload extends Versioned {
  stores: StoreSummary[];
}

export interface StoreItemStats {
  name: string;
  mention: number;
  n_mentions: number;
  share_pos: number | null;
  share_neg: number | null;
}

export interface StoreDetailPayload extends Versioned {
  store_id: string;
  attributes: StoreItemStats[];
  features: StoreItemStats[];
  snippets: string[];
}

export interface ModelItem {
  name: string;
  neutral: number | null;
  positive: number | null;
}

export interface ModelPayload extends Versioned {
  level: string;
  items: ModelItem[];
  r_squared: number;
  adj_r_squared: number;
  n_obs: number;
}

export interface ImportancePayload extends Versioned {
  importance: Record<string, number> | null;
}

export interface PerceptualMapPayload extends Versioned {
  map: {
    attributes: string[];
    loadings: number[][];
    variance_shares: number[];
    store_ids: string[];
    scores: number[][];
    quadrants: string[];
    dropped_columns: string[];
  } | null;
}

export interface StoreImpact {
  store_id: string;
  delta: number;
  n_reviews: number;
  n_mentions: number;
  revenue_low_pct: number;
  revenue_high_pct: number;
}

export interface SimulatePayload extends Versioned {
  feature: string;
  stores: StoreImpact[];
  mean: number;
  sd: number;
  min: number;
  max: number;
  histogram_bin_width: number;
  histogram: number[];
}

export interface DateRange {
  from?: number;
  to?: number;
}
