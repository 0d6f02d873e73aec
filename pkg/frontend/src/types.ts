/** Wire types mirroring the service's JSON payloads. */

export type Pair = [string, number];

export interface RecommendationPayload {
  behavior_category: string;
  mode_scores: Record<string, number>;
  ranked_methods: string[];
  excluded: { method: string; rationale: string }[];
  deferred: { method: string; rationale: string }[];
}

export interface CatalogEntry {
  method_name: string;
  malle_category: string;
  tier: string;
}

export interface InstancePayload {
  id: string;
  embedding: number[];
  features: Record<string, number>;
  label: unknown;
  prediction: unknown;
  validated: boolean;
  metadata: Record<string, string>;
  timestamp: string;
}

export interface BundlePayload {
  query_id: string;
  prototypes: Pair[];
  criticisms: Pair[];
  counterfactual: Pair | null;
  influences: Pair[];
  attributions: Record<string, number>;
  attribution_base: number | null;
  attribution_prediction: number | null;
  rendered_text: string;
  neighbors: Record<string, Pair[]>;
  quadrant_importance: Record<string, [number, number]> | null;
  methods_used: string[];
}

export interface WhatIfResponse {
  rating: number;
  approved: boolean;
  delta: number;
}

export interface DecisionRecordPayload {
  id: string;
  query_embedding: number[];
  decision: string;
  justification: string;
  validator: string;
  validated: boolean;
  timestamp?: string;
}

export interface ServiceError {
  code: string;
  message: string;
  detail: string;
}
