/** Wire types for the /v1 service API. Field names are the contract. */

export interface ChainAnchor {
  label: string;
  cumulative: number;
}

export interface CardChainDoc {
  domain: [number, number];
  precision: number;
  total: number;
  anchors: ChainAnchor[];
  gaps: number[];
}

export type EditKind = 'insert' | 'remove' | 'move';

export interface CardEditDoc {
  kind: EditKind;
  gap_index: number;
  count: number;
  target_gap_index?: number;
}

export type EditTarget = 'step1' | 'step2' | 'levels' | 'breakpoints';

export interface FuzzyClassDoc {
  label: string;
  breakpoints: [number, number][];
  core: [number, number];
  support: [number, number];
}

export interface PartitionDoc {
  bounds: [number, number];
  classes: FuzzyClassDoc[];
}

export interface SummaryDoc {
  n: number;
  min: number;
  max: number;
  mean: number;
  histogram: { bin_edges: number[]; counts: number[] };
  kde: { x: number[]; density: number[] };
  bandwidth: number;
}

export interface RefinementDoc {
  class_index: number;
  side: 'left' | 'right';
  interval: [number, number];
  levels: number[];
  breakpoints: number[];
  level_chain: CardChainDoc;
  breakpoint_chain: CardChainDoc;
}

export type Stage =
  | 'Created'
  | 'Step1Proposed'
  | 'Step1Committed'
  | 'Step2Proposed'
  | 'Step2Committed'
  | 'Step3InProgress'
  | 'Finalized';

export interface TranscriptRecord {
  stage: Stage;
  operation: string;
  payload: Record<string, unknown>;
  timestamp: string;
}

export interface SessionDoc {
  schema_version: number;
  id: string;
  created_at: string;
  stage: Stage;
  dataset: { values: number[]; bounds: [number, number]; dropped: number };
  params: Record<string, number | string>;
  step1_chain: CardChainDoc | null;
  step2_chain: CardChainDoc | null;
  active_refinement: RefinementDoc | null;
  proposed_centroids: number[] | null;
  validated_centroids: number[] | null;
  cores: [number, number][] | null;
  partition: PartitionDoc | null;
  transcript: TranscriptRecord[];
}

export interface AdvanceResponse {
  schema_version: number;
  stage: Stage;
  chain?: CardChainDoc;
  preview_partition?: PartitionDoc;
  summary?: SummaryDoc;
  refinement?: RefinementDoc;
}

export interface CommitResponse {
  schema_version: number;
  stage: Stage;
  centroids?: number[];
  cores?: [number, number][];
  partition?: PartitionDoc;
  class?: FuzzyClassDoc;
  transcript?: TranscriptRecord[];
}

export interface EditsResponse {
  schema_version: number;
  chain?: CardChainDoc;
  refinement?: RefinementDoc;
}

export interface PlotdataResponse {
  schema_version: number;
  stage: Stage;
  summary: SummaryDoc;
  partition: PartitionDoc | null;
}
