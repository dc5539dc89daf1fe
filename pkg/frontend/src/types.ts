/** JSON payload shapes exchanged with the papertab HTTP service. */

export interface CellView {
  text: string;
  empty: boolean;
}

export interface RecordScores {
  answer_relevancy: number | null;
  context_relevancy: number | null;
  faithfulness: number | null;
}

export type RecordFlag =
  | "empty_cells"
  | "low_relevance"
  | "unverified_span"
  | "degraded";

export interface RecordView {
  rid: number;
  doc_id: string;
  ordinal: number;
  cells: Record<string, CellView>;
  flags: RecordFlag[];
  scores: RecordScores | null;
}

export interface ColumnView {
  name: string;
  description: string;
  kind: string;
}

export interface QualityThresholds {
  answer_relevancy: number;
  context_relevancy: number;
  faithfulness: number;
}

export interface QualityView {
  missingness: number;
  column_inconsistency: Record<string, number | null>;
  record_scores: RecordScores[];
  thresholds: QualityThresholds;
}

export interface TableView {
  query_id: string;
  collection_id: string;
  revision: number;
  question: string;
  summary: string | null;
  degraded_docs: string[];
  schema: { columns: ColumnView[] };
  quality: QualityView | null;
  records: RecordView[];
}

export interface SpanView {
  chunk_id: string;
  char_start: number;
  char_end: number;
  matched_text: string;
}

export interface ContextChunkView {
  chunk_id: string;
  kind: string;
  raw_content: string;
  summary: string;
}

export interface ContextsView {
  rid: number;
  doc_id: string;
  contexts: ContextChunkView[];
  spans: Record<string, SpanView[]>;
  flags: RecordFlag[];
}

export type FrequencyTier = "low" | "medium" | "high";

export interface GroupPointView {
  x: number;
  y: number;
  cluster_id: number;
  frequency: number;
  variant: string;
  record_indices: number[];
}

export interface ClusterView {
  cluster_id: number;
  label: string;
  members: Record<string, number>;
  frequency_tier: FrequencyTier;
}

export interface GroupingView {
  column: string;
  points: GroupPointView[];
  clusters: ClusterView[];
  k: number;
}

export interface PlanPayload {
  column: string;
  groups: Record<string, string[]>;
  canonical: Record<string, string>;
}

export interface GroupsResponse {
  revision: number;
  plan: PlanPayload | null;
  grouping: GroupingView;
}

export interface ChangeEntryView {
  doc_id: string;
  column: string;
  old: string;
  new: string;
  record_index: number;
}

export interface ChangeReportView {
  column: string;
  changes: ChangeEntryView[];
  stale_variants: string[];
  skipped_groups: string[];
  inconsistency_before: number | null;
  inconsistency_after: number | null;
}

export interface ApplyPlanResponse {
  revision: number;
  report: ChangeReportView;
}

export type JobStatus = "queued" | "running" | "done" | "error";

export interface JobView {
  job_id: string;
  kind: string;
  collection_id: string;
  status: JobStatus;
  error: string | null;
  result: Record<string, unknown> | null;
}

export interface CreateCollectionResponse {
  collection_id: string;
}

export interface CollectionSummary {
  collection_id: string;
  documents: number;
  queries: string[];
  db_rows: number;
}

export interface CollectionsResponse {
  collections: CollectionSummary[];
}

export interface AddBundlesResponse {
  job_id: string;
  accepted_documents: string[];
}

export interface SubmitQueryResponse {
  job_id: string;
  query_id: string;
}

export interface EditCellResponse {
  revision: number;
}

export interface ClearFlagsResponse {
  revision: number;
  visible_flags: RecordFlag[];
}

export interface MergeResponse {
  revision: number;
  rows: number;
  columns: string[];
}
