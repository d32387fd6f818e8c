// Shapes of the advisory service REST API (see ../schemas in the repo root).

export interface EvidenceItem {
  chunk_id: string;
  text: string;
  topic: string;
  semantic: number;
  lexical: number;
  metadata_boost: number;
  fused: number;
}

export interface GroundingEntry {
  sentence: string;
  support: number;
  flagged: boolean;
}

export interface QueryResponse {
  answer: string;
  voice_answer: string;
  citations: string[];
  grounding: GroundingEntry[];
  disclaimer_added: boolean;
  evidence: EvidenceItem[];
  timings: Record<string, number>;
}

export type SessionState = "open" | "awaiting_clarification" | "closed";
export type TurnKind = "answer" | "clarification" | "error";

export interface VoiceTurnResponse {
  reply: string;
  voice_reply: string;
  state: SessionState;
  session_id: string;
  kind: TurnKind;
  citations: string[];
  evidence: EvidenceItem[];
  flagged_sentences: string[];
}

export interface ChunkSummary {
  chunk_id: string;
  doc_id: string;
  ordinal: number;
  token_count: number;
  topic: string;
  structural_position: number;
  source_kind: string;
  snippet: string;
}

export interface ChunksPage {
  total: number;
  offset: number;
  chunks: ChunkSummary[];
}

export interface ChunkDetail extends Omit<ChunkSummary, "snippet"> {
  text: string;
}

export interface IngestResponse {
  documents: number;
  chunks: number;
}

export interface HealthResponse {
  index: string;
  backend: string;
  provider: string;
}

export interface DistributionPlot {
  labels: string[];
  values: number[];
}

export interface RadarPlot {
  metrics: string[];
  candidate: number[];
  baseline: number[];
  composite: { candidate: number; baseline: number };
}

export interface GainsPlot {
  metrics: string[];
  values: number[];
}

export interface ScatterPlot {
  points: { question_id: string; similarity: number; composite: number }[];
}

export interface EvalReportPayload {
  report: Record<string, unknown>;
  plots: {
    distribution?: DistributionPlot;
    radar?: RadarPlot;
    gains?: GainsPlot;
    scatter?: ScatterPlot;
  };
}
