// Thin fetch client. The console does no scoring or retrieval math: every
// number it shows originates from these responses or the report files.

import type {
  ChunkDetail,
  ChunksPage,
  EvalReportPayload,
  HealthResponse,
  IngestResponse,
  QueryResponse,
  VoiceTurnResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

export class ApiClient {
  constructor(private baseUrl: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await fetch(this.baseUrl + path, {
      headers: { "Content-Type": "application/json" },
      ...init,
    });
    const body = await res.json().catch(() => ({}));
    if (!res.ok) {
      throw new ApiError(res.status, String((body as { detail?: string }).detail ?? res.statusText));
    }
    return body as T;
  }

  health(): Promise<HealthResponse> {
    return this.request("/health");
  }

  query(question: string, k?: number): Promise<QueryResponse> {
    return this.request("/query", {
      method: "POST",
      body: JSON.stringify(k ? { question, k } : { question }),
    });
  }

  voiceTurn(sessionId: string, transcript: string): Promise<VoiceTurnResponse> {
    return this.request("/voice/turn", {
      method: "POST",
      body: JSON.stringify({ session_id: sessionId, transcript }),
    });
  }

  chunks(params: { topic?: string; source_kind?: string; offset?: number; limit?: number } = {}): Promise<ChunksPage> {
    const search = new URLSearchParams();
    if (params.topic) search.set("topic", params.topic);
    if (params.source_kind) search.set("source_kind", params.source_kind);
    if (params.offset) search.set("offset", String(params.offset));
    if (params.limit) search.set("limit", String(params.limit));
    const qs = search.toString();
    return this.request(`/chunks${qs ? "?" + qs : ""}`);
  }

  chunkDetail(chunkId: string): Promise<ChunkDetail> {
    return this.request(`/chunks/${encodeURIComponent(chunkId)}`);
  }

  ingestDocuments(documents: unknown[]): Promise<IngestResponse> {
    return this.request("/ingest", {
      method: "POST",
      body: JSON.stringify({ documents }),
    });
  }

  ingestManifestPath(manifestPath: string): Promise<IngestResponse> {
    return this.request("/ingest", {
      method: "POST",
      body: JSON.stringify({ manifest_path: manifestPath }),
    });
  }

  evalReport(): Promise<EvalReportPayload> {
    return this.request("/eval/report");
  }
}
