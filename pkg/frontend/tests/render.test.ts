import { describe, expect, it } from "vitest";

import {
  renderChat,
  renderChunkRow,
  renderEvidenceCard,
  renderIngestError,
  renderIngestStatus,
  renderTurn,
} from "../src/render.js";
import { applyReply, beginTurn, newChat } from "../src/state.js";
import type { ChunksPage, IngestResponse, VoiceTurnResponse } from "../src/types.js";
import { fixture } from "./helpers.js";

const answer = fixture<VoiceTurnResponse>("voice_turn_answer.json");
const clarification = fixture<VoiceTurnResponse>("voice_turn_clarification.json");
const chunksPage = fixture<ChunksPage>("chunks_page.json");
const ingest = fixture<IngestResponse>("ingest_response.json");
const ingestError = fixture<{ status: number; detail: string }>("ingest_error.json");

describe("evidence cards", () => {
  it("carry the exact API scores in data-value attributes", () => {
    for (const item of answer.evidence) {
      const html = renderEvidenceCard(item);
      expect(html).toContain(`data-chunk-id="${item.chunk_id}"`);
      expect(html).toContain(`data-value="${item.fused}"`);
      expect(html).toContain(`data-value="${item.semantic}"`);
      expect(html).toContain(`data-value="${item.lexical}"`);
      expect(html).toContain(`data-value="${item.metadata_boost}"`);
    }
  });
});

describe("chat rendering", () => {
  it("renders the answer bubble with at least one evidence card", () => {
    let view = newChat("demo");
    view = beginTurn(view, "ধানের জমিতে সেচ কখন দিতে হবে");
    view = applyReply(view, answer);
    const html = renderChat(view);
    expect(html).toContain(answer.reply.slice(0, 30));
    const cards = html.match(/evidence-card/g) ?? [];
    expect(cards.length).toBe(answer.evidence.length);
    expect(cards.length).toBeGreaterThanOrEqual(1);
  });

  it("renders clarifications as a distinct state with badge", () => {
    let view = newChat("amb");
    view = beginTurn(view, "রোগ দমনে করণীয় কী");
    view = applyReply(view, clarification);
    const html = renderChat(view);
    expect(html).toContain("state-badge awaiting");
    expect(html).toContain("bubble assistant clarification");
    expect(html).toContain("স্পষ্টীকরণ প্রয়োজন");
  });

  it("renders errors with a retry affordance", () => {
    const html = renderTurn({
      role: "assistant",
      text: "network down",
      kind: "error",
      evidence: [],
      flagged: [],
      retryable: true,
    });
    expect(html).toContain('data-action="retry"');
    expect(html).toContain("bubble assistant error");
  });
});

describe("corpus admin rendering", () => {
  it("chunk rows show the API token_count verbatim", () => {
    for (const chunk of chunksPage.chunks) {
      const html = renderChunkRow(chunk);
      expect(html).toContain(`data-value="${chunk.token_count}"`);
      expect(html).toContain(`>${chunk.token_count}<`);
    }
  });

  it("ingest status shows the counts returned by the service", () => {
    const html = renderIngestStatus(ingest);
    expect(html).toContain(`data-chunks="${ingest.chunks}"`);
    expect(html).toContain(`${ingest.documents} documents`);
  });

  it("server-side ingest errors are surfaced verbatim", () => {
    expect(ingestError.status).toBe(400);
    const html = renderIngestError(ingestError.detail);
    const unescaped = html.replace(/&quot;/g, '"').replace(/&#39;|&apos;/g, "'");
    expect(unescaped).toContain(ingestError.detail.slice(0, 40));
  });
});
