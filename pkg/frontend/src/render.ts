// HTML renderers: pure string builders so the contract tests can run
// without a browser. Score spans carry the exact API value in data-value;
// the visible text is a fixed-width formatting of that same value.

import type { ChunkSummary, EvidenceItem, IngestResponse } from "./types.js";
import type { ChatTurn, ChatViewState } from "./state.js";

const esc = (s: string) =>
  s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");

function score(name: string, value: number): string {
  return (
    `<span class="score score-${name}" data-value="${value}">` +
    `${name} ${value.toFixed(3)}</span>`
  );
}

export function renderEvidenceCard(item: EvidenceItem): string {
  return [
    `<article class="evidence-card" data-chunk-id="${esc(item.chunk_id)}">`,
    `<header><code>${esc(item.chunk_id)}</code><span class="topic">${esc(item.topic)}</span></header>`,
    `<p class="snippet">${esc(item.text.slice(0, 240))}</p>`,
    '<footer class="scores">',
    score("fused", item.fused),
    score("semantic", item.semantic),
    score("lexical", item.lexical),
    score("boost", item.metadata_boost),
    "</footer>",
    "</article>",
  ].join("");
}

export function renderTurn(turn: ChatTurn): string {
  const kind = turn.kind ?? "plain";
  const classes = `bubble ${turn.role} ${kind}`;
  const parts = [`<div class="${classes}">`];
  if (turn.kind === "clarification") {
    parts.push('<span class="badge">স্পষ্টীকরণ প্রয়োজন</span>');
  }
  parts.push(`<p>${esc(turn.text)}</p>`);
  if (turn.flagged.length) {
    parts.push('<ul class="flagged">');
    for (const sentence of turn.flagged) {
      parts.push(`<li title="অপ্রমাণিত বাক্য">${esc(sentence)}</li>`);
    }
    parts.push("</ul>");
  }
  if (turn.retryable) {
    parts.push('<button class="retry" data-action="retry">আবার চেষ্টা করুন</button>');
  }
  if (turn.evidence.length) {
    parts.push('<section class="evidence">');
    parts.push(...turn.evidence.map(renderEvidenceCard));
    parts.push("</section>");
  }
  parts.push("</div>");
  return parts.join("");
}

export function renderChat(view: ChatViewState): string {
  const badge =
    view.sessionState === "awaiting_clarification"
      ? '<span class="state-badge awaiting">awaiting clarification</span>'
      : `<span class="state-badge">${view.sessionState}</span>`;
  return [
    `<div class="chat" data-session="${esc(view.sessionId)}">`,
    badge,
    ...view.turns.map(renderTurn),
    "</div>",
  ].join("");
}

export function renderChunkRow(chunk: ChunkSummary): string {
  return [
    `<tr data-chunk-id="${esc(chunk.chunk_id)}">`,
    `<td><code>${esc(chunk.chunk_id)}</code></td>`,
    `<td>${esc(chunk.topic)}</td>`,
    `<td>${esc(chunk.source_kind)}</td>`,
    `<td class="tokens" data-value="${chunk.token_count}">${chunk.token_count}</td>`,
    `<td class="snippet">${esc(chunk.snippet.slice(0, 120))}</td>`,
    "</tr>",
  ].join("");
}

export function renderIngestStatus(result: IngestResponse): string {
  return (
    `<p class="ingest-ok" data-chunks="${result.chunks}">` +
    `${result.documents} documents → ${result.chunks} chunks</p>`
  );
}

export function renderIngestError(detail: string): string {
  // Server error text is surfaced verbatim (escaped, not rephrased).
  return `<p class="ingest-error">${esc(detail)}</p>`;
}
