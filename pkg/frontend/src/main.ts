// Bootstrap: tab navigation and DOM wiring around the pure modules.

import { ApiClient, ApiError } from "./api.js";
import { buildDashboard } from "./dashboard.js";
import {
  renderChat,
  renderChunkRow,
  renderIngestError,
  renderIngestStatus,
} from "./render.js";
import { applyFailure, applyReply, beginTurn, inputEnabled, newChat } from "./state.js";
import type { ChatViewState } from "./state.js";

const TURN_TIMEOUT_MS = 30_000;

const api = new ApiClient(
  new URLSearchParams(location.search).get("api") ?? "",
);

let chat: ChatViewState = newChat(`web-${Date.now().toString(36)}`);

function $(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el;
}

function repaintChat(): void {
  $("chat-log").innerHTML = renderChat(chat);
  const input = $("chat-input") as HTMLInputElement;
  const send = $("chat-send") as HTMLButtonElement;
  input.disabled = !inputEnabled(chat);
  send.disabled = !inputEnabled(chat);
  $("chat-log").querySelectorAll("[data-action=retry]").forEach((btn) => {
    btn.addEventListener("click", () => {
      if (chat.lastTranscript) void sendTurn(chat.lastTranscript, true);
    });
  });
  $("chat-log").scrollTop = $("chat-log").scrollHeight;
}

async function sendTurn(text: string, isRetry = false): Promise<void> {
  if (!isRetry) {
    chat = beginTurn(chat, text);
  } else {
    chat = { ...chat, pending: true };
  }
  repaintChat();
  const timeout = new Promise<never>((_, reject) =>
    setTimeout(() => reject(new Error("সময় শেষ — আবার চেষ্টা করুন")), TURN_TIMEOUT_MS),
  );
  try {
    const resp = await Promise.race([api.voiceTurn(chat.sessionId, text), timeout]);
    chat = applyReply(chat, resp);
  } catch (err) {
    chat = applyFailure(chat, err instanceof Error ? err.message : String(err));
  }
  repaintChat();
}

async function refreshChunks(): Promise<void> {
  const topic = ($("filter-topic") as HTMLInputElement).value.trim();
  const kind = ($("filter-kind") as HTMLSelectElement).value;
  try {
    const page = await api.chunks({
      topic: topic || undefined,
      source_kind: kind || undefined,
      limit: 50,
    });
    $("chunk-count").textContent = `${page.total} chunks`;
    $("chunk-rows").innerHTML = page.chunks.map(renderChunkRow).join("");
  } catch (err) {
    $("chunk-rows").innerHTML = `<tr><td colspan="5">${err}</td></tr>`;
  }
}

async function runIngest(): Promise<void> {
  const raw = ($("manifest-input") as HTMLTextAreaElement).value;
  const status = $("ingest-status");
  let documents: unknown[];
  try {
    documents = JSON.parse(raw);
  } catch (err) {
    status.innerHTML = renderIngestError(`manifest is not valid JSON: ${err}`);
    return;
  }
  status.textContent = "ingesting…";
  try {
    const result = await api.ingestDocuments(documents);
    status.innerHTML = renderIngestStatus(result);
    await refreshChunks();
  } catch (err) {
    status.innerHTML = renderIngestError(err instanceof ApiError ? err.detail : String(err));
  }
}

async function loadDashboard(): Promise<void> {
  try {
    const payload = await api.evalReport();
    $("dashboard-root").innerHTML = buildDashboard(payload);
  } catch (err) {
    if (err instanceof ApiError && err.status === 404) {
      $("dashboard-root").innerHTML = buildDashboard(null);
    } else {
      $("dashboard-root").textContent = String(err);
    }
  }
}

function showTab(name: string): void {
  document.querySelectorAll<HTMLElement>("[data-tab]").forEach((el) => {
    el.hidden = el.dataset.tab !== name;
  });
  document.querySelectorAll<HTMLElement>("nav button").forEach((btn) => {
    btn.classList.toggle("active", btn.dataset.target === name);
  });
  if (name === "admin") void refreshChunks();
  if (name === "dashboard") void loadDashboard();
}

export function bootstrap(): void {
  document.querySelectorAll<HTMLElement>("nav button").forEach((btn) => {
    btn.addEventListener("click", () => showTab(btn.dataset.target!));
  });
  $("chat-form").addEventListener("submit", (ev) => {
    ev.preventDefault();
    const input = $("chat-input") as HTMLInputElement;
    const text = input.value.trim();
    if (text && inputEnabled(chat)) {
      input.value = "";
      void sendTurn(text);
    }
  });
  $("ingest-run").addEventListener("click", () => void runIngest());
  $("filter-apply").addEventListener("click", () => void refreshChunks());
  void api
    .health()
    .then((h) => {
      $("health").textContent = `index ${h.index} · backend ${h.backend} · provider ${h.provider}`;
    })
    .catch(() => {
      $("health").textContent = "service unreachable";
    });
  repaintChat();
  showTab("chat");
}

if (typeof document !== "undefined") {
  document.addEventListener("DOMContentLoaded", bootstrap);
}
