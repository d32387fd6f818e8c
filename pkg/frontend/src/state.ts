// Chat view state and its pure transitions. Evidence attached to a turn is
// exactly what the webhook returned for that turn, untouched.

import type { EvidenceItem, SessionState, TurnKind, VoiceTurnResponse } from "./types.js";

export interface ChatTurn {
  role: "user" | "assistant";
  text: string;
  kind?: TurnKind;
  evidence: EvidenceItem[];
  flagged: string[];
  retryable?: boolean;
}

export interface ChatViewState {
  sessionId: string;
  turns: ChatTurn[];
  pending: boolean;
  sessionState: SessionState;
  lastTranscript: string | null;
}

export function newChat(sessionId: string): ChatViewState {
  return { sessionId, turns: [], pending: false, sessionState: "open", lastTranscript: null };
}

export function beginTurn(view: ChatViewState, text: string): ChatViewState {
  if (view.pending || !text.trim()) return view;
  return {
    ...view,
    pending: true,
    lastTranscript: text,
    turns: [...view.turns, { role: "user", text, evidence: [], flagged: [] }],
  };
}

export function applyReply(view: ChatViewState, resp: VoiceTurnResponse): ChatViewState {
  return {
    ...view,
    pending: false,
    sessionState: resp.state,
    turns: [
      ...view.turns,
      {
        role: "assistant",
        text: resp.reply,
        kind: resp.kind,
        evidence: resp.evidence,
        flagged: resp.flagged_sentences,
      },
    ],
  };
}

export function applyFailure(view: ChatViewState, message: string): ChatViewState {
  // Network failure: the session and prior turns stay; the turn becomes a
  // retryable error bubble.
  return {
    ...view,
    pending: false,
    turns: [
      ...view.turns,
      { role: "assistant", text: message, kind: "error", evidence: [], flagged: [], retryable: true },
    ],
  };
}

export function inputEnabled(view: ChatViewState): boolean {
  return !view.pending;
}
