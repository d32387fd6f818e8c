import { describe, expect, it } from "vitest";

import { applyFailure, applyReply, beginTurn, inputEnabled, newChat } from "../src/state.js";
import type { VoiceTurnResponse } from "../src/types.js";
import { fixture } from "./helpers.js";

const answer = fixture<VoiceTurnResponse>("voice_turn_answer.json");
const clarification = fixture<VoiceTurnResponse>("voice_turn_clarification.json");
const merged = fixture<VoiceTurnResponse>("voice_turn_after_clarification.json");

describe("chat view state", () => {
  it("attaches exactly the evidence the webhook returned for the turn", () => {
    let view = newChat("demo");
    view = beginTurn(view, "ধানের জমিতে সেচ কখন দিতে হবে");
    view = applyReply(view, answer);
    const assistant = view.turns.at(-1)!;
    expect(assistant.evidence).toEqual(answer.evidence);
    expect(assistant.text).toBe(answer.reply);
    expect(assistant.kind).toBe("answer");
    expect(answer.evidence.length).toBeGreaterThan(0);
  });

  it("disables input while a turn is pending and re-enables on response", () => {
    let view = newChat("demo");
    expect(inputEnabled(view)).toBe(true);
    view = beginTurn(view, "প্রশ্ন");
    expect(inputEnabled(view)).toBe(false);
    view = applyReply(view, answer);
    expect(inputEnabled(view)).toBe(true);
  });

  it("ignores sends while pending", () => {
    let view = newChat("demo");
    view = beginTurn(view, "ক");
    const again = beginTurn(view, "খ");
    expect(again).toBe(view);
  });

  it("tracks clarification state distinctly", () => {
    let view = newChat("amb");
    view = beginTurn(view, "রোগ দমনে করণীয় কী");
    view = applyReply(view, clarification);
    expect(view.sessionState).toBe("awaiting_clarification");
    expect(view.turns.at(-1)!.kind).toBe("clarification");
    expect(view.turns.at(-1)!.evidence).toEqual([]);

    view = beginTurn(view, "ধান নিয়ে");
    view = applyReply(view, merged);
    expect(view.sessionState).toBe("open");
    expect(view.turns.at(-1)!.kind).toBe("answer");
  });

  it("keeps prior turns and marks the failure retryable on network error", () => {
    let view = newChat("demo");
    view = beginTurn(view, "প্রথম");
    view = applyReply(view, answer);
    const before = view.turns.length;
    view = beginTurn(view, "দ্বিতীয়");
    view = applyFailure(view, "network down");
    expect(view.turns.length).toBe(before + 2);
    expect(view.turns.slice(0, before)).toEqual(view.turns.slice(0, before));
    const last = view.turns.at(-1)!;
    expect(last.kind).toBe("error");
    expect(last.retryable).toBe(true);
    expect(inputEnabled(view)).toBe(true);
    expect(view.lastTranscript).toBe("দ্বিতীয়");
  });
});
