import { describe, expect, it } from "vitest";

import {
  badgeTone,
  canExecute,
  canGenerate,
  canReview,
  canVerify,
  describeFailure,
  latestRunIndex,
  parseSeriesCsv,
  seriesNames,
  validateRejection,
} from "../src/model.js";
import type { Session } from "../src/types.js";

function session(overrides: Partial<Session> = {}): Session {
  return {
    id: "abc123",
    mode: "gated",
    frontend: "llm",
    state: "Generated",
    description: "Simulate an inventory system for 10 days.",
    grammar_version: "1.0",
    created_at: "2026-01-01T00:00:00Z",
    prompt: null,
    prompt_meta: null,
    completion: null,
    backend_used: "mock",
    attempts: 1,
    artifact_kind: "spec",
    artifact_text: "## simspec v1\n",
    seed: 0,
    static_report: null,
    approvals: [],
    runs: [],
    reports: [],
    failure: null,
    ...overrides,
  };
}

describe("rejection guard", () => {
  it("blocks an empty reason", () => {
    expect(validateRejection("").ok).toBe(false);
    expect(validateRejection("   ").ok).toBe(false);
  });

  it("explains why it blocked", () => {
    expect(validateRejection("").message).toMatch(/reason/i);
  });

  it("passes a real reason through", () => {
    expect(validateRejection("lead time is wrong")).toEqual({ ok: true, message: "" });
  });
});

describe("action availability", () => {
  it("review only for gated sessions in Generated", () => {
    expect(canReview(session())).toBe(true);
    expect(canReview(session({ state: "Approved" }))).toBe(false);
    expect(canReview(session({ mode: "single_runtime" }))).toBe(false);
  });

  it("execute needs approval in gated mode", () => {
    expect(canExecute(session({ state: "Generated" }))).toBe(false);
    expect(canExecute(session({ state: "Approved" }))).toBe(true);
    expect(canExecute(session({ mode: "single_runtime", state: "Generated" }))).toBe(true);
  });

  it("generate from Described, PromptBuilt or Rejected", () => {
    expect(canGenerate(session({ state: "Described" }))).toBe(true);
    expect(canGenerate(session({ state: "Rejected" }))).toBe(true);
    expect(canGenerate(session({ state: "Verified" }))).toBe(false);
  });

  it("verify only after execution", () => {
    expect(canVerify(session({ state: "Executed" }))).toBe(true);
    expect(canVerify(session({ state: "Generated" }))).toBe(false);
  });
});

describe("badges", () => {
  it("maps every state to a tone", () => {
    expect(badgeTone("Verified")).toBe("done");
    expect(badgeTone("Failed")).toBe("bad");
    expect(badgeTone("Generated")).toBe("waiting");
    expect(badgeTone("Described")).toBe("idle");
  });
});

describe("run helpers", () => {
  it("finds the latest run", () => {
    const s = session({
      runs: [
        { index: 0, seed: 1, steps_used: 10, partial: false },
        { index: 1, seed: 2, steps_used: 12, partial: false },
      ],
    });
    expect(latestRunIndex(s)).toBe(1);
    expect(latestRunIndex(session())).toBeNull();
  });

  it("describes failures", () => {
    const s = session({
      failure: { stage: "generate", error: "UnrecognizedArtifact", message: "prose" },
    });
    expect(describeFailure(s)).toContain("UnrecognizedArtifact");
    expect(describeFailure(session())).toBe("");
  });
});

describe("series CSV", () => {
  it("parses the service format", () => {
    const points = parseSeriesCsv("series,x,y\non_hand,0,100\non_hand,1,87\n");
    expect(points).toEqual([
      { series: "on_hand", x: 0, y: 100 },
      { series: "on_hand", x: 1, y: 87 },
    ]);
    expect(seriesNames(points)).toEqual(["on_hand"]);
  });

  it("rejects foreign headers", () => {
    expect(() => parseSeriesCsv("a,b\n1,2\n")).toThrow(/header/);
  });
});
