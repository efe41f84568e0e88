// Pure view-model helpers: what actions a session allows and how it is
// presented. Keeping these free of DOM makes the review rules testable.

import type { SeriesPoint, Session, SessionState } from "./types.js";

export type BadgeTone = "idle" | "waiting" | "ok" | "bad" | "done";

const BADGES: Record<SessionState, BadgeTone> = {
  Described: "idle",
  PromptBuilt: "idle",
  Generated: "waiting",
  Approved: "waiting",
  Rejected: "bad",
  Executed: "waiting",
  Verified: "done",
  Failed: "bad",
};

export function badgeTone(state: SessionState): BadgeTone {
  return BADGES[state];
}

export function canGenerate(session: Session): boolean {
  return (
    session.state === "Described" ||
    session.state === "PromptBuilt" ||
    session.state === "Rejected"
  );
}

export function canReview(session: Session): boolean {
  return session.mode === "gated" && session.state === "Generated";
}

export function canExecute(session: Session): boolean {
  return session.mode === "gated"
    ? session.state === "Approved"
    : session.state === "Generated";
}

export function canVerify(session: Session): boolean {
  return session.state === "Executed";
}

/** Client-side gate: a rejection must carry a non-blank reason. */
export function validateRejection(reason: string): { ok: boolean; message: string } {
  if (reason.trim().length === 0) {
    return { ok: false, message: "A rejection needs a reason." };
  }
  return { ok: true, message: "" };
}

export function latestRunIndex(session: Session): number | null {
  if (session.runs.length === 0) return null;
  const last = session.runs[session.runs.length - 1];
  return last ? last.index : null;
}

export function describeFailure(session: Session): string {
  if (!session.failure) return "";
  return `${session.failure.error} during ${session.failure.stage}: ${session.failure.message}`;
}

/** Parse the service's series.csv (`series,x,y`, '.' decimals). */
export function parseSeriesCsv(text: string): SeriesPoint[] {
  const lines = text.split("\n").filter((line) => line.length > 0);
  if (lines[0] !== "series,x,y") {
    throw new Error(`unexpected CSV header: ${lines[0] ?? "<empty>"}`);
  }
  return lines.slice(1).map((line) => {
    const [series, x, y] = line.split(",");
    if (series === undefined || x === undefined || y === undefined) {
      throw new Error(`malformed CSV row: ${line}`);
    }
    return { series, x: Number(x), y: Number(y) };
  });
}

export function seriesNames(points: SeriesPoint[]): string[] {
  const names: string[] = [];
  for (const point of points) {
    if (!names.includes(point.series)) names.push(point.series);
  }
  return names;
}
