// DOM wiring: hash routing between the session board and a session view,
// polling refresh, and the action buttons. All state changes go through the
// SimforgeClient POST helpers.

import { ApiError, SimforgeClient } from "./api.js";
import {
  canExecute,
  canGenerate,
  canReview,
  canVerify,
  latestRunIndex,
  parseSeriesCsv,
  validateRejection,
} from "./model.js";
import {
  renderBoard,
  renderReviewPanel,
  renderRunPanel,
  renderSessionHeader,
  escapeHtml,
} from "./render.js";
import type { Session } from "./types.js";

const POLL_MS = 2000;

export class App {
  private pollTimer: number | null = null;

  constructor(
    private readonly client: SimforgeClient,
    private readonly root: HTMLElement,
    private readonly banner: HTMLElement,
  ) {}

  start(): void {
    window.addEventListener("hashchange", () => void this.route());
    void this.route();
    this.pollTimer = window.setInterval(() => void this.route(true), POLL_MS);
  }

  stop(): void {
    if (this.pollTimer !== null) window.clearInterval(this.pollTimer);
  }

  private sessionIdFromHash(): string | null {
    const match = window.location.hash.match(/^#\/session\/([0-9a-f]+)$/);
    return match ? match[1] ?? null : null;
  }

  async route(isPoll = false): Promise<void> {
    try {
      const id = this.sessionIdFromHash();
      if (id) {
        await this.showSession(id);
      } else {
        await this.showBoard(isPoll);
      }
      this.banner.hidden = true;
    } catch (error) {
      // API unreachable: banner, keep the last view
      this.banner.hidden = false;
      this.banner.textContent =
        error instanceof ApiError
          ? `API error: ${error.message}`
          : "API unreachable - is the simforge service running?";
    }
  }

  private async showBoard(isPoll: boolean): Promise<void> {
    const sessions = await this.client.listSessions();
    const board = document.getElementById("board");
    if (!board) return;
    board.innerHTML = renderBoard(sessions);
    const form = document.getElementById("submit-form");
    if (form && !isPoll) form.hidden = false;
  }

  private async showSession(id: string): Promise<void> {
    const session = await this.client.getSession(id);
    const parts: string[] = [renderSessionHeader(session)];

    if (canGenerate(session)) {
      parts.push(`<button id="generate-btn">Generate</button>`);
    }
    if (canReview(session)) {
      parts.push(renderReviewPanel(session));
    }
    if (canExecute(session)) {
      parts.push(`<button id="execute-btn">Execute</button>`);
    }
    if (canVerify(session)) {
      parts.push(`<button id="verify-btn">Verify</button>`);
    }

    const run = latestRunIndex(session);
    let points = null;
    let reports = null;
    if (run !== null && (session.state === "Executed" || session.state === "Verified")) {
      points = parseSeriesCsv(await this.client.seriesCsv(id, run));
      reports = session.reports.length > 0 ? await this.client.reports(id) : null;
    }
    parts.push(
      renderRunPanel(session, run !== null ? this.client.plotUrl(id, run) : null, points, reports),
    );

    this.root.innerHTML = parts.join("\n");
    this.wireActions(session);
  }

  private wireActions(session: Session): void {
    const refresh = () => void this.route();
    document.getElementById("generate-btn")?.addEventListener("click", () => {
      void this.client.generate(session.id).then(refresh, (e) => this.showActionError(e));
    });
    document.getElementById("execute-btn")?.addEventListener("click", () => {
      void this.client.execute(session.id).then(refresh, (e) => this.showActionError(e));
    });
    document.getElementById("verify-btn")?.addEventListener("click", () => {
      void this.client.verify(session.id, "expert").then(refresh, (e) => this.showActionError(e));
    });
    document.getElementById("approve-btn")?.addEventListener("click", () => {
      void this.client
        .approve(session.id, "expert", "")
        .then(refresh, (e) => this.showActionError(e));
    });
    document.getElementById("reject-btn")?.addEventListener("click", () => {
      const input = document.getElementById("reject-reason") as HTMLInputElement | null;
      const errorLine = document.getElementById("decision-error");
      const reason = input?.value ?? "";
      const verdict = validateRejection(reason);
      if (!verdict.ok) {
        // blocked client-side: the request is never sent without a reason
        if (errorLine) errorLine.textContent = verdict.message;
        return;
      }
      void this.client
        .reject(session.id, "expert", reason)
        .then(refresh, (e) => this.showActionError(e));
    });
  }

  private showActionError(error: unknown): void {
    const errorLine = document.getElementById("decision-error") ?? this.banner;
    errorLine.textContent =
      error instanceof ApiError ? error.message : "action failed; refresh and retry";
    if (errorLine === this.banner) this.banner.hidden = false;
  }
}

export function wireSubmitForm(client: SimforgeClient, onSubmitted: () => void): void {
  const form = document.getElementById("submit-form") as HTMLFormElement | null;
  if (!form) return;
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const description = (document.getElementById("new-description") as HTMLTextAreaElement).value;
    const mode = (document.getElementById("new-mode") as HTMLSelectElement).value;
    const frontend = (document.getElementById("new-frontend") as HTMLSelectElement).value;
    const errorLine = document.getElementById("submit-error");
    void client.submit(description, mode, frontend).then(
      (session) => {
        window.location.hash = `#/session/${session.id}`;
        onSubmitted();
      },
      (error) => {
        if (errorLine) {
          errorLine.textContent =
            error instanceof ApiError ? escapeHtml(error.message) : "submit failed";
        }
      },
    );
  });
}
