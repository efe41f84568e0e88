// HTML renderers. Pure string -> string so they are testable without a DOM;
// app.ts owns mounting and event wiring. Every displayed value comes from an
// API response.

import type { ReportBundle, SeriesPoint, Session, ValidationReport } from "./types.js";
import { badgeTone, describeFailure, latestRunIndex, seriesNames } from "./model.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

export function stateBadge(session: Session): string {
  const tone = badgeTone(session.state);
  return `<span class="badge badge-${tone}" data-state="${session.state}">${session.state}</span>`;
}

export function renderBoardRow(session: Session): string {
  const description = escapeHtml(
    session.description.length > 80
      ? session.description.slice(0, 77) + "..."
      : session.description,
  );
  return (
    `<tr class="session-row" data-session-id="${session.id}">` +
    `<td class="mono"><a href="#/session/${session.id}">${session.id}</a></td>` +
    `<td>${stateBadge(session)}</td>` +
    `<td>${session.mode}</td>` +
    `<td>${session.frontend}</td>` +
    `<td class="desc">${description}</td>` +
    `</tr>`
  );
}

export function renderBoard(sessions: Session[]): string {
  if (sessions.length === 0) {
    return `<p class="empty-state">No sessions yet. Submit a description above.</p>`;
  }
  const rows = sessions.map(renderBoardRow).join("");
  return (
    `<table class="board"><thead><tr>` +
    `<th>session</th><th>state</th><th>mode</th><th>frontend</th><th>description</th>` +
    `</tr></thead><tbody>${rows}</tbody></table>`
  );
}

export function renderReport(title: string, report: ValidationReport): string {
  const rows = report.checks
    .map(
      (check) =>
        `<tr><td class="mono">${escapeHtml(check.check_id)}</td>` +
        `<td><span class="check-${check.status}">${check.status}</span></td>` +
        `<td class="detail">${escapeHtml(check.detail)}</td></tr>`,
    )
    .join("");
  return (
    `<div class="report"><h4>${escapeHtml(title)} ` +
    `<span class="check-${report.overall}">${report.overall}</span></h4>` +
    `<table><tbody>${rows}</tbody></table></div>`
  );
}

export function renderReviewPanel(session: Session): string {
  const prompt = session.prompt
    ? `<div class="pane"><h4>prompt</h4><pre>${escapeHtml(session.prompt)}</pre></div>`
    : "";
  const completion = session.completion
    ? `<div class="pane"><h4>completion</h4><pre>${escapeHtml(session.completion)}</pre></div>`
    : "";
  const artifact = session.artifact_text
    ? `<div class="pane"><h4>parsed artifact (${session.artifact_kind})</h4>` +
      `<pre>${escapeHtml(session.artifact_text)}</pre></div>`
    : "";
  const staticReport = session.static_report
    ? renderReport("static checks", session.static_report)
    : "";
  return (
    `<section class="review" data-session-id="${session.id}">` +
    `<div class="side-by-side">${prompt}${completion}</div>${artifact}${staticReport}` +
    `<div class="decision">` +
    `<button id="approve-btn" data-testid="approve">Approve</button>` +
    `<input id="reject-reason" placeholder="reason (required to reject)" />` +
    `<button id="reject-btn" data-testid="reject">Reject</button>` +
    `<p id="decision-error" class="error" role="alert"></p>` +
    `</div></section>`
  );
}

export function renderSeriesTable(points: SeriesPoint[], limit = 400): string {
  const names = seriesNames(points);
  const shown = points.slice(0, limit);
  const rows = shown
    .map((p) => `<tr><td>${escapeHtml(p.series)}</td><td>${p.x}</td><td>${p.y}</td></tr>`)
    .join("");
  const more =
    points.length > limit
      ? `<p class="note">showing ${limit} of ${points.length} points</p>`
      : "";
  return (
    `<div class="series"><h4>recorded series (${names.join(", ")})</h4>` +
    `<table><thead><tr><th>series</th><th>x</th><th>y</th></tr></thead>` +
    `<tbody>${rows}</tbody></table>${more}</div>`
  );
}

export function renderRunPanel(
  session: Session,
  plotUrl: string | null,
  points: SeriesPoint[] | null,
  reports: ReportBundle | null,
): string {
  const run = latestRunIndex(session);
  if (run === null) {
    return session.failure
      ? `<p class="error">${escapeHtml(describeFailure(session))}</p>`
      : `<p class="empty-state">No runs yet.</p>`;
  }
  // the server-rendered SVG is the verified artifact: shown as-is, never re-plotted
  const plot = plotUrl
    ? `<div class="pane"><h4>plot</h4><img id="run-plot" src="${plotUrl}" alt="run plot" /></div>`
    : "";
  const table = points ? renderSeriesTable(points) : "";
  const reportHtml = reports
    ? reports.reports.map((r) => renderReport(`${r.kind} report`, r)).join("")
    : "";
  const failure = session.failure
    ? `<p class="error">${escapeHtml(describeFailure(session))}</p>`
    : "";
  return `<section class="run">${failure}${plot}${table}${reportHtml}</section>`;
}

export function renderSessionHeader(session: Session): string {
  return (
    `<header class="session-header">` +
    `<a href="#/">&larr; board</a>` +
    `<h2 class="mono">${session.id} ${stateBadge(session)}</h2>` +
    `<p class="desc">${escapeHtml(session.description)}</p>` +
    `</header>`
  );
}
