/** Pure view-model builders; the DOM layer only copies these onto elements.
 *
 * Result views preserve the response's rank order exactly: the service
 * already sorted groups by relevance and the client never re-sorts.
 */

import type { ResultGroup } from "./api.js";

export interface ResultView {
  rank: number;
  lectureId: string;
  timeSpan: string;
  score: string;
  snippet: string;
  unitIds: number[];
  startMs: number;
  endMs: number;
  mediaUrl?: string;
}

export function formatClock(ms: number): string {
  const totalSeconds = Math.floor(ms / 1000);
  const minutes = Math.floor(totalSeconds / 60);
  const seconds = totalSeconds % 60;
  return `${String(minutes).padStart(2, "0")}:${String(seconds).padStart(2, "0")}`;
}

export function formatTimeSpan(startMs: number, endMs: number): string {
  return `${formatClock(startMs)}–${formatClock(endMs)}`;
}

export function resultsToView(groups: ResultGroup[]): ResultView[] {
  return groups.map((g) => ({
    rank: g.rank,
    lectureId: g.lecture_id,
    timeSpan: formatTimeSpan(g.start_ms, g.end_ms),
    score: g.score.toFixed(3),
    snippet: g.snippet,
    unitIds: g.unit_ids,
    startMs: g.start_ms,
    endMs: g.end_ms,
    mediaUrl: g.media_url,
  }));
}

export const NO_MATCHES = "no matches";

/** Text for the results pane when a response has arrived. */
export function resultsPlaceholder(views: ResultView[]): string | null {
  return views.length === 0 ? NO_MATCHES : null;
}
