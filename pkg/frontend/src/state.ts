/** UI state: paragraph selection, query composition, and result tracking.
 *
 * Responses are matched to the request that produced them by token; a
 * response arriving after a newer query was submitted is dropped, so the
 * result list always corresponds to the most recent query. A failed query
 * surfaces an error banner but keeps the previous results on screen.
 */

import type { Paragraph, ResultGroup } from "./api.js";

export interface UiState {
  lectureId: string | null;
  selectedParagraphs: number[];
  freeText: string;
  results: ResultGroup[] | null;
  lastQuery: string | null;
  selectedRank: number | null;
  error: string | null;
}

export function initialState(): UiState {
  return {
    lectureId: null,
    selectedParagraphs: [],
    freeText: "",
    results: null,
    lastQuery: null,
    selectedRank: null,
    error: null,
  };
}

/** Query text: selected paragraph bodies first (in reading order), then
 * any extra typed keywords. */
export function paragraphToQuery(
  paragraphs: Paragraph[],
  selectedIds: number[],
  extraText: string,
): string {
  const byId = new Map(paragraphs.map((p) => [p.paragraph_id, p.text]));
  const ordered = [...selectedIds].sort((a, b) => a - b);
  const parts = ordered
    .map((id) => byId.get(id))
    .filter((text): text is string => text !== undefined);
  const extra = extraText.trim();
  if (extra) parts.push(extra);
  return parts.join(" ");
}

export function canSubmit(selectedIds: number[], extraText: string): boolean {
  return selectedIds.length > 0 || extraText.trim().length > 0;
}

export class QueryTracker {
  private current = 0;

  /** Returns the token identifying the query being started. */
  begin(): number {
    return ++this.current;
  }

  isCurrent(token: number): boolean {
    return token === this.current;
  }
}

export class Store {
  state: UiState = initialState();
  private tracker = new QueryTracker();
  private listeners: Array<(state: UiState) => void> = [];

  subscribe(listener: (state: UiState) => void): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this.state);
  }

  toggleParagraph(id: number): void {
    const selected = this.state.selectedParagraphs;
    this.state.selectedParagraphs = selected.includes(id)
      ? selected.filter((x) => x !== id)
      : [...selected, id];
    this.emit();
  }

  setFreeText(text: string): void {
    this.state.freeText = text;
    this.emit();
  }

  setLecture(lectureId: string | null): void {
    this.state.lectureId = lectureId;
    this.state.selectedParagraphs = [];
    this.emit();
  }

  selectResult(rank: number | null): void {
    this.state.selectedRank = rank;
    this.emit();
  }

  beginQuery(text: string): number {
    this.state.lastQuery = text;
    this.state.selectedRank = null;
    return this.tracker.begin();
  }

  applyResults(token: number, groups: ResultGroup[]): boolean {
    if (!this.tracker.isCurrent(token)) return false; // stale response
    this.state.results = groups;
    this.state.error = null;
    this.emit();
    return true;
  }

  applyError(token: number, message: string): boolean {
    if (!this.tracker.isCurrent(token)) return false;
    this.state.error = message; // previous results stay on screen
    this.emit();
    return true;
  }
}
