/** DOM wiring: textbook on the left, query box and ranked results on the
 * right, transcript highlight below the selected result. */

import { ServiceClient, ServiceError, type Paragraph } from "./api.js";
import { canSubmit, paragraphToQuery, Store } from "./state.js";
import { resultsPlaceholder, resultsToView, type ResultView } from "./render.js";

const client = new ServiceClient("");
const store = new Store();
let paragraphs: Paragraph[] = [];

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

async function loadLectures(): Promise<void> {
  const lectures = await client.lectures();
  const select = el<HTMLSelectElement>("lecture-select");
  select.innerHTML = "";
  for (const lecture of lectures) {
    const option = document.createElement("option");
    option.value = lecture.lecture_id;
    option.textContent = `${lecture.lecture_id} (${lecture.n_units} units)`;
    select.appendChild(option);
  }
  if (lectures.length) {
    await selectLecture(lectures[0].lecture_id);
  }
}

async function selectLecture(lectureId: string): Promise<void> {
  store.setLecture(lectureId);
  paragraphs = await client.textbook(lectureId);
  const pane = el<HTMLDivElement>("textbook");
  pane.innerHTML = "";
  for (const paragraph of paragraphs) {
    const div = document.createElement("div");
    div.className = "paragraph";
    div.textContent = paragraph.text;
    div.onclick = () => {
      store.toggleParagraph(paragraph.paragraph_id);
      div.classList.toggle("selected");
      syncSubmit();
    };
    pane.appendChild(div);
  }
}

function syncSubmit(): void {
  el<HTMLButtonElement>("submit").disabled = !canSubmit(
    store.state.selectedParagraphs,
    el<HTMLInputElement>("free-text").value,
  );
}

async function submitQuery(): Promise<void> {
  const extra = el<HTMLInputElement>("free-text").value;
  const text = paragraphToQuery(paragraphs, store.state.selectedParagraphs, extra);
  const token = store.beginQuery(text);
  try {
    const response = await client.query(text, {
      lecture: store.state.lectureId ?? undefined,
    });
    if (store.applyResults(token, response.groups)) renderResults();
  } catch (err) {
    const message = err instanceof ServiceError ? err.message : String(err);
    if (store.applyError(token, message)) renderError();
  }
}

function renderError(): void {
  const banner = el<HTMLDivElement>("error-banner");
  banner.textContent = store.state.error ?? "";
  banner.hidden = !store.state.error;
}

function renderResults(): void {
  renderError();
  const views = resultsToView(store.state.results ?? []);
  const list = el<HTMLOListElement>("results");
  list.innerHTML = "";
  const placeholder = el<HTMLDivElement>("placeholder");
  const empty = resultsPlaceholder(views);
  placeholder.textContent = empty ?? "";
  placeholder.hidden = empty === null;
  views.forEach((view) => {
    const item = document.createElement("li");
    item.className = "result";
    item.innerHTML =
      `<span class="span">${view.timeSpan}</span> ` +
      `<span class="score">${view.score}</span> ` +
      `<span class="lecture">${view.lectureId}</span>` +
      `<div class="snippet"></div>`;
    (item.querySelector(".snippet") as HTMLDivElement).textContent = view.snippet;
    item.onclick = () => showTranscript(view);
    list.appendChild(item);
  });
}

async function showTranscript(view: ResultView): Promise<void> {
  store.selectResult(view.rank);
  const units = await client.units(
    view.lectureId,
    view.unitIds[0],
    view.unitIds[view.unitIds.length - 1] + 1,
  );
  const pane = el<HTMLDivElement>("transcript");
  pane.innerHTML = "";
  const header = document.createElement("div");
  header.className = "transcript-header";
  header.textContent = `${view.lectureId} ${view.timeSpan}`;
  pane.appendChild(header);
  for (const unit of units) {
    const row = document.createElement("div");
    row.className = "unit highlight";
    row.textContent = `[${unit.unit_id}] ${unit.text}`;
    pane.appendChild(row);
  }
  if (view.mediaUrl) {
    const link = document.createElement("a");
    link.href = view.mediaUrl;
    link.target = "_blank";
    link.textContent = "play from here";
    pane.appendChild(link);
  }
}

function wire(): void {
  el<HTMLSelectElement>("lecture-select").onchange = (event) => {
    void selectLecture((event.target as HTMLSelectElement).value);
  };
  el<HTMLInputElement>("free-text").oninput = syncSubmit;
  el<HTMLButtonElement>("submit").onclick = () => void submitQuery();
  syncSubmit();
  void loadLectures();
}

document.addEventListener("DOMContentLoaded", wire);
