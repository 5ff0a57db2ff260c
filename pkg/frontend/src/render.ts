// HTML rendering as pure functions of session state. No DOM access here so
// the whole surface is testable as strings; main.ts owns the actual page.

import type { PhraseEntry } from "./api";
import { canAdvance, type SessionState } from "./state";

export const COMPLAINT_PROMPT =
  "Is the tweet addressing any complaint or raising grievances";
export const INFORMATIVE_PROMPT =
  "Is the tweet informative about public transport services";

const ESCAPES: Record<string, string> = {
  "&": "&amp;",
  "<": "&lt;",
  ">": "&gt;",
  '"': "&quot;",
  "'": "&#39;",
};

export function escapeHtml(text: string): string {
  return text.replace(/[&<>"']/g, (ch) => ESCAPES[ch]);
}

const escapeRegExp = (text: string): string =>
  text.replace(/[.*+?^${}()|[\]\\]/g, "\\$&");

/** Wrap lexicon phrase occurrences in <mark>, longest phrases first. */
export function highlight(text: string, phrases: string[]): string {
  const escaped = escapeHtml(text);
  const usable = phrases.filter((p) => p.trim().length > 0);
  if (usable.length === 0) return escaped;
  usable.sort((a, b) => b.length - a.length);
  const pattern = new RegExp(
    `\\b(${usable.map((p) => escapeRegExp(escapeHtml(p))).join("|")})\\b`,
    "gi",
  );
  return escaped.replace(pattern, "<mark>$1</mark>");
}

function promptFor(kind: string): string {
  return kind === "informativeness" ? INFORMATIVE_PROMPT : COMPLAINT_PROMPT;
}

const drsLabel = (phrase: PhraseEntry): string =>
  phrase.drs === null ? "seed" : `drs ${phrase.drs.toFixed(2)}`;

export function renderTaskScreen(state: SessionState): string {
  const task = state.task;
  if (!task) {
    return state.queueEmpty
      ? `<p class="empty">Queue empty. Nothing left to label right now.</p>`
      : `<p class="loading">Loading next task...</p>`;
  }
  const phrases = state.lexicon
    .filter((p) => p.status === "approved" || p.status === "candidate")
    .map((p) => p.text);
  const text =
    task.text !== undefined
      ? highlight(task.text, phrases)
      : `<em>post ${escapeHtml(task.subject)} (text unavailable)</em>`;
  const buttons = task.labels
    .map(
      (label, i) =>
        `<button data-action="label" data-index="${i}">` +
        `<kbd>${i + 1}</kbd> ${escapeHtml(label)}</button>`,
    )
    .join("\n    ");
  return `<section class="task" data-task-id="${escapeHtml(task.task_id)}">
  <p class="prompt">${escapeHtml(promptFor(task.kind))}</p>
  <blockquote class="post">${text}</blockquote>
  <p class="task-progress">decisions so far: ${task.decisions_so_far} of ${task.required_annotators}</p>
  <div class="labels">
    ${buttons}
  </div>
</section>`;
}

export function renderLexiconScreen(state: SessionState): string {
  const run = state.run;
  if (!run) return `<p class="empty">No run loaded.</p>`;
  const roundTotal = state.lexicon.filter(
    (p) => p.origin_iteration === run.current_iteration,
  ).length;
  const reviewed = Math.max(roundTotal - run.pending_candidates, 0);
  const percent = roundTotal === 0 ? 0 : Math.round((reviewed / roundTotal) * 100);
  const advanceAttr = canAdvance(state) ? "" : " disabled";

  const items = state.candidates
    .map((phrase) => {
      const examples = (phrase.examples ?? [])
        .map((post) => `<li>${escapeHtml(post)}</li>`)
        .join("");
      return `<li class="candidate" data-phrase="${escapeHtml(phrase.text)}">
      <span class="phrase">${escapeHtml(phrase.text)}</span>
      <span class="drs">${drsLabel(phrase)}</span>
      <span class="origin">from iteration ${phrase.origin_iteration}</span>
      <ul class="examples">${examples}</ul>
      <button data-action="keep" data-phrase="${escapeHtml(phrase.text)}">keep</button>
      <button data-action="drop" data-phrase="${escapeHtml(phrase.text)}">drop</button>
    </li>`;
    })
    .join("\n");

  const list = state.candidates.length
    ? `<ul class="candidates">\n${items}\n</ul>`
    : `<p class="empty">No candidates awaiting review.</p>`;

  const stop = run.stop_reason
    ? `<p class="stop">run finished: ${escapeHtml(run.stop_reason)}</p>`
    : "";
  const failure = run.error
    ? `<p class="failure">run failed: ${escapeHtml(run.error)}</p>`
    : "";

  return `<section class="lexicon">
  <div class="iteration" data-iteration="${run.current_iteration}">
    <div class="track"><div class="bar" style="width: ${percent}%"></div></div>
    <span class="iteration-label">iteration ${run.current_iteration}, ${reviewed} of ${roundTotal} reviewed</span>
  </div>
  ${list}
  <button data-action="advance"${advanceAttr}>advance iteration</button>
  ${stop}${failure}
</section>`;
}

export function renderApp(state: SessionState): string {
  const run = state.run;
  const runBadge = run
    ? `${escapeHtml(run.run_id)} [${escapeHtml(run.status)}] v${run.version}`
    : "no run";

  const banner =
    state.offline || state.unsent.length > 0
      ? `<div class="banner">Connection trouble. ${state.unsent.length} unsent ` +
        `submission(s) held locally. <button data-action="retry">retry</button></div>`
      : "";
  const notice = state.notice
    ? `<div class="notice">${escapeHtml(state.notice)}</div>`
    : "";

  let body: string;
  if (!state.runId) {
    body = `<p class="empty">No active run.</p>
<button data-action="create-run">start a run</button>`;
  } else if (state.screen === "tasks") {
    body = renderTaskScreen(state);
  } else {
    body = renderLexiconScreen(state);
  }

  const tasksActive = state.screen === "tasks" ? ` class="active"` : "";
  const lexiconActive = state.screen === "lexicon" ? ` class="active"` : "";

  return `<header>
  <span class="annotator">annotator ${escapeHtml(state.annotatorId)}</span>
  <span class="run">${runBadge}</span>
  <button data-action="refresh">refresh</button>
</header>
${banner}${notice}
<nav>
  <button data-action="show-tasks"${tasksActive}>tasks</button>
  <button data-action="show-lexicon"${lexiconActive}>lexicon</button>
</nav>
<main>
${body}
</main>`;
}
