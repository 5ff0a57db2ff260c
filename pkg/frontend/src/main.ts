// Page wiring: one session, one render target, keyboard and click routing.

import { ServiceClient } from "./api";
import { renderApp } from "./render";
import { AnnotatorSession } from "./state";

const baseUrl = document.body.dataset.apiBase ?? "http://127.0.0.1:8765";
const annotator =
  new URLSearchParams(window.location.search).get("annotator") ?? "annotator-1";

const session = new AnnotatorSession(new ServiceClient(baseUrl), annotator);
const root = document.getElementById("app");
if (!root) throw new Error("missing #app element");

function paint(): void {
  root!.innerHTML = renderApp(session.state);
}

function run(action: Promise<void>): void {
  void action.then(paint, (err) => {
    console.error(err);
    paint();
  });
}

document.addEventListener("keydown", (ev) => {
  if (session.state.screen !== "tasks") return;
  const target = ev.target as HTMLElement | null;
  if (target && (target.tagName === "INPUT" || target.tagName === "TEXTAREA")) return;
  if (ev.key === "1") run(session.submitLabel(0));
  else if (ev.key === "2") run(session.submitLabel(1));
});

root.addEventListener("click", (ev) => {
  const el = (ev.target as HTMLElement).closest<HTMLElement>("[data-action]");
  if (!el) return;
  const phrase = el.dataset.phrase ?? "";
  switch (el.dataset.action) {
    case "label":
      run(session.submitLabel(Number(el.dataset.index)));
      break;
    case "keep":
      run(session.reviewPhrase(phrase, "keep"));
      break;
    case "drop":
      run(session.reviewPhrase(phrase, "drop"));
      break;
    case "advance":
      run(session.advanceRun());
      break;
    case "retry":
      run(session.retryUnsent());
      break;
    case "show-tasks":
      run(session.switchScreen("tasks"));
      break;
    case "show-lexicon":
      run(session.switchScreen("lexicon"));
      break;
    case "create-run":
      run(session.startRun());
      break;
    case "refresh":
      run(session.refresh());
      break;
  }
});

run(session.start());
