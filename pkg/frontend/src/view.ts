// DOM rendering for the rating screen. No framework: the session pushes
// snapshots and these functions rebuild the affected regions.

import { TaskCard } from "./api";
import { SessionSnapshot } from "./state";

export const DISPLAY_CAP = 10;

/** Split an input like "[Question] text [Answer] " into styled spans. */
export function renderInputMarkup(input: string, doc: Document): DocumentFragment {
  const fragment = doc.createDocumentFragment();
  const pattern = /\[[^\]]*\]/g;
  let last = 0;
  for (const match of input.matchAll(pattern)) {
    const index = match.index ?? 0;
    if (index > last) {
      fragment.append(doc.createTextNode(input.slice(last, index)));
    }
    const tag = doc.createElement("span");
    tag.className = "col-header";
    tag.textContent = match[0];
    fragment.append(tag);
    last = index + match[0].length;
  }
  if (last < input.length) {
    fragment.append(doc.createTextNode(input.slice(last)));
  }
  return fragment;
}

export function renderTask(card: TaskCard, doc: Document): HTMLElement {
  const root = doc.createElement("div");
  root.className = "task-card";
  root.dataset.taskId = card.task_id;

  const head = doc.createElement("div");
  head.className = "task-head";
  const site = doc.createElement("span");
  site.className = "website";
  site.textContent = card.website;
  const target = doc.createElement("span");
  target.className = "target-header";
  target.textContent = `target: [${card.target_header}]`;
  const id = doc.createElement("code");
  id.className = "task-id";
  id.textContent = card.task_id;
  head.append(site, target, id);
  root.append(head);

  const list = doc.createElement("div");
  list.className = "examples";
  const shown = card.examples.slice(0, DISPLAY_CAP);
  for (const example of shown) {
    const row = doc.createElement("div");
    row.className = "example";
    const input = doc.createElement("div");
    input.className = "example-input";
    input.append(renderInputMarkup(example.input, doc));
    const output = doc.createElement("div");
    output.className = "example-output";
    output.textContent = example.output;
    row.append(input, output);
    list.append(row);
  }
  root.append(list);

  if (card.example_count > shown.length) {
    const more = doc.createElement("div");
    more.className = "more-note";
    more.textContent = `${card.example_count - shown.length} more examples not shown`;
    root.append(more);
  }
  return root;
}

export function renderHelpPanel(doc: Document): HTMLElement {
  const details = doc.createElement("details");
  details.className = "help-panel";
  const summary = doc.createElement("summary");
  summary.textContent = "Rating guide (keys 0 / 1 / 2, u to undo)";
  details.append(summary);
  const guide: Array<[string, string[]]> = [
    [
      "0 — not valid or useful",
      [
        "input-output mapping looks nonsensical or arbitrary",
        "not in English",
        "relies on missing context or tests obscure trivia",
        "shuffled output labels would be indistinguishable",
      ],
    ],
    [
      "1 — flawed or trivial",
      [
        "interesting but confusing or lacking context in its current form",
        "guessable at better-than-random with options in hand",
        "makes sense but is trivial (for example, output copies the input)",
      ],
    ],
    [
      "2 — well-posed and useful",
      [
        "enough context that an expert could usually answer correctly",
        "demonstrates a skill with real-world value",
        "resembles what a standard benchmark would test",
      ],
    ],
  ];
  for (const [title, bullets] of guide) {
    const heading = doc.createElement("p");
    heading.className = "help-class";
    heading.textContent = title;
    const ul = doc.createElement("ul");
    for (const bullet of bullets) {
      const li = doc.createElement("li");
      li.textContent = bullet;
      ul.append(li);
    }
    details.append(heading, ul);
  }
  return details;
}

export function renderApp(snapshot: SessionSnapshot, doc: Document): void {
  const banner = doc.getElementById("banner")!;
  banner.innerHTML = "";
  banner.className = `banner banner-${snapshot.banner.kind}`;
  if (snapshot.banner.kind === "error") {
    banner.append(doc.createTextNode(`server unreachable: ${snapshot.banner.message} `));
    const retry = doc.createElement("button");
    retry.id = "retry";
    retry.textContent = "retry";
    banner.append(retry);
  } else if (snapshot.banner.kind === "validation") {
    banner.textContent = `rejected: ${snapshot.banner.message}`;
  }

  const queue = doc.getElementById("queue")!;
  queue.textContent =
    snapshot.queueLength > 0 ? `${snapshot.queueLength} submissions queued for retry` : "";

  const progress = doc.getElementById("progress")!;
  if (snapshot.progress) {
    const p = snapshot.progress;
    progress.textContent =
      `${p.annotated_count} / ${p.total} annotated ` +
      `(0: ${p.by_rating["0"]}, 1: ${p.by_rating["1"]}, 2: ${p.by_rating["2"]})`;
  } else {
    progress.textContent = "";
  }

  const stage = doc.getElementById("stage")!;
  stage.innerHTML = "";
  if (snapshot.current) {
    stage.append(renderTask(snapshot.current, doc));
  } else if (snapshot.done) {
    const done = doc.createElement("p");
    done.className = "done-note";
    done.textContent = "All tasks annotated.";
    stage.append(done);
  }
}
