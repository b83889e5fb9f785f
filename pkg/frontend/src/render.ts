/**
 * DOM projection of the ViewState.
 *
 * `render` rebuilds the dynamic region from scratch on every state change,
 * so the DOM is a pure function of the state. Deliberation panels are
 * collapsed <details> blocks with the final answer card foregrounded on
 * top; the THOUGHTS tab exists only in riley mode.
 */

import type { RoundPanel, ViewState, VoteRow } from "./state.js";

const ROUND_TITLES = [
  "Round 0 — initial answers",
  "Round 1 — cross-review",
  "Round 2 — refined perspectives",
  "Round 3 — final reassessment",
];

export function emotionClass(name: string): string {
  return `emotion-${name.toLowerCase().replace(/[^a-z0-9]+/g, "-")}`;
}

function el(
  tag: string,
  className?: string,
  text?: string,
): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderTimeline(state: ViewState): HTMLElement {
  const section = el("section", "timeline");
  for (const entry of state.timeline) {
    const bubble = el(
      "div",
      entry.role === "user" ? "bubble user" : "bubble final",
      entry.text,
    );
    section.appendChild(bubble);
  }
  return section;
}

function renderFinalAnswer(state: ViewState): HTMLElement {
  const card = el("section", "final-card card");
  card.appendChild(el("h2", "card-title", "Final answer"));
  if (!state.finalAnswer) {
    card.appendChild(
      el(
        "p",
        "placeholder",
        state.askInFlight ? "The council is deliberating…" : "Ask something below.",
      ),
    );
    return card;
  }
  const answer = state.finalAnswer;
  const winners = el("p", "winners");
  winners.append("Winning emotions: ");
  for (const emotion of answer.winningEmotions) {
    winners.appendChild(el("span", `chip ${emotionClass(emotion)}`, emotion));
  }
  card.appendChild(winners);

  const tabs = el("div", "segment-tabs");
  tabs.appendChild(segmentTab("FINAL ANSWER", answer.final, true));
  tabs.appendChild(segmentTab("REASONING", answer.reasoning, false));
  if (state.mode === "riley" && answer.thoughts !== null) {
    tabs.appendChild(segmentTab("THOUGHTS", answer.thoughts, false));
  }
  card.appendChild(tabs);
  return card;
}

function segmentTab(name: string, text: string, open: boolean): HTMLElement {
  const details = el("details", "segment-tab") as HTMLDetailsElement;
  details.dataset.segment = name;
  details.open = open;
  details.appendChild(el("summary", undefined, name));
  details.appendChild(el("p", "segment-body", text));
  return details;
}

function renderRoundPanel(panel: RoundPanel): HTMLElement {
  const details = el("details", "round-panel") as HTMLDetailsElement;
  details.dataset.round = String(panel.round);
  details.appendChild(
    el("summary", undefined, ROUND_TITLES[panel.round] ?? `Round ${panel.round}`),
  );
  const grid = el("div", "card-grid");
  for (const card of panel.cards) {
    const agent = el("article", `agent-card ${emotionClass(card.emotion)}`);
    agent.appendChild(el("h3", "agent-name", card.emotion));
    agent.appendChild(el("p", "agent-text", card.response));
    agent.appendChild(
      el("span", "latency", `${Math.round(card.latencyMs)} ms`),
    );
    grid.appendChild(agent);
  }
  details.appendChild(grid);
  return details;
}

function renderVoteRow(row: VoteRow, highlighted: boolean): HTMLElement {
  const li = el(
    "li",
    `vote-row ${emotionClass(row.voter)}${highlighted ? " winner" : ""}`,
  );
  if (row.abstained) {
    li.appendChild(el("span", "voter", row.voter));
    li.appendChild(el("span", "abstained", "abstained"));
  } else {
    li.appendChild(el("span", "voter", row.voter));
    li.appendChild(el("span", "arrow", "→"));
    li.appendChild(el("span", `choice ${emotionClass(row.choice ?? "")}`, row.choice ?? ""));
    li.appendChild(el("span", "justification", row.justification ?? ""));
  }
  return li;
}

function renderVotePanel(state: ViewState): HTMLElement {
  const details = el("details", "vote-panel") as HTMLDetailsElement;
  details.appendChild(el("summary", undefined, "Votes and tally"));
  const winners = new Set(state.tally?.outcomeEmotions ?? []);
  const list = el("ul", "vote-list");
  for (const row of state.votes) {
    list.appendChild(
      renderVoteRow(row, row.choice !== null && winners.has(row.choice)),
    );
  }
  details.appendChild(list);
  if (state.tally) {
    const board = el("div", "tally-board");
    for (const [emotion, count] of Object.entries(state.tally.counts)) {
      const chip = el(
        "span",
        `tally-chip ${emotionClass(emotion)}${winners.has(emotion) ? " winner" : ""}`,
        `${emotion}: ${count}`,
      );
      board.appendChild(chip);
    }
    details.appendChild(board);
    details.appendChild(
      el(
        "p",
        "outcome",
        state.tally.outcomeType === "winner"
          ? `Winner: ${state.tally.outcomeEmotions.join(", ")}`
          : `Tie: ${state.tally.outcomeEmotions.join(", ")}`,
      ),
    );
  }
  return details;
}

function renderRetrieval(state: ViewState): HTMLElement {
  const details = el("details", "retrieval-panel") as HTMLDetailsElement;
  details.appendChild(el("summary", undefined, "Retrieved grounding"));
  const list = el("ul", "retrieval-list");
  for (const hit of state.retrievalHits) {
    const li = el("li", "retrieval-hit");
    li.appendChild(el("span", "hit-title", hit.title));
    li.appendChild(el("span", "hit-score", hit.score.toFixed(3)));
    li.appendChild(el("p", "hit-text", hit.text));
    list.appendChild(li);
  }
  details.appendChild(list);
  return details;
}

function renderNotices(state: ViewState): HTMLElement {
  const section = el("section", "notices");
  if (state.imageDescription) {
    section.appendChild(
      el("p", "notice image-description", `Image: ${state.imageDescription}`),
    );
  }
  for (const warning of state.warnings) {
    section.appendChild(el("p", "notice warning", warning));
  }
  for (const error of state.errors) {
    section.appendChild(el("p", "notice error", error));
  }
  return section;
}

/** Rebuild the dynamic view region from the state. */
export function render(view: HTMLElement, state: ViewState): void {
  view.textContent = "";
  view.appendChild(renderNotices(state));
  view.appendChild(renderTimeline(state));
  view.appendChild(renderFinalAnswer(state));

  const deliberation = el("section", "deliberation");
  deliberation.appendChild(
    el("h2", "card-title", "Deliberation (tap to expand)"),
  );
  for (const panel of state.rounds) {
    deliberation.appendChild(renderRoundPanel(panel));
  }
  if (state.votes.length > 0 || state.tally) {
    deliberation.appendChild(renderVotePanel(state));
  }
  if (state.retrievalHits.length > 0) {
    deliberation.appendChild(renderRetrieval(state));
  }
  view.appendChild(deliberation);
}

export interface ComposerControls {
  question: HTMLInputElement | HTMLTextAreaElement;
  context: HTMLInputElement | HTMLTextAreaElement;
  image: HTMLInputElement;
  send: HTMLButtonElement;
  download: HTMLButtonElement;
  modeSelect: HTMLSelectElement;
  status: HTMLElement;
}

/** Input is disabled from ask submission until synthesis (or error). */
export function updateControls(
  controls: ComposerControls,
  state: ViewState,
  localBusy: boolean,
): void {
  const busy = localBusy || state.askInFlight;
  controls.question.disabled = busy;
  controls.context.disabled = busy;
  controls.image.disabled = busy;
  controls.send.disabled = busy;
  controls.modeSelect.disabled = busy;
  controls.download.disabled = state.sessionId === null;
  controls.status.textContent = busy
    ? "deliberating…"
    : state.sessionId
      ? `session ${state.sessionId.slice(0, 8)} · ${state.mode}`
      : "no session";
}
