/** DOM projection: panel layout, highlighting, mode-dependent tabs. */

import { readFileSync } from "node:fs";
import { join } from "node:path";
import { beforeEach, describe, expect, it } from "vitest";

import { render, updateControls, type ComposerControls } from "../src/render.js";
import { parseTranscript, replay, type ViewState } from "../src/state.js";

const FIXTURES = join(__dirname, "fixtures");

function stateFrom(name: string): ViewState {
  return replay(parseTranscript(readFileSync(join(FIXTURES, name), "utf-8")));
}

const rileyState = stateFrom("riley_transcript.jsonl");
const armandoState = stateFrom("armando_transcript.jsonl");

let view: HTMLElement;

beforeEach(() => {
  document.body.innerHTML = '<main id="view"></main>';
  view = document.getElementById("view")!;
});

describe("riley replay rendering", () => {
  beforeEach(() => render(view, rileyState));

  it("shows 4 round panels with 5 agent cards each", () => {
    const panels = view.querySelectorAll(".round-panel");
    expect(panels).toHaveLength(4);
    for (const panel of panels) {
      expect(panel.querySelectorAll(".agent-card")).toHaveLength(5);
    }
    expect(view.querySelectorAll(".agent-card")).toHaveLength(20);
  });

  it("collapses deliberation panels by default", () => {
    for (const panel of view.querySelectorAll<HTMLDetailsElement>(".round-panel")) {
      expect(panel.open).toBe(false);
    }
  });

  it("populates the vote panel and highlights the outcome", () => {
    const votePanel = view.querySelector(".vote-panel")!;
    expect(votePanel.querySelectorAll(".vote-row")).toHaveLength(5);
    const winners = rileyState.tally!.outcomeEmotions;
    const highlighted = votePanel.querySelectorAll(".tally-chip.winner");
    expect(highlighted).toHaveLength(winners.length);
  });

  it("shows the final answer card with a THOUGHTS tab", () => {
    const card = view.querySelector(".final-card")!;
    expect(card.querySelector('[data-segment="FINAL ANSWER"]')).not.toBeNull();
    expect(card.querySelector('[data-segment="REASONING"]')).not.toBeNull();
    expect(card.querySelector('[data-segment="THOUGHTS"]')).not.toBeNull();
  });

  it("foregrounds the final answer segment", () => {
    const finalTab = view.querySelector<HTMLDetailsElement>(
      '[data-segment="FINAL ANSWER"]',
    )!;
    expect(finalTab.open).toBe(true);
    expect(finalTab.textContent).toContain(rileyState.finalAnswer!.final);
  });

  it("color-codes agent cards by emotion", () => {
    expect(view.querySelectorAll(".agent-card.emotion-joy")).toHaveLength(4);
    expect(view.querySelectorAll(".agent-card.emotion-disgust")).toHaveLength(4);
  });
});

describe("armando replay rendering", () => {
  beforeEach(() => render(view, armandoState));

  it("hides the THOUGHTS tab", () => {
    expect(view.querySelector('[data-segment="THOUGHTS"]')).toBeNull();
    expect(view.querySelector('[data-segment="FINAL ANSWER"]')).not.toBeNull();
  });

  it("shows the retrieval panel with hits", () => {
    const retrieval = view.querySelector(".retrieval-panel")!;
    expect(retrieval.querySelectorAll(".retrieval-hit").length).toBeGreaterThan(0);
  });

  it("still lays out 4x5 agent cards", () => {
    expect(view.querySelectorAll(".round-panel")).toHaveLength(4);
    expect(view.querySelectorAll(".agent-card")).toHaveLength(20);
  });
});

describe("image description notice", () => {
  it("renders above the deliberation panels", () => {
    render(view, { ...rileyState, imageDescription: "a burning kitchen" });
    const notice = view.querySelector(".notice.image-description")!;
    expect(notice.textContent).toContain("a burning kitchen");
    const order = view.innerHTML;
    expect(order.indexOf("image-description")).toBeLessThan(
      order.indexOf("round-panel"),
    );
  });
});

describe("re-rendering is deterministic", () => {
  it("same state twice produces identical markup", () => {
    render(view, rileyState);
    const first = view.innerHTML;
    render(view, rileyState);
    expect(view.innerHTML).toBe(first);
  });

  it("rendered event count equals received event count", () => {
    expect(rileyState.renderedCount).toBe(rileyState.receivedCount);
    expect(armandoState.renderedCount).toBe(armandoState.receivedCount);
  });
});

function makeControls(): ComposerControls {
  document.body.innerHTML = `
    <select id="mode-select"><option value="riley">riley</option></select>
    <span id="status"></span>
    <button id="download"></button>
    <textarea id="context"></textarea>
    <textarea id="question"></textarea>
    <input id="image" type="file">
    <button id="send"></button>
  `;
  return {
    question: document.getElementById("question") as HTMLTextAreaElement,
    context: document.getElementById("context") as HTMLTextAreaElement,
    image: document.getElementById("image") as HTMLInputElement,
    send: document.getElementById("send") as HTMLButtonElement,
    download: document.getElementById("download") as HTMLButtonElement,
    modeSelect: document.getElementById("mode-select") as HTMLSelectElement,
    status: document.getElementById("status") as HTMLElement,
  };
}

describe("composer controls", () => {
  it("disables input while an ask is in flight", () => {
    const controls = makeControls();
    updateControls(controls, { ...rileyState, askInFlight: true }, false);
    expect(controls.send.disabled).toBe(true);
    expect(controls.question.disabled).toBe(true);
    expect(controls.image.disabled).toBe(true);
  });

  it("local busy flag also disables input", () => {
    const controls = makeControls();
    updateControls(controls, rileyState, true);
    expect(controls.send.disabled).toBe(true);
  });

  it("re-enables input when idle", () => {
    const controls = makeControls();
    updateControls(controls, rileyState, false);
    expect(controls.send.disabled).toBe(false);
    expect(controls.question.disabled).toBe(false);
  });

  it("download needs a session", () => {
    const controls = makeControls();
    updateControls(controls, { ...rileyState, sessionId: null }, false);
    expect(controls.download.disabled).toBe(true);
    updateControls(controls, rileyState, false);
    expect(controls.download.disabled).toBe(false);
  });
});
