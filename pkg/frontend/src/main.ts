/**
 * Wiring: session lifecycle, the submit loop (context -> image -> ask),
 * the live event feed, and transcript download.
 */

import { CouncilClient, EventFeed } from "./api.js";
import { applyEvent, initialState, type ViewState } from "./state.js";
import { render, updateControls, type ComposerControls } from "./render.js";
import type { Mode } from "./types.js";

const client = new CouncilClient("");

let state: ViewState = initialState();
let feed: EventFeed | null = null;
let localBusy = false;

const view = document.getElementById("view") as HTMLElement;
const controls: ComposerControls = {
  question: document.getElementById("question") as HTMLTextAreaElement,
  context: document.getElementById("context") as HTMLTextAreaElement,
  image: document.getElementById("image") as HTMLInputElement,
  send: document.getElementById("send") as HTMLButtonElement,
  download: document.getElementById("download") as HTMLButtonElement,
  modeSelect: document.getElementById("mode-select") as HTMLSelectElement,
  status: document.getElementById("status") as HTMLElement,
};

function refresh(): void {
  render(view, state);
  updateControls(controls, state, localBusy);
}

async function startSession(mode: Mode): Promise<void> {
  feed?.close();
  state = initialState();
  const info = await client.createSession(mode);
  feed = client.openEvents(info.session_id, (event) => {
    state = applyEvent(state, event);
    refresh();
  });
  refresh();
}

async function submitTurn(): Promise<void> {
  if (localBusy || state.askInFlight || !state.sessionId) return;
  const sessionId = state.sessionId;
  const question = controls.question.value.trim();
  if (!question) return;
  localBusy = true;
  state = {
    ...state,
    timeline: [...state.timeline, { role: "user", text: question }],
  };
  refresh();
  try {
    const contextText = controls.context.value.trim();
    if (contextText) {
      await client.submitContext(sessionId, contextText);
    }
    const file = controls.image.files?.[0];
    if (file) {
      await client.submitImage(sessionId, file);
    }
    await client.ask(sessionId, question);
    controls.question.value = "";
    controls.context.value = "";
    controls.image.value = "";
  } catch (error) {
    state = { ...state, errors: [...state.errors, String(error)] };
  } finally {
    localBusy = false;
    refresh();
  }
}

async function downloadTranscript(): Promise<void> {
  if (!state.sessionId) return;
  const blob = await client.downloadTranscript(state.sessionId);
  const url = URL.createObjectURL(blob);
  const anchor = document.createElement("a");
  anchor.href = url;
  anchor.download = `${state.sessionId}.jsonl`;
  document.body.appendChild(anchor);
  anchor.click();
  anchor.remove();
  URL.revokeObjectURL(url);
}

controls.send.addEventListener("click", () => void submitTurn());
controls.question.addEventListener("keydown", (event: Event) => {
  const key = event as KeyboardEvent;
  if (key.key === "Enter" && !key.shiftKey) {
    key.preventDefault();
    void submitTurn();
  }
});
controls.download.addEventListener("click", () => void downloadTranscript());
controls.modeSelect.addEventListener("change", () => {
  void startSession(controls.modeSelect.value as Mode);
});

void startSession(controls.modeSelect.value as Mode);
