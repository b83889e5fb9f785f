/**
 * View state as a pure function of the event stream.
 *
 * `applyEvent` is a strict reducer: same events in, same state out, so
 * replaying a recorded transcript reproduces the identical view. Events
 * arriving out of order go through `EventSequencer`, which buffers until
 * the next expected seq is available.
 */

import type { EventKind, LogEvent, Mode } from "./types.js";

export interface AgentCard {
  emotion: string;
  response: string;
  latencyMs: number;
}

export interface RoundPanel {
  round: number;
  cards: AgentCard[];
}

export interface VoteRow {
  voter: string;
  choice: string | null;
  justification: string | null;
  abstained: boolean;
}

export interface TallyView {
  counts: Record<string, number>;
  outcomeType: "winner" | "tie";
  outcomeEmotions: string[];
}

export interface RetrievalHit {
  title: string;
  score: number;
  text: string;
}

export interface FinalAnswerView {
  reasoning: string;
  thoughts: string | null;
  final: string;
  winningEmotions: string[];
}

export interface TimelineEntry {
  role: "user" | "final";
  text: string;
}

export interface ViewState {
  sessionId: string | null;
  mode: Mode;
  emotions: string[];
  timeline: TimelineEntry[];
  rounds: RoundPanel[];
  votes: VoteRow[];
  tally: TallyView | null;
  retrievalHits: RetrievalHit[];
  imageDescription: string | null;
  finalAnswer: FinalAnswerView | null;
  warnings: string[];
  errors: string[];
  askInFlight: boolean;
  lastSeq: number;
  receivedCount: number;
  renderedCount: number;
}

export function initialState(): ViewState {
  return {
    sessionId: null,
    mode: "riley",
    emotions: [],
    timeline: [],
    rounds: [],
    votes: [],
    tally: null,
    retrievalHits: [],
    imageDescription: null,
    finalAnswer: null,
    warnings: [],
    errors: [],
    askInFlight: false,
    lastSeq: 0,
    receivedCount: 0,
    renderedCount: 0,
  };
}

function startNewTurn(state: ViewState): ViewState {
  // a fresh round 0 begins a new deliberation; previous panels reset
  return {
    ...state,
    rounds: [],
    votes: [],
    tally: null,
    retrievalHits: [],
    finalAnswer: null,
    askInFlight: true,
  };
}

/** Apply one in-order event; every event lands in exactly one panel. */
export function applyEvent(state: ViewState, event: LogEvent): ViewState {
  if (event.seq !== state.lastSeq + 1) {
    throw new Error(
      `event out of order: got seq ${event.seq}, expected ${state.lastSeq + 1}`,
    );
  }
  let next: ViewState = {
    ...state,
    lastSeq: event.seq,
    receivedCount: state.receivedCount + 1,
  };

  switch (event.kind as EventKind) {
    case "session_start": {
      next.sessionId = event.payload.session_id ?? null;
      next.mode = (event.payload.mode ?? "riley") as Mode;
      next.emotions = event.payload.emotions ?? [];
      break;
    }
    case "round_started": {
      const round = event.payload.round as number;
      if (round === 0) {
        next = startNewTurn(next);
      }
      next.rounds = [...next.rounds, { round, cards: [] }];
      break;
    }
    case "generation": {
      const round = event.payload.round as number;
      const card: AgentCard = {
        emotion: event.emotion ?? "?",
        response: String(event.payload.response ?? ""),
        latencyMs: Number(event.payload.latency_ms ?? 0),
      };
      next.rounds = next.rounds.map((panel) =>
        panel.round === round
          ? { ...panel, cards: [...panel.cards, card] }
          : panel,
      );
      break;
    }
    case "vote": {
      const row: VoteRow = {
        voter: event.emotion ?? "?",
        choice: event.payload.abstained ? null : (event.payload.choice ?? null),
        justification: event.payload.abstained
          ? null
          : (event.payload.justification ?? null),
        abstained: Boolean(event.payload.abstained),
      };
      next.votes = [...next.votes, row];
      break;
    }
    case "tally": {
      next.tally = {
        counts: event.payload.tally ?? {},
        outcomeType: event.payload.outcome?.type ?? "tie",
        outcomeEmotions: event.payload.outcome?.emotions ?? [],
      };
      break;
    }
    case "retrieval": {
      next.retrievalHits = (event.payload.hits ?? []).map((hit: any) => ({
        title: String(hit.title ?? hit.doc_id ?? "?"),
        score: Number(hit.score ?? 0),
        text: String(hit.text ?? ""),
      }));
      break;
    }
    case "context_update": {
      // tracked for completeness; surfaced only in the debug drawer
      break;
    }
    case "image_description": {
      next.imageDescription = String(event.payload.description ?? "");
      break;
    }
    case "synthesis": {
      const thoughts =
        next.mode === "armando" ? null : (event.payload.thoughts ?? null);
      next.finalAnswer = {
        reasoning: String(event.payload.reasoning ?? ""),
        thoughts,
        final: String(event.payload.final ?? ""),
        winningEmotions: event.payload.winning_emotions ?? [],
      };
      next.timeline = [
        ...next.timeline,
        { role: "final", text: String(event.payload.final ?? "") },
      ];
      next.askInFlight = false;
      break;
    }
    case "warning": {
      next.warnings = [...next.warnings, String(event.payload.message ?? "")];
      break;
    }
    case "error": {
      next.errors = [
        ...next.errors,
        `${event.payload.stage ?? "?"}: ${event.payload.message ?? "?"}`,
      ];
      next.askInFlight = false;
      break;
    }
  }
  next.renderedCount = next.renderedCount + 1;
  return next;
}

/** Replay a whole recorded event log from scratch. */
export function replay(events: LogEvent[]): ViewState {
  let state = initialState();
  for (const event of events) {
    state = applyEvent(state, event);
  }
  return state;
}

export function parseTranscript(jsonl: string): LogEvent[] {
  return jsonl
    .split("\n")
    .filter((line) => line.trim().length > 0)
    .map((line) => JSON.parse(line) as LogEvent);
}

/**
 * Buffers out-of-order events and releases them in seq order.
 * Duplicates (seq already seen) are dropped.
 */
export class EventSequencer {
  private pending = new Map<number, LogEvent>();
  private nextSeq: number;

  constructor(lastSeen = 0) {
    this.nextSeq = lastSeen + 1;
  }

  push(event: LogEvent): LogEvent[] {
    if (event.seq < this.nextSeq) {
      return [];
    }
    this.pending.set(event.seq, event);
    const ready: LogEvent[] = [];
    while (this.pending.has(this.nextSeq)) {
      ready.push(this.pending.get(this.nextSeq)!);
      this.pending.delete(this.nextSeq);
      this.nextSeq += 1;
    }
    return ready;
  }

  get buffered(): number {
    return this.pending.size;
  }
}
