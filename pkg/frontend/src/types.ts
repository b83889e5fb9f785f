/** Wire types mirroring the service's JSONL event schema. */

export type EventKind =
  | "session_start"
  | "round_started"
  | "generation"
  | "vote"
  | "tally"
  | "retrieval"
  | "context_update"
  | "image_description"
  | "synthesis"
  | "warning"
  | "error";

export const EVENT_KINDS: EventKind[] = [
  "session_start",
  "round_started",
  "generation",
  "vote",
  "tally",
  "retrieval",
  "context_update",
  "image_description",
  "synthesis",
  "warning",
  "error",
];

export interface LogEvent {
  seq: number;
  timestamp: string;
  kind: EventKind;
  emotion: string | null;
  payload: Record<string, any>;
}

export type Mode = "riley" | "armando";

export interface SessionInfo {
  session_id: string;
  mode: Mode;
  emotions: string[];
}

export interface AskResponse {
  session_id: string;
  mode: Mode;
  reasoning: string;
  thoughts: string | null;
  final: string;
  winning_emotions: string[];
}
