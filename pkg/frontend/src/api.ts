/**
 * Thin client over the chat service HTTP API plus a resumable SSE feed.
 *
 * The event feed reconnects automatically after a drop, resuming from the
 * last seq it delivered, and pushes everything through an EventSequencer
 * so the consumer always sees events in order.
 */

import { EventSequencer } from "./state.js";
import { EVENT_KINDS, type AskResponse, type LogEvent, type Mode, type SessionInfo } from "./types.js";

const RECONNECT_DELAY_MS = 1500;

async function expectOk(response: Response): Promise<Response> {
  if (!response.ok) {
    let detail = `${response.status}`;
    try {
      const body = await response.json();
      if (body.detail) detail = `${body.detail}`;
    } catch {
      // leave the status code
    }
    throw new Error(detail);
  }
  return response;
}

export class CouncilClient {
  constructor(private baseUrl: string = "") {}

  async createSession(mode: Mode): Promise<SessionInfo> {
    const response = await expectOk(
      await fetch(`${this.baseUrl}/sessions`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ mode }),
      }),
    );
    return response.json();
  }

  async submitContext(sessionId: string, text: string): Promise<void> {
    await expectOk(
      await fetch(`${this.baseUrl}/sessions/${sessionId}/context`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ text }),
      }),
    );
  }

  async submitImage(sessionId: string, image: Blob): Promise<string> {
    const response = await expectOk(
      await fetch(`${this.baseUrl}/sessions/${sessionId}/images`, {
        method: "POST",
        headers: { "Content-Type": image.type || "application/octet-stream" },
        body: image,
      }),
    );
    const body = await response.json();
    return body.description ?? "";
  }

  async ask(sessionId: string, question: string): Promise<AskResponse> {
    const response = await expectOk(
      await fetch(`${this.baseUrl}/sessions/${sessionId}/ask`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ question }),
      }),
    );
    return response.json();
  }

  transcriptUrl(sessionId: string): string {
    return `${this.baseUrl}/sessions/${sessionId}/transcript?format=jsonl`;
  }

  async downloadTranscript(sessionId: string): Promise<Blob> {
    const response = await expectOk(await fetch(this.transcriptUrl(sessionId)));
    return response.blob();
  }

  openEvents(
    sessionId: string,
    onEvent: (event: LogEvent) => void,
    options: { fromSeq?: number; onStatus?: (s: "open" | "retrying") => void } = {},
  ): EventFeed {
    return new EventFeed(this.baseUrl, sessionId, onEvent, options);
  }
}

export class EventFeed {
  private source: EventSource | null = null;
  private sequencer: EventSequencer;
  private lastSeq: number;
  private closed = false;
  private retryTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private baseUrl: string,
    private sessionId: string,
    private onEvent: (event: LogEvent) => void,
    private options: {
      fromSeq?: number;
      onStatus?: (s: "open" | "retrying") => void;
    } = {},
  ) {
    this.lastSeq = options.fromSeq ?? 0;
    this.sequencer = new EventSequencer(this.lastSeq);
    this.connect();
  }

  private connect(): void {
    if (this.closed) return;
    const url =
      `${this.baseUrl}/sessions/${this.sessionId}/events` +
      `?last_event_id=${this.lastSeq}`;
    this.source = new EventSource(url);
    this.source.onopen = () => this.options.onStatus?.("open");
    for (const kind of EVENT_KINDS) {
      this.source.addEventListener(kind, (raw) => {
        const event = JSON.parse((raw as MessageEvent).data) as LogEvent;
        for (const ready of this.sequencer.push(event)) {
          this.lastSeq = ready.seq;
          this.onEvent(ready);
        }
      });
    }
    this.source.onerror = () => {
      // reconnect with resume from the last delivered seq
      this.source?.close();
      this.source = null;
      if (this.closed) return;
      this.options.onStatus?.("retrying");
      this.retryTimer = setTimeout(() => this.connect(), RECONNECT_DELAY_MS);
    };
  }

  close(): void {
    this.closed = true;
    if (this.retryTimer !== null) clearTimeout(this.retryTimer);
    this.source?.close();
    this.source = null;
  }
}
