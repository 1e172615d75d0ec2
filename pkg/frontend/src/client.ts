/** Thin wrapper around the ticket service's HTTP + WebSocket API.
 *
 * Outgoing messages go through a client-side queue: a network failure
 * flips the connection state to "retrying" and the queue is replayed in
 * order once the service answers again, so no message is lost and the
 * server still sees every turn exactly once, in the order typed.
 */

import type {
  MessageResponse,
  SessionView,
  StreamEvent,
  SystemActPayload,
  TranscriptResponse,
} from "./types.js";

export interface SocketLike {
  onmessage: ((event: { data: string }) => void) | null;
  onclose: (() => void) | null;
  close(): void;
}

export interface ClientCallbacks {
  /** One acknowledged turn. `userText` is null for WebSocket mirrors. */
  onTurn(userText: string | null, act: SystemActPayload, session: SessionView): void;
  onConnection(status: "ok" | "retrying", queued: number): void;
  onError(message: string): void;
}

export interface ClientOptions {
  baseUrl?: string;
  token?: string;
  fetchFn?: typeof fetch;
  socketFactory?: (url: string) => SocketLike;
  retryDelayMs?: number;
  sleep?: (ms: number) => Promise<void>;
}

const defaultSleep = (ms: number) =>
  new Promise<void>((resolve) => setTimeout(resolve, ms));

export class ServiceClient {
  sessionId: string | null = null;

  private readonly baseUrl: string;
  private readonly token: string | undefined;
  private readonly fetchFn: typeof fetch;
  private readonly socketFactory: ((url: string) => SocketLike) | null;
  private readonly retryDelayMs: number;
  private readonly sleep: (ms: number) => Promise<void>;
  private readonly callbacks: ClientCallbacks;
  private readonly queue: string[] = [];
  private pumping = false;
  private retrying = false;
  private socket: SocketLike | null = null;
  private closed = false;

  constructor(callbacks: ClientCallbacks, options: ClientOptions = {}) {
    this.callbacks = callbacks;
    this.baseUrl = (options.baseUrl ?? "").replace(/\/$/, "");
    this.token = options.token;
    this.fetchFn = options.fetchFn ?? fetch.bind(globalThis);
    this.socketFactory = options.socketFactory ?? null;
    this.retryDelayMs = options.retryDelayMs ?? 1500;
    this.sleep = options.sleep ?? defaultSleep;
  }

  private headers(): Record<string, string> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (this.token) {
      headers["X-API-Token"] = this.token;
    }
    return headers;
  }

  /** Open a fresh session and its act stream. */
  async connect(): Promise<string> {
    const response = await this.fetchFn(`${this.baseUrl}/sessions`, {
      method: "POST",
      headers: this.headers(),
    });
    if (!response.ok) {
      throw new Error(`could not open a session (HTTP ${response.status})`);
    }
    const body = (await response.json()) as { session_id: string };
    this.sessionId = body.session_id;
    this.openStream();
    return this.sessionId;
  }

  /** Re-attach to an existing session after a reload. */
  async restore(
    sessionId: string,
  ): Promise<{ session: SessionView; transcript: TranscriptResponse }> {
    const [sessionRes, transcriptRes] = await Promise.all([
      this.fetchFn(`${this.baseUrl}/sessions/${sessionId}`, {
        headers: this.headers(),
      }),
      this.fetchFn(`${this.baseUrl}/sessions/${sessionId}/transcript`, {
        headers: this.headers(),
      }),
    ]);
    if (!sessionRes.ok || !transcriptRes.ok) {
      throw new Error("unknown session");
    }
    this.sessionId = sessionId;
    const session = (await sessionRes.json()) as SessionView;
    if (session.phase !== "handed_over") {
      this.openStream();
    }
    return {
      session,
      transcript: (await transcriptRes.json()) as TranscriptResponse,
    };
  }

  /** Queue a user message; delivery survives network failures. */
  send(text: string): void {
    this.queue.push(text);
    void this.pump();
  }

  get queuedCount(): number {
    return this.queue.length;
  }

  close(): void {
    this.closed = true;
    this.socket?.close();
  }

  private async pump(): Promise<void> {
    if (this.pumping || this.sessionId === null) {
      return;
    }
    this.pumping = true;
    try {
      while (this.queue.length > 0 && !this.closed) {
        const text = this.queue[0]!;
        let response: Response;
        try {
          response = await this.fetchFn(
            `${this.baseUrl}/sessions/${this.sessionId}/messages`,
            {
              method: "POST",
              headers: this.headers(),
              body: JSON.stringify({ text }),
            },
          );
        } catch {
          this.retrying = true;
          this.callbacks.onConnection("retrying", this.queue.length);
          await this.sleep(this.retryDelayMs);
          continue;
        }
        this.queue.shift();
        if (this.retrying) {
          this.retrying = false;
          this.callbacks.onConnection("ok", this.queue.length);
        }
        if (!response.ok) {
          this.callbacks.onError(
            response.status === 409
              ? "the session is already handed over"
              : `message rejected (HTTP ${response.status})`,
          );
          continue;
        }
        const body = (await response.json()) as MessageResponse;
        this.callbacks.onTurn(text, body.act, body.session);
      }
    } finally {
      this.pumping = false;
    }
  }

  private openStream(): void {
    if (!this.socketFactory || this.sessionId === null) {
      return;
    }
    const token = this.token ? `?token=${encodeURIComponent(this.token)}` : "";
    const url = `${this.baseUrl}/sessions/${this.sessionId}/stream${token}`;
    const socket = this.socketFactory(url);
    socket.onmessage = (event) => {
      const parsed = JSON.parse(event.data) as StreamEvent;
      if (parsed.type === "system_act" && parsed.session_id === this.sessionId) {
        this.callbacks.onTurn(null, parsed.act, parsed.session);
      }
    };
    socket.onclose = () => {
      if (!this.closed) {
        void this.sleep(this.retryDelayMs).then(() => {
          if (!this.closed) {
            this.openStream();
          }
        });
      }
    };
    this.socket = socket;
  }
}
