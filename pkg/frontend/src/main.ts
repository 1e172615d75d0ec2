/** Application entry point: wires the service client, the view model
 * and the DOM together. The current session id is kept in
 * localStorage so a reload re-attaches to the running dialogue.
 */

import { ServiceClient } from "./client.js";
import { confirmText, letterText, rejectText, replacementText } from "./protocol.js";
import {
  applyTurn,
  connectionLost,
  connectionRestored,
  initialState,
  restored,
  sessionOpened,
  type UiState,
} from "./state.js";
import { bindComposer, mountSkeleton, render, type Handlers } from "./render.js";

const SESSION_KEY = "tutordesk.session";

function baseUrl(): string {
  const params = new URLSearchParams(window.location.search);
  return params.get("service") ?? "";
}

function apiToken(): string | undefined {
  const params = new URLSearchParams(window.location.search);
  return params.get("token") ?? undefined;
}

async function start(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) {
    throw new Error("missing #app element");
  }
  mountSkeleton(root);

  let state: UiState = initialState();
  const redraw = () => render(root, state, handlers);

  const client = new ServiceClient(
    {
      onTurn(userText, act, session) {
        state = applyTurn(state, userText, act, session);
        redraw();
      },
      onConnection(status, queued) {
        state =
          status === "retrying"
            ? connectionLost(state, queued)
            : connectionRestored(state);
        redraw();
      },
      onError(message) {
        console.warn(message);
      },
    },
    {
      baseUrl: baseUrl(),
      token: apiToken(),
      socketFactory: (url) => {
        const scheme = window.location.protocol === "https:" ? "wss:" : "ws:";
        const absolute = url.startsWith("http")
          ? url.replace(/^http/, "ws")
          : `${scheme}//${window.location.host}${url}`;
        return new WebSocket(absolute);
      },
    },
  );

  const send = (text: string) => client.send(text);
  const handlers: Handlers = {
    onSend: send,
    onConfirm: () => send(confirmText()),
    onReject: () => send(rejectText()),
    onPickLetter: (letter) => send(letterText(letter)),
    onReplacement: (value) => send(replacementText(value)),
  };
  bindComposer(root, handlers);

  const stored = window.localStorage.getItem(SESSION_KEY);
  if (stored) {
    try {
      const { session, transcript } = await client.restore(stored);
      state = restored(state, session, transcript);
      redraw();
      return;
    } catch {
      window.localStorage.removeItem(SESSION_KEY);
    }
  }
  const sessionId = await client.connect();
  window.localStorage.setItem(SESSION_KEY, sessionId);
  state = sessionOpened(state, sessionId);
  redraw();
}

void start();
