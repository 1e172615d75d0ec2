/** UI view model and its update rules.
 *
 * The server is the source of truth: the transcript only ever renders
 * acknowledged turns, the slot panel is rebuilt from the session view
 * attached to every system act, and reloading re-derives the whole
 * model from get-session plus the stored transcript. Turn indexes key
 * the bubbles, so a REST acknowledgement and the same turn arriving on
 * the WebSocket merge instead of duplicating.
 */

import type {
  SessionView,
  SlotName,
  SystemActPayload,
  TranscriptResponse,
  VerificationRow,
} from "./types.js";
import { SLOT_LABELS, SLOT_ORDER } from "./types.js";

export interface Bubble {
  role: "user" | "system";
  text: string;
  turnIndex: number;
}

export interface VerificationWidget {
  rows: VerificationRow[];
  /** Letter already sent to the engine; the widget now asks for the
   * replacement value of that row's slot. */
  selectedLetter: string | null;
}

export interface SlotRow {
  name: SlotName;
  label: string;
  value: string | null;
  filled: boolean;
  /** True when the engine stored the student's raw words after three
   * failed extraction attempts. */
  groundTruth: boolean;
}

export interface UiState {
  sessionId: string | null;
  bubbles: Bubble[];
  session: SessionView | null;
  verification: VerificationWidget;
  connection: "ok" | "retrying";
  queuedCount: number;
}

export function initialState(): UiState {
  return {
    sessionId: null,
    bubbles: [],
    session: null,
    verification: { rows: [], selectedLetter: null },
    connection: "ok",
    queuedCount: 0,
  };
}

export function sessionOpened(state: UiState, sessionId: string): UiState {
  return { ...initialState(), connection: state.connection, sessionId };
}

function upsertBubble(bubbles: Bubble[], bubble: Bubble): Bubble[] {
  const exists = bubbles.some(
    (b) => b.turnIndex === bubble.turnIndex && b.role === bubble.role,
  );
  if (exists) {
    return bubbles;
  }
  const next = [...bubbles, bubble];
  const roleOrder = { user: 0, system: 1 };
  next.sort(
    (a, b) => a.turnIndex - b.turnIndex || roleOrder[a.role] - roleOrder[b.role],
  );
  return next;
}

/** Apply one acknowledged turn. `userText` is null when the turn comes
 * from the WebSocket mirror, which does not carry the user's words. */
export function applyTurn(
  state: UiState,
  userText: string | null,
  act: SystemActPayload,
  session: SessionView,
): UiState {
  let bubbles = state.bubbles;
  if (userText !== null) {
    bubbles = upsertBubble(bubbles, {
      role: "user",
      text: userText,
      turnIndex: act.turn_index,
    });
  }
  bubbles = upsertBubble(bubbles, {
    role: "system",
    text: act.utterance,
    turnIndex: act.turn_index,
  });
  const stale =
    state.session !== null && session.turn_index < state.session.turn_index;
  return {
    ...state,
    bubbles,
    session: stale ? state.session : session,
    verification: verificationFromServer(
      stale ? state.session : session,
      act.verification ?? state.verification.rows,
    ),
  };
}

function verificationFromServer(
  session: SessionView | null,
  rows: VerificationRow[],
): VerificationWidget {
  if (!session || !verificationPhase(session)) {
    return { rows: [], selectedLetter: null };
  }
  return { rows, selectedLetter: session.pending_letter };
}

function verificationPhase(session: SessionView): boolean {
  return session.phase === "verifying" || session.phase === "correcting";
}

/** Rebuild the model after a reload from get-session + the transcript. */
export function restored(
  state: UiState,
  session: SessionView,
  transcript: TranscriptResponse,
): UiState {
  let bubbles: Bubble[] = [];
  let lastVerification: VerificationRow[] = [];
  for (const turn of transcript.turns) {
    bubbles = upsertBubble(bubbles, {
      role: "user",
      text: turn.user_text,
      turnIndex: turn.turn_index,
    });
    bubbles = upsertBubble(bubbles, {
      role: "system",
      text: turn.response,
      turnIndex: turn.turn_index,
    });
  }
  if (verificationPhase(session)) {
    lastVerification = verificationRowsFromView(session);
  }
  return {
    ...state,
    sessionId: session.session_id,
    bubbles,
    session,
    verification: verificationFromServer(session, lastVerification),
  };
}

/** The lettered items, reconstructed from the session view alone (used
 * on reload, when no act payload is at hand). */
export function verificationRowsFromView(session: SessionView): VerificationRow[] {
  const rows: VerificationRow[] = [];
  for (const [letter, slot] of Object.entries(session.letter_map)) {
    const view = session.slots[slot as SlotName];
    if (!view || view.value === null) {
      continue;
    }
    rows.push({
      letter,
      slot,
      value: view.value,
      provenance: view.provenance ?? "extracted",
    });
  }
  rows.sort((a, b) => a.letter.localeCompare(b.letter));
  return rows;
}

export function connectionLost(state: UiState, queuedCount: number): UiState {
  return { ...state, connection: "retrying", queuedCount };
}

export function connectionRestored(state: UiState): UiState {
  return { ...state, connection: "ok", queuedCount: 0 };
}

// -- derived view state -------------------------------------------------

export function verificationVisible(state: UiState): boolean {
  return state.session !== null && verificationPhase(state.session);
}

export function inputDisabled(state: UiState): boolean {
  return state.session !== null && state.session.phase === "handed_over";
}

export function handoverBanner(state: UiState): { reason: string } | null {
  if (!state.session || state.session.phase !== "handed_over") {
    return null;
  }
  return { reason: state.session.handover_reason ?? "handover" };
}

export function phaseBadge(state: UiState): string {
  return state.session ? state.session.phase : "connecting";
}

export function slotPanel(state: UiState): SlotRow[] {
  return SLOT_ORDER.map((name) => {
    const view = state.session?.slots[name];
    const value = view?.value ?? null;
    return {
      name,
      label: SLOT_LABELS[name],
      value,
      filled: value !== null,
      groundTruth: view?.provenance === "user_ground_truth",
    };
  });
}
