/** Payload shapes of the ticket service's HTTP and WebSocket API. */

export type Phase =
  | "collecting"
  | "intent_menu"
  | "verifying"
  | "correcting"
  | "awaiting_exact_question"
  | "handed_over";

export type SlotName =
  | "topic"
  | "subtopic"
  | "exam_mode"
  | "exam_level"
  | "question_number"
  | "exact_question";

export const SLOT_ORDER: SlotName[] = [
  "topic",
  "subtopic",
  "exam_mode",
  "exam_level",
  "question_number",
  "exact_question",
];

export const SLOT_LABELS: Record<SlotName, string> = {
  topic: "Topic",
  subtopic: "Sub-topic",
  exam_mode: "Examination mode",
  exam_level: "Exam level",
  question_number: "Question number",
  exact_question: "Exact question",
};

export interface SlotView {
  value: string | null;
  /** "extracted" | "user_ground_truth" | "corrected" when filled. */
  provenance: string | null;
}

export interface SessionView {
  session_id: string;
  phase: Phase;
  intent: string | null;
  turn_index: number;
  last_system_action: string | null;
  awaiting_slot: string | null;
  pending_letter: string | null;
  letter_map: Record<string, string>;
  slots: Record<SlotName, SlotView>;
  complete: boolean;
  state_flags: string[];
  outcome: string | null;
  handover_reason: string | null;
}

export interface VerificationRow {
  letter: string;
  slot: string;
  value: string;
  provenance: string;
}

export interface SystemActPayload {
  action: string;
  utterance: string;
  turn_index: number;
  verification?: VerificationRow[];
  handover_ticket?: Record<string, unknown>;
}

export interface MessageResponse {
  act: SystemActPayload;
  session: SessionView;
}

export interface TranscriptTurn {
  turn_index: number;
  user_text: string;
  action: string;
  response: string;
}

export interface TranscriptResponse {
  session_id: string;
  outcome: string | null;
  turns: TranscriptTurn[];
}

export interface StreamEvent {
  type: "system_act";
  session_id: string;
  act: SystemActPayload;
  session: SessionView;
}
