/** DOM rendering. The skeleton is laid out once; every state change
 * redraws the dynamic regions (transcript, slot panel, badge, widget,
 * banners) from the view model. The composer input is a persistent
 * element so typing survives redraws.
 */

import type { UiState } from "./state.js";
import {
  handoverBanner,
  inputDisabled,
  phaseBadge,
  slotPanel,
  verificationVisible,
} from "./state.js";

export interface Handlers {
  onSend(text: string): void;
  onConfirm(): void;
  onReject(): void;
  onPickLetter(letter: string): void;
  onReplacement(value: string): void;
}

export function mountSkeleton(root: HTMLElement): void {
  root.innerHTML = `
    <div class="chat-app">
      <header class="chat-header">
        <h1>Math course support</h1>
        <span class="phase-badge" data-region="phase"></span>
      </header>
      <div class="chat-banners" data-region="banners"></div>
      <main class="chat-main">
        <section class="chat-column">
          <ol class="transcript" data-region="transcript"></ol>
          <div class="verification" data-region="verification"></div>
          <form class="composer" data-region="composer">
            <input type="text" name="message" autocomplete="off"
                   placeholder="Describe the task you are stuck on" />
            <button type="submit">Send</button>
          </form>
        </section>
        <aside class="slot-panel" data-region="slots"></aside>
      </main>
    </div>`;
}

function region(root: HTMLElement, name: string): HTMLElement {
  const el = root.querySelector<HTMLElement>(`[data-region="${name}"]`);
  if (!el) {
    throw new Error(`missing region ${name}`);
  }
  return el;
}

function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

export function bindComposer(root: HTMLElement, handlers: Handlers): void {
  const form = region(root, "composer") as HTMLFormElement;
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const input = form.elements.namedItem("message") as HTMLInputElement;
    const text = input.value.trim();
    if (text) {
      handlers.onSend(text);
      input.value = "";
    }
  });
}

export function render(root: HTMLElement, state: UiState, handlers: Handlers): void {
  renderPhase(root, state);
  renderBanners(root, state);
  renderTranscript(root, state);
  renderSlots(root, state);
  renderVerification(root, state, handlers);
  const form = region(root, "composer") as HTMLFormElement;
  const input = form.elements.namedItem("message") as HTMLInputElement;
  const button = form.querySelector("button")!;
  input.disabled = button.disabled = inputDisabled(state);
}

function renderPhase(root: HTMLElement, state: UiState): void {
  const badge = region(root, "phase");
  const phase = phaseBadge(state);
  badge.textContent = phase.replaceAll("_", " ");
  badge.dataset.phase = phase;
}

function renderBanners(root: HTMLElement, state: UiState): void {
  const banners = region(root, "banners");
  const parts: string[] = [];
  if (state.connection === "retrying") {
    parts.push(
      `<div class="banner banner-retry">Connection lost — retrying.
       ${state.queuedCount} message${state.queuedCount === 1 ? "" : "s"} waiting,
       nothing is lost.</div>`,
    );
  }
  const handover = handoverBanner(state);
  if (handover) {
    parts.push(
      `<div class="banner banner-handover">A tutor will take it from here
       (${escapeHtml(handover.reason.replaceAll("_", " "))}). This chat is closed.</div>`,
    );
  }
  banners.innerHTML = parts.join("");
}

function renderTranscript(root: HTMLElement, state: UiState): void {
  const list = region(root, "transcript");
  list.innerHTML = state.bubbles
    .map(
      (b) =>
        `<li class="bubble bubble-${b.role}">${escapeHtml(b.text)}</li>`,
    )
    .join("");
  list.scrollTop = list.scrollHeight;
}

function renderSlots(root: HTMLElement, state: UiState): void {
  const panel = region(root, "slots");
  const rows = slotPanel(state)
    .map((row) => {
      const classes = ["slot", row.filled ? "slot-filled" : "slot-empty"];
      const value = row.filled ? escapeHtml(row.value!) : "—";
      const marker = row.groundTruth
        ? ' <span class="gt-marker" title="stored exactly as you wrote it">as written</span>'
        : "";
      return `<li class="${classes.join(" ")}" data-slot="${row.name}">
        <span class="slot-label">${row.label}</span>
        <span class="slot-value">${value}${marker}</span>
      </li>`;
    })
    .join("");
  panel.innerHTML = `<h2>Ticket</h2><ul>${rows}</ul>`;
}

function renderVerification(
  root: HTMLElement,
  state: UiState,
  handlers: Handlers,
): void {
  const widget = region(root, "verification");
  if (!verificationVisible(state)) {
    widget.innerHTML = "";
    return;
  }
  const phase = state.session!.phase;
  const rows = state.verification.rows
    .map(
      (row) => `<li>
        <button type="button" class="letter-button" data-letter="${row.letter}"
          ${phase === "verifying" ? "disabled" : ""}>${row.letter})</button>
        <span>${escapeHtml(row.slot.replaceAll("_", " "))}: ${escapeHtml(row.value)}</span>
      </li>`,
    )
    .join("");
  if (phase === "verifying") {
    widget.innerHTML = `
      <p>Please check the collected values:</p>
      <ul class="verification-rows">${rows}</ul>
      <div class="verification-actions">
        <button type="button" data-verify="yes">Everything is correct</button>
        <button type="button" data-verify="no">Something is wrong</button>
      </div>`;
    widget
      .querySelector('[data-verify="yes"]')!
      .addEventListener("click", () => handlers.onConfirm());
    widget
      .querySelector('[data-verify="no"]')!
      .addEventListener("click", () => handlers.onReject());
    return;
  }
  if (state.verification.selectedLetter === null) {
    widget.innerHTML = `
      <p>Which item should be fixed?</p>
      <ul class="verification-rows">${rows}</ul>`;
    for (const button of widget.querySelectorAll<HTMLButtonElement>(".letter-button")) {
      button.addEventListener("click", () =>
        handlers.onPickLetter(button.dataset.letter!),
      );
    }
    return;
  }
  widget.innerHTML = `
    <p>New value for item ${state.verification.selectedLetter}):</p>
    <form class="correction-form">
      <input type="text" name="replacement" autocomplete="off" />
      <button type="submit">Fix it</button>
    </form>`;
  widget.querySelector("form")!.addEventListener("submit", (event) => {
    event.preventDefault();
    const input = widget.querySelector<HTMLInputElement>('[name="replacement"]')!;
    const value = input.value.trim();
    if (value) {
      handlers.onReplacement(value);
      input.value = "";
    }
  });
}
