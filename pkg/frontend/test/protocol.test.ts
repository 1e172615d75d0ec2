import { mkdirSync, writeFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import {
  confirmText,
  letterText,
  rejectText,
  replacementText,
} from "../src/protocol.js";

describe("verification widget protocol", () => {
  it("confirm button sends a plain yes", () => {
    expect(confirmText()).toBe("yes");
  });

  it("reject button sends a plain no", () => {
    expect(rejectText()).toBe("no");
  });

  it("letter buttons send the bare letter", () => {
    expect(letterText("d")).toBe("d");
    expect(letterText(" B ")).toBe("b");
    expect(() => letterText("10")).toThrow(/not a verification letter/);
    expect(() => letterText("")).toThrow(/not a verification letter/);
  });

  it("replacement field sends the trimmed value", () => {
    expect(replacementText(" 1 (a) ")).toBe("1 (a)");
    expect(() => replacementText("   ")).toThrow(/empty/);
  });
});

describe("the showcase correction flow", () => {
  it("widget clicks reproduce the exact typed protocol", () => {
    // The same dialogue a student could type by hand, driven through
    // the widget where the widget applies: free text for the opening
    // answers, buttons for the verification round, the correction
    // field for the replacement value.
    const outgoing: string[] = [];
    const send = (text: string) => outgoing.push(text);

    send("Hi, I do not understand the Training 1 (a) in Chapter 1");
    send("I think it is section");
    send("I am working on roots and powers");
    send(rejectText()); // "Something is wrong"
    send(letterText("d")); // the question-number row
    send(replacementText("1 (a)"));
    send(confirmText()); // "Everything is correct"
    send("I do not understand how to simplify it.");

    expect(outgoing).toEqual([
      "Hi, I do not understand the Training 1 (a) in Chapter 1",
      "I think it is section",
      "I am working on roots and powers",
      "no",
      "d",
      "1 (a)",
      "yes",
      "I do not understand how to simplify it.",
    ]);

    // Recorded for the service-side round-trip check in the engine's
    // acceptance suite: the same messages are replayed over the raw API
    // and the transcripts must match.
    const here = dirname(fileURLToPath(import.meta.url));
    const artifactDir = join(here, "..", "artifacts");
    mkdirSync(artifactDir, { recursive: true });
    writeFileSync(
      join(artifactDir, "showcase5_messages.json"),
      JSON.stringify(outgoing, null, 2) + "\n",
    );
  });
});
