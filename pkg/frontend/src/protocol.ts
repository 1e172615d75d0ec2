/** Translation from verification-widget interactions to the plain text
 * protocol the engine parses. The UI adds no protocol semantics: every
 * button click becomes an ordinary chat message a user could have typed.
 */

/** The "everything is correct" button. */
export function confirmText(): string {
  return "yes";
}

/** The "something is wrong" button. */
export function rejectText(): string {
  return "no";
}

/** Picking the lettered item to fix ("a".."f"). */
export function letterText(letter: string): string {
  const cleaned = letter.trim().toLowerCase();
  if (!/^[a-z]$/.test(cleaned)) {
    throw new Error(`not a verification letter: ${letter}`);
  }
  return cleaned;
}

/** The replacement value typed into the correction field. */
export function replacementText(value: string): string {
  const cleaned = value.trim();
  if (!cleaned) {
    throw new Error("replacement value is empty");
  }
  return cleaned;
}
