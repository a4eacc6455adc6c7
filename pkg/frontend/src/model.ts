// Conversation state and view-model logic. Everything here is pure:
// the DOM layer renders whatever these functions return, and every
// displayed value originates from service responses.

export const EOS = "<EOS>";

export interface StepAlt {
  char: string;
  probability: number;
}

export interface Step {
  position: number;
  char: string;
  probability: number;
  top5: StepAlt[];
}

export type Author = "user" | "bot" | "error";

export interface ConversationEntry {
  author: Author;
  text: string;
  /** The input sentence a bot entry answers; used to build /render URLs. */
  input?: string;
  steps?: Step[];
  stepImages?: string[];
}

/** Entries are append-only; callers always get a fresh array. */
export function appendEntry(
  entries: readonly ConversationEntry[],
  entry: ConversationEntry,
): ConversationEntry[] {
  return [...entries, entry];
}

/** The partial response the classifier saw at step `index` (EOS is a
 * class, never response text). */
export function partialUpTo(steps: readonly Step[], index: number): string {
  return steps
    .slice(0, index)
    .map((s) => s.char)
    .filter((ch) => ch !== EOS)
    .join("");
}

export function renderUrl(base: string, input: string, partial: string): string {
  const q = new URLSearchParams({ input, partial });
  return `${base}/render?${q.toString()}`;
}

/** One image URL per decode step: the image rendered from the input and
 * the partial response as it stood before that step. Step 0 therefore
 * shows an empty response portion; the EOS step shows the full partial. */
export function stepImageUrls(
  base: string,
  input: string,
  steps: readonly Step[],
): string[] {
  return steps.map((_, i) => renderUrl(base, input, partialUpTo(steps, i)));
}

export function botEntry(input: string, response: string, steps: Step[], base: string): ConversationEntry {
  return {
    author: "bot",
    text: response,
    input,
    steps,
    stepImages: stepImageUrls(base, input, steps),
  };
}

/** Top-5 probabilities are a subset of the distribution, so their sum
 * never exceeds 1 (within float tolerance); used by the inspector to
 * scale its bars. */
export function stepProbabilitySum(step: Step): number {
  return step.top5.reduce((acc, alt) => acc + alt.probability, 0);
}

export function describeStep(step: Step): string {
  const shown = step.char === EOS ? "EOS" : step.char;
  return `${step.position}: ${shown} (${(step.probability * 100).toFixed(1)}%)`;
}
