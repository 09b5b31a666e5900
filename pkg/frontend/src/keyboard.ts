// Keyboard map: 0/1/2 submit the rating, u re-opens the last submission.

import { Rating } from "./api";
import { AnnotationSession } from "./state";

export const RATING_KEYS: Record<string, Rating> = { "0": 0, "1": 1, "2": 2 };
export const UNDO_KEY = "u";

export function handleKey(session: AnnotationSession, key: string): boolean {
  if (key in RATING_KEYS) {
    void session.rate(RATING_KEYS[key]);
    return true;
  }
  if (key === UNDO_KEY) {
    void session.undo();
    return true;
  }
  return false;
}

export function bindKeyboard(session: AnnotationSession, target: EventTarget): void {
  target.addEventListener("keydown", (event) => {
    const key = (event as KeyboardEvent).key;
    if (handleKey(session, key)) {
      (event as KeyboardEvent).preventDefault?.();
    }
  });
}
