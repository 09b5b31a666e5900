// Entry point: wire the API client, session, renderer and keyboard.

import { ApiClient } from "./api";
import { bindKeyboard } from "./keyboard";
import { AnnotationSession } from "./state";
import { renderApp, renderHelpPanel } from "./view";

export function bootstrap(doc: Document, baseUrl = ""): AnnotationSession {
  const api = new ApiClient(baseUrl);
  const session = new AnnotationSession(api);

  doc.getElementById("help")!.append(renderHelpPanel(doc));
  session.subscribe((snapshot) => renderApp(snapshot, doc));
  bindKeyboard(session, doc);

  doc.getElementById("banner")!.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    if (target.id === "retry") {
      void session.retry();
    }
  });
  doc.defaultView?.addEventListener("online", () => void session.flushQueue());

  void session.start();
  return session;
}

declare global {
  interface Window {
    __tablefewSession?: AnnotationSession;
  }
}

if (typeof document !== "undefined" && document.getElementById("stage")) {
  window.__tablefewSession = bootstrap(document);
}
