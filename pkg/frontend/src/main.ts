/**
 * Bootstrap: wire the API client, session, and DOM view together, then bind
 * the answer buttons and the S/D keyboard shortcuts.  The page is served by
 * the same process that hosts the oracle API, so the base URL is empty.
 */

import { OracleClient } from "./api.js";
import { LabelSession } from "./session.js";
import { DomView } from "./view.js";

const client = new OracleClient("");
const view = new DomView(document);
const session = new LabelSession(client, view);

document.getElementById("answer-same")!.addEventListener("click", () => {
  void session.answer(true);
});
document.getElementById("answer-different")!.addEventListener("click", () => {
  void session.answer(false);
});

window.addEventListener("keydown", (event) => {
  if (event.repeat || event.altKey || event.ctrlKey || event.metaKey) return;
  if (event.key === "s" || event.key === "S") {
    void session.answer(true);
  } else if (event.key === "d" || event.key === "D") {
    void session.answer(false);
  }
});

void session.start();
