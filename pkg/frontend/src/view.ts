/** DOM rendering for the labeling session; the HTML skeleton lives in index.html. */

import type { SessionView } from "./session.js";
import type { QueryView, RecordCard } from "./types.js";

function mustFind(root: Document, id: string): HTMLElement {
  const el = root.getElementById(id);
  if (el === null) throw new Error(`missing element #${id}`);
  return el;
}

function formatElapsed(totalSeconds: number): string {
  const minutes = Math.floor(totalSeconds / 60);
  const seconds = totalSeconds % 60;
  return `${minutes}:${String(seconds).padStart(2, "0")}`;
}

export class DomView implements SessionView {
  private readonly banner: HTMLElement;
  private readonly answeredCount: HTMLElement;
  private readonly elapsedTime: HTMLElement;
  private readonly idleState: HTMLElement;
  private readonly queryState: HTMLElement;
  private readonly pairLabel: HTMLElement;
  private readonly leftCard: HTMLElement;
  private readonly rightCard: HTMLElement;
  private readonly sameButton: HTMLButtonElement;
  private readonly differentButton: HTMLButtonElement;

  constructor(root: Document) {
    this.banner = mustFind(root, "status-banner");
    this.answeredCount = mustFind(root, "answered-count");
    this.elapsedTime = mustFind(root, "elapsed-time");
    this.idleState = mustFind(root, "idle-state");
    this.queryState = mustFind(root, "query-state");
    this.pairLabel = mustFind(root, "pair-label");
    this.leftCard = mustFind(root, "left-record");
    this.rightCard = mustFind(root, "right-record");
    this.sameButton = mustFind(root, "answer-same") as HTMLButtonElement;
    this.differentButton = mustFind(root, "answer-different") as HTMLButtonElement;
  }

  render(view: QueryView): void {
    this.answeredCount.textContent = String(view.answered);
    this.elapsedTime.textContent = formatElapsed(view.elapsedSeconds);
    this.idleState.classList.toggle("hidden", view.pending);
    this.queryState.classList.toggle("hidden", !view.pending);
    this.sameButton.disabled = !view.pending;
    this.differentButton.disabled = !view.pending;
    if (view.pending && view.pair && view.left && view.right) {
      this.pairLabel.textContent = `${view.pair[0]} vs ${view.pair[1]}`;
      this.renderRecord(this.leftCard, view.left);
      this.renderRecord(this.rightCard, view.right);
    }
  }

  showBanner(text: string | null): void {
    this.banner.classList.toggle("hidden", text === null);
    this.banner.textContent = text ?? "";
  }

  private renderRecord(card: HTMLElement, record: RecordCard): void {
    card.replaceChildren();

    const id = document.createElement("h2");
    id.className = "record-id";
    id.textContent = record.id;
    card.appendChild(id);

    const text = document.createElement("p");
    text.className = "record-text";
    text.textContent = record.text;
    card.appendChild(text);

    if (record.features !== null && Object.keys(record.features).length > 0) {
      const table = document.createElement("table");
      table.className = "record-features";
      for (const [name, value] of Object.entries(record.features)) {
        const row = table.insertRow();
        const nameCell = row.insertCell();
        nameCell.className = "feature-name";
        nameCell.textContent = name;
        row.insertCell().textContent = String(value);
      }
      card.appendChild(table);
    }
  }
}
