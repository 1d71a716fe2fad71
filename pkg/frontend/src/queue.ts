/**
 * Label-queue state: pending items, chosen labels, and the submit gate.
 * Submission is enabled only when every item has a chosen label.
 */

import type { QueryItem } from "./api.js";

export type Label = 0 | 1;

export interface QueueItemState {
  item: QueryItem;
  chosen: Label | null;
  error: string | null;
}

export class LabelQueue {
  private items: QueueItemState[] = [];

  setItems(items: QueryItem[]): void {
    const previous = new Map(this.items.map((s) => [s.item.index, s.chosen]));
    this.items = items.map((item) => ({
      item,
      chosen: previous.get(item.index) ?? null,
      error: null,
    }));
  }

  get states(): readonly QueueItemState[] {
    return this.items;
  }

  get size(): number {
    return this.items.length;
  }

  choose(index: number, label: Label): void {
    const state = this.items.find((s) => s.item.index === index);
    if (!state) {
      throw new Error(`record ${index} is not in the queue`);
    }
    state.chosen = label;
    state.error = null;
  }

  get allLabeled(): boolean {
    return this.items.length > 0 && this.items.every((s) => s.chosen !== null);
  }

  /** Payload for POST /labels; only valid when allLabeled. */
  labelsPayload(): Record<number, Label> {
    if (!this.allLabeled) {
      throw new Error("cannot submit: some items are unlabeled");
    }
    const payload: Record<number, Label> = {};
    for (const state of this.items) {
      payload[state.item.index] = state.chosen as Label;
    }
    return payload;
  }

  /** Attach per-item errors from a service rejection message. */
  applyRejection(errors: string[]): void {
    for (const state of this.items) {
      const hit = errors.find((e) => e.includes(String(state.item.index)));
      if (hit) {
        state.error = hit;
      }
    }
  }

  clear(): void {
    this.items = [];
  }
}
