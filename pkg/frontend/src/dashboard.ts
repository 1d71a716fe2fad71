/**
 * Situation-dashboard view model: a pure pass-through of the /hosts rows.
 *
 * Every displayed string is taken verbatim from an API field
 * (probability_display, probability_full, probability_history_display);
 * the console never formats or recomputes a probability itself.
 */

import type { HostRow } from "./api.js";

export interface HostViewRow {
  srcip: string;
  type: string;
  trials: number;
  detections: number;
  /** 3-decimal display string, byte-equal to probability_display. */
  display: string;
  /** Full-precision string for the hover tooltip, byte-equal to probability_full. */
  tooltip: string;
  /** Per-run display strings for the sparkline, byte-equal to the API history. */
  sparkline: string[];
}

export function toHostViewRows(rows: HostRow[]): HostViewRow[] {
  // The service already sorts by probability descending; order is preserved.
  return rows.map((row) => ({
    srcip: row.srcip,
    type: row.type,
    trials: row.n_r,
    detections: row.d_r,
    display: row.probability_display,
    tooltip: row.probability_full,
    sparkline: [...row.probability_history_display],
  }));
}
