/**
 * HTML renderers. Pure string builders so the views are testable without
 * a browser; app.ts mounts them and wires events by delegation.
 */

import type { QueueItemState } from "./queue.js";
import type { HostViewRow } from "./dashboard.js";

export function escapeHtml(value: unknown): string {
  return String(value)
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;")
    .replaceAll("'", "&#39;");
}

export function renderQueue(states: readonly QueueItemState[], submitting = false): string {
  if (states.length === 0) {
    return `<p class="empty">Waiting for the next run to request labels&hellip;</p>`;
  }
  const rows = states
    .map((state) => {
      const features = Object.entries(state.item.features)
        .map(([name, value]) =>
          `<span class="feature"><b>${escapeHtml(name)}</b>=${escapeHtml(value)}</span>`)
        .join(" ");
      const picked = (label: 0 | 1) => (state.chosen === label ? "checked" : "");
      const error = state.error
        ? `<div class="item-error">${escapeHtml(state.error)}</div>`
        : "";
      return `<li class="query-item" data-index="${state.item.index}">
        <div class="item-head">record #${state.item.index}</div>
        <div class="features">${features}</div>
        <label><input type="radio" name="label-${state.item.index}" value="0" ${picked(0)}> normal</label>
        <label><input type="radio" name="label-${state.item.index}" value="1" ${picked(1)}> attack</label>
        ${error}
      </li>`;
    })
    .join("\n");
  const allLabeled = states.every((s) => s.chosen !== null);
  const disabled = allLabeled && !submitting ? "" : "disabled";
  return `<ol class="query-list">${rows}</ol>
    <button id="submit-labels" ${disabled}>Submit ${states.length} labels</button>`;
}

export function renderHosts(rows: HostViewRow[], run: number): string {
  if (rows.length === 0) {
    return `<p class="empty">No completed runs yet.</p>`;
  }
  const body = rows
    .map((row) => {
      const spark = row.sparkline
        .map((v) => `<span class="spark-cell">${escapeHtml(v)}</span>`)
        .join("");
      return `<tr class="${row.type === "attack" ? "host-attack" : ""}">
        <td>${escapeHtml(row.srcip)}</td>
        <td>${escapeHtml(row.type)}</td>
        <td>${row.trials}</td>
        <td>${row.detections}</td>
        <td class="prob" title="${escapeHtml(row.tooltip)}">${escapeHtml(row.display)}</td>
        <td class="spark">${spark}</td>
      </tr>`;
    })
    .join("\n");
  return `<p>after run ${run}</p>
    <table class="hosts">
      <thead><tr><th>srcip</th><th>type</th><th>n</th><th>d</th><th>P(attack)</th><th>history</th></tr></thead>
      <tbody>${body}</tbody>
    </table>`;
}

export function renderBanner(offline: boolean): string {
  return offline
    ? `<div class="banner offline">Service unreachable; retrying&hellip;</div>`
    : "";
}
