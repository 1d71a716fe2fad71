import { describe, expect, it } from "vitest";

import { escapeHtml, renderHosts, renderQueue, renderBanner } from "../src/render.js";
import { LabelQueue } from "../src/queue.js";
import { toHostViewRows } from "../src/dashboard.js";
import type { HostRow, QueryItem } from "../src/api.js";

const items: QueryItem[] = [
  { index: 1, features: { proto: "tcp", dur: 0.25 } },
  { index: 5, features: { proto: "udp", dur: 1.5 } },
];

describe("renderQueue", () => {
  it("renders one row per pending item with its features", () => {
    const queue = new LabelQueue();
    queue.setItems(items);
    const html = renderQueue(queue.states);
    expect(html.match(/class="query-item"/g)).toHaveLength(2);
    expect(html).toContain("record #1");
    expect(html).toContain("record #5");
    expect(html).toContain("<b>proto</b>=tcp");
  });

  it("keeps submit disabled until every item is labeled", () => {
    const queue = new LabelQueue();
    queue.setItems(items);
    expect(renderQueue(queue.states)).toContain("disabled");
    queue.choose(1, 0);
    expect(renderQueue(queue.states)).toContain("disabled");
    queue.choose(5, 1);
    expect(renderQueue(queue.states)).not.toContain("disabled");
  });

  it("shows the waiting state on an empty queue", () => {
    expect(renderQueue([])).toContain("Waiting for the next run");
  });

  it("escapes feature values", () => {
    const queue = new LabelQueue();
    queue.setItems([{ index: 2, features: { svc: "<script>alert(1)</script>" } }]);
    const html = renderQueue(queue.states);
    expect(html).not.toContain("<script>");
    expect(html).toContain("&lt;script&gt;");
  });

  it("never renders a ground-truth label field", () => {
    const queue = new LabelQueue();
    queue.setItems(items);
    expect(renderQueue(queue.states)).not.toMatch(/ground.?truth|"label"/);
  });
});

describe("renderHosts", () => {
  const row: HostRow = {
    srcip: "10.200.0.1",
    type: "attack",
    n_r: 100,
    d_r: 44,
    probability: 0.675,
    probability_full: "0.6749999999999999",
    probability_display: "0.675",
    history: [{ n_i: 100, d_i: 44 }],
    probability_history: ["0.6749999999999999"],
    probability_history_display: ["0.675"],
  };

  it("renders the display probability and full-precision tooltip verbatim", () => {
    const html = renderHosts(toHostViewRows([row]), 1);
    expect(html).toContain(`title="0.6749999999999999"`);
    expect(html).toContain(">0.675</td>");
  });

  it("renders sparkline cells from the history display values", () => {
    const multi = {
      ...row,
      probability_history_display: ["0.208", "0.675"],
      probability_history: ["x", "y"],
    };
    const html = renderHosts(toHostViewRows([multi]), 2);
    expect(html.match(/spark-cell/g)).toHaveLength(2);
    expect(html).toContain(">0.208</span>");
  });

  it("shows the empty state before the first run completes", () => {
    expect(renderHosts([], 0)).toContain("No completed runs");
  });
});

describe("renderBanner", () => {
  it("raises and clears the retry banner", () => {
    expect(renderBanner(true)).toContain("retrying");
    expect(renderBanner(false)).toBe("");
  });
});

describe("escapeHtml", () => {
  it("escapes the five specials", () => {
    expect(escapeHtml(`<a href="x">&'</a>`)).toBe(
      "&lt;a href=&quot;x&quot;&gt;&amp;&#39;&lt;/a&gt;",
    );
  });
});
