/**
 * Console entrypoint: wires the label queue and the situation dashboard
 * to the service with two 2-second pollers.
 *
 * The service base URL comes from ?api=...; it defaults to the page
 * origin so the console can be served next to the API.
 */

import { ApiClient, ApiError } from "./api.js";
import { LabelQueue, type Label } from "./queue.js";
import { toHostViewRows } from "./dashboard.js";
import { Poller } from "./poller.js";
import { renderBanner, renderHosts, renderQueue } from "./render.js";

export function mountConsole(root: HTMLElement, client: ApiClient): { stop: () => void } {
  root.innerHTML = `
    <div id="banner"></div>
    <section id="queue-panel"><h2>Label queue</h2><div id="queue"></div></section>
    <section id="hosts-panel"><h2>Host situation</h2><div id="hosts"></div></section>
  `;
  const banner = root.querySelector("#banner") as HTMLElement;
  const queueMount = root.querySelector("#queue") as HTMLElement;
  const hostsMount = root.querySelector("#hosts") as HTMLElement;

  const queue = new LabelQueue();
  let submitting = false;

  const redrawQueue = () => {
    queueMount.innerHTML = renderQueue(queue.states, submitting);
  };

  const queuePoller = new Poller(
    () => client.nextQuery(),
    (response) => {
      queue.setItems(response.items);
      redrawQueue();
    },
    (offline) => {
      banner.innerHTML = renderBanner(offline);
    },
  );

  const hostsPoller = new Poller(
    () => client.hosts(),
    (response) => {
      hostsMount.innerHTML = renderHosts(toHostViewRows(response.hosts), response.run);
    },
    (offline) => {
      banner.innerHTML = renderBanner(offline);
    },
  );

  queueMount.addEventListener("change", (event) => {
    const input = event.target as HTMLInputElement;
    const item = input.closest<HTMLElement>(".query-item");
    if (!item || !input.name.startsWith("label-")) {
      return;
    }
    queue.choose(Number(item.dataset.index), Number(input.value) as Label);
    redrawQueue();
  });

  queueMount.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    if (target.id !== "submit-labels" || !queue.allLabeled || submitting) {
      return;
    }
    submitting = true;
    redrawQueue();
    client
      .submitLabels(queue.labelsPayload())
      .then(() => {
        queue.clear();
      })
      .catch((error: unknown) => {
        if (error instanceof ApiError && typeof error.body === "object" && error.body) {
          const errors = (error.body as { errors?: string[] }).errors ?? [];
          queue.applyRejection(errors);
        }
      })
      .finally(() => {
        submitting = false;
        redrawQueue();
        void queuePoller.tick();
      });
  });

  queuePoller.start();
  hostsPoller.start();
  return {
    stop: () => {
      queuePoller.stop();
      hostsPoller.stop();
    },
  };
}

declare global {
  interface Window {
    activeidsConsole?: { stop: () => void };
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  const params = new URLSearchParams(window.location.search);
  const base = params.get("api") ?? window.location.origin;
  const session = params.get("session") ?? "default";
  const client = new ApiClient(base, session);
  window.activeidsConsole = mountConsole(
    document.getElementById("app") as HTMLElement,
    client,
  );
}
