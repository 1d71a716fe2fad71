/**
 * Typed client for the labeling service JSON API.
 *
 * Field names mirror the service exactly; the console treats every value
 * as opaque display data and never recomputes probabilities.
 */

export interface QueryItem {
  index: number;
  features: Record<string, string | number>;
}

export interface HostRow {
  srcip: string;
  type: string;
  n_r: number;
  d_r: number;
  probability: number;
  probability_full: string;
  probability_display: string;
  history: { n_i: number; d_i: number }[];
  probability_history: string[];
  probability_history_display: string[];
}

export interface HostsResponse {
  session: string;
  run: number;
  hosts: HostRow[];
}

export interface QueueResponse {
  session: string;
  items: QueryItem[];
}

export interface StatusResponse {
  session: string;
  run: number;
  n_runs: number;
  pending_items: number;
  finished: boolean;
  error: string | null;
}

export interface SubmitResponse {
  session: string;
  accepted: number;
  remaining: number;
  warnings: string[];
}

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
    readonly body: unknown,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function parseBody(response: Response): Promise<unknown> {
  const text = await response.text();
  try {
    return JSON.parse(text);
  } catch {
    return text;
  }
}

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    readonly sessionId: string = "default",
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  private url(path: string): string {
    return `${this.baseUrl.replace(/\/$/, "")}/session/${this.sessionId}${path}`;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.url(path), init);
    const body = await parseBody(response);
    if (!response.ok) {
      throw new ApiError(`${path} failed with ${response.status}`, response.status, body);
    }
    return body as T;
  }

  nextQuery(): Promise<QueueResponse> {
    return this.request<QueueResponse>("/queries/next");
  }

  submitLabels(labels: Record<number, 0 | 1>): Promise<SubmitResponse> {
    return this.request<SubmitResponse>("/labels", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ labels }),
    });
  }

  hosts(): Promise<HostsResponse> {
    return this.request<HostsResponse>("/hosts");
  }

  status(): Promise<StatusResponse> {
    return this.request<StatusResponse>("/status");
  }
}
