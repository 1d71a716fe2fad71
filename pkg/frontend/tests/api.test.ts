import { describe, expect, it, vi } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

describe("ApiClient", () => {
  it("builds session-scoped URLs", async () => {
    const fetchFn = vi.fn(async () => jsonResponse({ session: "s1", items: [] }));
    const client = new ApiClient("http://svc:9000/", "s1", fetchFn);
    await client.nextQuery();
    expect(fetchFn).toHaveBeenCalledWith("http://svc:9000/session/s1/queries/next", undefined);
  });

  it("posts labels as JSON", async () => {
    const fetchFn = vi.fn(async () =>
      jsonResponse({ session: "default", accepted: 2, remaining: 0, warnings: [] }),
    );
    const client = new ApiClient("http://svc", "default", fetchFn);
    const ack = await client.submitLabels({ 4: 1, 7: 0 });
    expect(ack.remaining).toBe(0);
    const [, init] = fetchFn.mock.calls[0] as [string, RequestInit];
    expect(init.method).toBe("POST");
    expect(JSON.parse(init.body as string)).toEqual({ labels: { 4: 1, 7: 0 } });
  });

  it("throws ApiError with the response body on rejection", async () => {
    const fetchFn = vi.fn(async () =>
      jsonResponse({ errors: ["labels must be 0 or 1 for indices: [3]"] }, 422),
    );
    const client = new ApiClient("http://svc", "default", fetchFn);
    const failure = client.submitLabels({ 3: 1 });
    await expect(failure).rejects.toBeInstanceOf(ApiError);
    await client.submitLabels({ 3: 1 }).catch((error: ApiError) => {
      expect(error.status).toBe(422);
      expect(JSON.stringify(error.body)).toContain("0 or 1");
    });
  });

  it("propagates network failures", async () => {
    const fetchFn = vi.fn(async () => {
      throw new TypeError("fetch failed");
    });
    const client = new ApiClient("http://svc", "default", fetchFn);
    await expect(client.hosts()).rejects.toThrow("fetch failed");
  });
});
