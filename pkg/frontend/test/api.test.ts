import { describe, expect, it } from "vitest";

import { ApiError, SimforgeClient } from "../src/api.js";

type Captured = { url: string; init?: RequestInit };

function clientWith(status: number, body: unknown): { client: SimforgeClient; calls: Captured[] } {
  const calls: Captured[] = [];
  const fetchImpl = async (url: string, init?: RequestInit) => {
    calls.push({ url, init });
    return new Response(JSON.stringify(body), {
      status,
      headers: { "Content-Type": "application/json" },
    });
  };
  return { client: new SimforgeClient("", fetchImpl), calls };
}

describe("SimforgeClient", () => {
  it("posts JSON bodies to the documented endpoints", async () => {
    const { client, calls } = clientWith(200, { id: "x" });
    await client.submit("desc", "gated", "llm");
    await client.approve("x", "me", "fine");
    await client.reject("x", "me", "because");
    await client.execute("x", 7);
    await client.verify("x", "me");
    expect(calls.map((c) => c.url)).toEqual([
      "/sessions",
      "/sessions/x/approve",
      "/sessions/x/reject",
      "/sessions/x/execute",
      "/sessions/x/verify",
    ]);
    expect(JSON.parse(String(calls[0]?.init?.body))).toEqual({
      description: "desc",
      mode: "gated",
      frontend: "llm",
    });
    expect(JSON.parse(String(calls[3]?.init?.body))).toEqual({ seed: 7 });
    expect(calls.every((c) => c.init?.method === "POST")).toBe(true);
  });

  it("omits the seed when not overridden", async () => {
    const { client, calls } = clientWith(200, {});
    await client.execute("x");
    expect(JSON.parse(String(calls[0]?.init?.body))).toEqual({});
  });

  it("surfaces the API's error detail with status", async () => {
    const { client } = clientWith(409, { detail: "execute not allowed in state Generated" });
    await expect(client.execute("x")).rejects.toThrowError(ApiError);
    await expect(client.execute("x")).rejects.toMatchObject({
      status: 409,
      message: expect.stringContaining("not allowed"),
    });
  });

  it("prefixes a base URL", async () => {
    const calls: Captured[] = [];
    const fetchImpl = async (url: string, init?: RequestInit) => {
      calls.push({ url, init });
      return new Response("[]", { status: 200 });
    };
    const client = new SimforgeClient("http://127.0.0.1:9999", fetchImpl);
    await client.listSessions();
    expect(calls[0]?.url).toBe("http://127.0.0.1:9999/sessions");
    expect(client.plotUrl("abc", 0)).toBe("http://127.0.0.1:9999/sessions/abc/runs/0/plot.svg");
  });
});
