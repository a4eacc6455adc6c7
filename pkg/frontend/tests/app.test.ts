// DOM behavior with a mocked service: sending, trace display, inline
// errors, and the send-button guards.

import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { ChatClient } from "../src/api.js";
import { initApp } from "../src/main.js";

const CHAT_OK = {
  response: "你也好",
  model_id: "m1",
  steps: [
    { position: 0, char: "你", probability: 0.9, top5: [{ char: "你", probability: 0.9 }] },
    { position: 1, char: "也", probability: 0.8, top5: [{ char: "也", probability: 0.8 }] },
    { position: 2, char: "好", probability: 0.7, top5: [{ char: "好", probability: 0.7 }] },
    { position: 3, char: "<EOS>", probability: 0.99, top5: [{ char: "<EOS>", probability: 0.99 }] },
  ],
};

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

let root: HTMLElement;

beforeEach(() => {
  root = document.createElement("div");
  document.body.appendChild(root);
});

afterEach(() => {
  root.remove();
  vi.unstubAllGlobals();
});

function mockService(chatHandler: (body: any) => Response) {
  vi.stubGlobal(
    "fetch",
    vi.fn(async (url: any, init?: RequestInit) => {
      const path = String(url);
      if (path.endsWith("/healthz")) {
        return jsonResponse({ status: "ok", model_id: "m1" });
      }
      if (path.endsWith("/chat")) {
        return chatHandler(JSON.parse(String(init?.body)));
      }
      throw new Error(`unexpected fetch ${path}`);
    }),
  );
}

describe("chat flow", () => {
  it("appends a user and a bot entry with one image per step", async () => {
    mockService(() => jsonResponse(CHAT_OK));
    const app = initApp(root, new ChatClient(""));
    await app.send("你好");
    expect(app.entries).toHaveLength(2);
    expect(app.entries[0]).toMatchObject({ author: "user", text: "你好" });
    expect(app.entries[1]).toMatchObject({ author: "bot", text: "你也好" });
    expect(app.entries[1].stepImages).toHaveLength(4);
    const chips = root.querySelectorAll(".step-chip");
    expect(chips).toHaveLength(4);
    expect(root.querySelectorAll(".msg")).toHaveLength(2);
  });

  it("requests traces on every send", async () => {
    let seen: any = null;
    mockService((body) => {
      seen = body;
      return jsonResponse(CHAT_OK);
    });
    const app = initApp(root, new ChatClient(""));
    await app.send("你好");
    expect(seen.trace).toBe(true);
  });

  it("shows the inspector for a selected step", async () => {
    mockService(() => jsonResponse(CHAT_OK));
    const app = initApp(root, new ChatClient("http://api"));
    await app.send("你好");
    app.selectStep(1, 0);
    const img = root.querySelector<HTMLImageElement>(".step-image");
    expect(img).not.toBeNull();
    expect(img!.src).toBe("http://api/render?input=%E4%BD%A0%E5%A5%BD&partial=");
    expect(root.querySelectorAll(".bar-row")).toHaveLength(1);
    // last step: full partial rendered
    app.selectStep(1, 3);
    const eosImg = root.querySelector<HTMLImageElement>(".step-image");
    expect(eosImg!.src).toContain(`partial=${encodeURIComponent("你也好")}`);
  });

  it("keeps history and shows an inline error on 400", async () => {
    let calls = 0;
    mockService(() => {
      calls += 1;
      return calls === 1
        ? jsonResponse(CHAT_OK)
        : jsonResponse({ error: "input exceeds capacity: 19 chars > 18" }, 400);
    });
    const app = initApp(root, new ChatClient(""));
    await app.send("你好");
    await app.send("x".repeat(19));
    expect(app.entries).toHaveLength(4); // user, bot, user, error
    expect(app.entries[1].text).toBe("你也好"); // history intact
    expect(app.entries[3].author).toBe("error");
    expect(app.entries[3].text).toContain("capacity");
    expect(root.querySelector(".msg.error")).not.toBeNull();
  });

  it("reports network failures inline", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn(async (url: any) => {
        if (String(url).endsWith("/healthz")) {
          return jsonResponse({ status: "ok", model_id: "m1" });
        }
        throw new TypeError("fetch failed");
      }),
    );
    const app = initApp(root, new ChatClient(""));
    await app.send("hello");
    expect(app.entries[1].author).toBe("error");
    expect(app.entries[1].text).toContain("network error");
  });
});

describe("send guards", () => {
  it("ignores empty input and disables the button", async () => {
    mockService(() => jsonResponse(CHAT_OK));
    const app = initApp(root, new ChatClient(""));
    const button = root.querySelector<HTMLButtonElement>('[data-role="send"]')!;
    expect(button.disabled).toBe(true);
    await app.send("   ");
    expect(app.entries).toHaveLength(0);
    const input = root.querySelector<HTMLInputElement>('[data-role="input"]')!;
    input.value = "hey";
    input.dispatchEvent(new Event("input"));
    expect(button.disabled).toBe(false);
  });

  it("allows only one in-flight request", async () => {
    let resolveChat: (r: Response) => void;
    const gate = new Promise<Response>((res) => (resolveChat = res));
    vi.stubGlobal(
      "fetch",
      vi.fn(async (url: any) => {
        if (String(url).endsWith("/healthz")) {
          return jsonResponse({ status: "ok", model_id: "m1" });
        }
        return gate;
      }),
    );
    const app = initApp(root, new ChatClient(""));
    const first = app.send("one");
    const second = app.send("two"); // dropped: a request is in flight
    resolveChat!(jsonResponse(CHAT_OK));
    await Promise.all([first, second]);
    expect(app.entries.filter((e) => e.author === "user")).toHaveLength(1);
    expect(app.entries.filter((e) => e.author === "bot")).toHaveLength(1);
  });

  it("clears the input box after sending", async () => {
    mockService(() => jsonResponse(CHAT_OK));
    const app = initApp(root, new ChatClient(""));
    const input = root.querySelector<HTMLInputElement>('[data-role="input"]')!;
    input.value = "你好";
    input.dispatchEvent(new Event("input"));
    await app.send(input.value);
    expect(input.value).toBe("");
  });
});
