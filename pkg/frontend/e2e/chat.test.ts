// End-to-end: the real UI logic against a real inference server holding
// the memorized toy model (spawned by global-setup).

import { beforeEach, describe, expect, it } from "vitest";

import { ChatClient } from "../src/api.js";
import { initApp } from "../src/main.js";

const SERVER = process.env.SUPERCHAT_SERVER;
if (!SERVER) throw new Error("global setup did not provide SUPERCHAT_SERVER");

const MEMORIZED_INPUT = "你好";
const MEMORIZED_RESPONSE = "你也好";

let root: HTMLElement;

beforeEach(() => {
  document.body.innerHTML = "";
  root = document.createElement("div");
  document.body.appendChild(root);
});

describe("webchat against the toy server", () => {
  it("reports the model healthy", async () => {
    const health = await new ChatClient(SERVER).healthz();
    expect(health.status).toBe("ok");
    expect(health.model_id).toMatch(/^[0-9a-f]{16}$/);
  });

  it("displays the memorized response with one inspectable image per step", async () => {
    const app = initApp(root, new ChatClient(SERVER));
    await app.send(MEMORIZED_INPUT);

    expect(app.entries).toHaveLength(2);
    const bot = app.entries[1];
    expect(bot.author).toBe("bot");
    expect(bot.text).toBe(MEMORIZED_RESPONSE);

    // one decode step per response character plus the EOS step
    expect(bot.steps).toHaveLength(MEMORIZED_RESPONSE.length + 1);
    expect(bot.steps![bot.steps!.length - 1].char).toBe("<EOS>");
    expect(bot.stepImages).toHaveLength(bot.steps!.length);

    // every step image is a real, distinct render from the server
    const bodies: string[] = [];
    for (const url of bot.stepImages!) {
      const res = await fetch(url);
      expect(res.status).toBe(200);
      expect(res.headers.get("content-type")).toBe("image/png");
      const bytes = new Uint8Array(await res.arrayBuffer());
      expect(Array.from(bytes.slice(0, 4))).toEqual([0x89, 0x50, 0x4e, 0x47]);
      bodies.push(Buffer.from(bytes).toString("base64"));
    }
    expect(new Set(bodies).size).toBe(bodies.length); // growing partial -> distinct images

    // the inspector walks the steps
    for (let i = 0; i < bot.steps!.length; i++) {
      app.selectStep(1, i);
      const img = root.querySelector<HTMLImageElement>(".step-image");
      expect(img).not.toBeNull();
      expect(img!.src).toBe(bot.stepImages![i]);
      expect(root.querySelectorAll(".bar-row").length).toBeGreaterThan(0);
    }
  });

  it("shows an inline error for over-capacity input without clearing history", async () => {
    const app = initApp(root, new ChatClient(SERVER));
    await app.send(MEMORIZED_INPUT);
    expect(app.entries).toHaveLength(2);

    await app.send("这句话实在是太长了完全超过了十八个字符的容量限制");
    expect(app.entries).toHaveLength(4);
    expect(app.entries[3].author).toBe("error");
    expect(app.entries[3].text).toContain("capacity");
    // earlier conversation still rendered
    expect(app.entries[1].text).toBe(MEMORIZED_RESPONSE);
    const messages = root.querySelectorAll(".msg");
    expect(messages).toHaveLength(4);
    expect(root.querySelector(".msg.error")).not.toBeNull();
  });

  it("returns identical responses for identical requests", async () => {
    const client = new ChatClient(SERVER);
    const a = await client.chat(MEMORIZED_INPUT);
    const b = await client.chat(MEMORIZED_INPUT);
    expect(a).toEqual(b);
  });
});
