// DOM layer: renders the conversation, sends chat requests, and shows
// the step inspector (per-step image + top-5 probability bars).

import { ApiError, ChatClient } from "./api.js";
import {
  ConversationEntry,
  Step,
  appendEntry,
  botEntry,
  describeStep,
  stepProbabilitySum,
} from "./model.js";

interface Selection {
  entry: number;
  step: number;
}

export interface App {
  /** Current conversation (append-only). */
  readonly entries: readonly ConversationEntry[];
  send(text: string): Promise<void>;
  selectStep(entry: number, step: number): void;
  root: HTMLElement;
}

export function initApp(root: HTMLElement, client: ChatClient): App {
  root.innerHTML = `
    <div class="header"><span class="dot" data-role="status"></span>
      <h1>superchat</h1><span class="model" data-role="model"></span></div>
    <div class="columns">
      <div class="chat">
        <div class="messages" data-role="messages"></div>
        <div class="input-bar">
          <input data-role="input" placeholder="say something..." autocomplete="off">
          <button data-role="send" disabled>send</button>
        </div>
      </div>
      <div class="inspector" data-role="inspector"><div class="hint">
        send a message, then click a decode step to inspect it</div></div>
    </div>`;

  const messagesEl = root.querySelector<HTMLElement>('[data-role="messages"]')!;
  const inspectorEl = root.querySelector<HTMLElement>('[data-role="inspector"]')!;
  const inputEl = root.querySelector<HTMLInputElement>('[data-role="input"]')!;
  const sendEl = root.querySelector<HTMLButtonElement>('[data-role="send"]')!;
  const statusEl = root.querySelector<HTMLElement>('[data-role="status"]')!;
  const modelEl = root.querySelector<HTMLElement>('[data-role="model"]')!;

  let entries: ConversationEntry[] = [];
  let inFlight = false;
  let selected: Selection | null = null;

  function syncSendButton() {
    sendEl.disabled = inFlight || inputEl.value.trim() === "";
  }

  function renderMessages() {
    // history is a pure function of the entry list
    messagesEl.innerHTML = "";
    entries.forEach((entry, ei) => {
      const el = document.createElement("div");
      el.className = `msg ${entry.author}`;
      const text = document.createElement("div");
      text.className = "text";
      text.textContent = entry.text;
      el.appendChild(text);
      if (entry.author === "bot" && entry.steps) {
        const strip = document.createElement("div");
        strip.className = "steps";
        entry.steps.forEach((step, si) => {
          const chip = document.createElement("button");
          chip.className = "step-chip";
          if (selected && selected.entry === ei && selected.step === si) {
            chip.classList.add("selected");
          }
          chip.textContent = describeStep(step);
          chip.addEventListener("click", () => selectStep(ei, si));
          strip.appendChild(chip);
        });
        el.appendChild(strip);
      }
      messagesEl.appendChild(el);
    });
    messagesEl.scrollTop = messagesEl.scrollHeight;
  }

  function renderInspector() {
    inspectorEl.innerHTML = "";
    if (!selected) {
      inspectorEl.innerHTML =
        '<div class="hint">send a message, then click a decode step to inspect it</div>';
      return;
    }
    const entry = entries[selected.entry];
    const step: Step | undefined = entry.steps?.[selected.step];
    const url = entry.stepImages?.[selected.step];
    if (!entry || !step || !url) return;

    const title = document.createElement("div");
    title.className = "inspector-title";
    title.textContent = `step ${step.position} of ${entry.steps!.length - 1}`;
    inspectorEl.appendChild(title);

    const img = document.createElement("img");
    img.className = "step-image";
    img.alt = `image classified at step ${step.position}`;
    img.src = url;
    img.addEventListener("error", () => {
      img.replaceWith(makeImageRetry(url, img));
    });
    inspectorEl.appendChild(img);

    const bars = document.createElement("div");
    bars.className = "bars";
    const subtotal = stepProbabilitySum(step);
    for (const alt of step.top5) {
      const row = document.createElement("div");
      row.className = "bar-row";
      const label = document.createElement("span");
      label.className = "bar-label";
      label.textContent = alt.char;
      const bar = document.createElement("div");
      bar.className = "bar";
      bar.style.width = `${Math.max(1, Math.round(alt.probability * 100))}%`;
      if (alt.char === step.char) bar.classList.add("chosen");
      const value = document.createElement("span");
      value.className = "bar-value";
      value.textContent = `${(alt.probability * 100).toFixed(2)}%`;
      row.append(label, bar, value);
      bars.appendChild(row);
    }
    const note = document.createElement("div");
    note.className = "bar-note";
    note.textContent = `top-5 mass ${(subtotal * 100).toFixed(2)}%`;
    bars.appendChild(note);
    inspectorEl.appendChild(bars);
  }

  function makeImageRetry(url: string, original: HTMLImageElement): HTMLElement {
    const box = document.createElement("div");
    box.className = "image-error";
    const msg = document.createElement("span");
    msg.textContent = "image failed to load";
    const retry = document.createElement("button");
    retry.textContent = "retry";
    retry.addEventListener("click", () => {
      original.src = url;
      box.replaceWith(original);
    });
    box.append(msg, retry);
    return box;
  }

  function selectStep(entry: number, step: number) {
    selected = { entry, step };
    renderMessages();
    renderInspector();
  }

  async function send(text: string): Promise<void> {
    const trimmed = text.trim();
    if (trimmed === "" || inFlight) return;
    inFlight = true;
    entries = appendEntry(entries, { author: "user", text: trimmed });
    inputEl.value = "";
    syncSendButton();
    renderMessages();
    try {
      const result = await client.chat(trimmed);
      entries = appendEntry(
        entries,
        botEntry(trimmed, result.response, result.steps ?? [], client.base),
      );
    } catch (err) {
      const message =
        err instanceof ApiError ? err.message : `network error: ${err}`;
      entries = appendEntry(entries, { author: "error", text: message });
    } finally {
      inFlight = false;
      syncSendButton();
      renderMessages();
    }
  }

  sendEl.addEventListener("click", () => void send(inputEl.value));
  inputEl.addEventListener("keydown", (ev) => {
    if (ev.key === "Enter") void send(inputEl.value);
  });
  inputEl.addEventListener("input", syncSendButton);

  client
    .healthz()
    .then((h) => {
      statusEl.classList.add("ok");
      modelEl.textContent = h.model_id;
    })
    .catch(() => {
      statusEl.classList.add("down");
      modelEl.textContent = "service unavailable";
    });

  renderMessages();
  renderInspector();
  syncSendButton();

  return {
    get entries() {
      return entries;
    },
    send,
    selectStep,
    root,
  };
}

// Browser entry point; tests import initApp directly instead.
if (typeof document !== "undefined" && document.getElementById("app")) {
  const base = new URLSearchParams(location.search).get("api") ?? "";
  initApp(document.getElementById("app")!, new ChatClient(base));
}
