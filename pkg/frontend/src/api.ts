// Typed client for the inference service. The UI performs no decoding
// itself; these three endpoints are its single source of truth.

import type { Step } from "./model.js";

export interface ChatResult {
  response: string;
  model_id: string;
  steps?: Step[];
}

export interface Health {
  status: string;
  model_id: string;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
  }
}

async function errorMessage(res: Response): Promise<string> {
  try {
    const body = (await res.json()) as { error?: string };
    if (body && typeof body.error === "string") return body.error;
  } catch {
    // fall through to the generic message
  }
  return `request failed with status ${res.status}`;
}

export class ChatClient {
  constructor(readonly base: string = "") {}

  async chat(text: string, beamWidth?: number): Promise<ChatResult> {
    const payload: Record<string, unknown> = { text, trace: true };
    if (beamWidth && beamWidth > 1) payload.beam_width = beamWidth;
    const res = await fetch(`${this.base}/chat`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
    if (!res.ok) throw new ApiError(res.status, await errorMessage(res));
    return (await res.json()) as ChatResult;
  }

  async healthz(): Promise<Health> {
    const res = await fetch(`${this.base}/healthz`);
    if (!res.ok) throw new ApiError(res.status, await errorMessage(res));
    return (await res.json()) as Health;
  }

  renderUrl(input: string, partial: string): string {
    const q = new URLSearchParams({ input, partial });
    return `${this.base}/render?${q.toString()}`;
  }
}
