// Builds toy model artifacts through the Python CLI (cached across runs)
// and spawns a real inference server for the e2e suite.

import { spawn, spawnSync } from "node:child_process";
import { existsSync, mkdirSync } from "node:fs";
import { createServer } from "node:net";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

const here = dirname(fileURLToPath(import.meta.url));
const repoRoot = join(here, "..", "..");
const artifacts = join(here, ".artifacts");
const manifest = join(artifacts, "manifest");
const checkpoint = join(artifacts, "toy.ckpt");
const config = join(here, "toy.conf");
const corpus = join(repoRoot, "tests", "data", "toy_corpus.tsv");
const python = process.env.SUPERCHAT_PYTHON ?? "python3";

function cli(args: string[]) {
  const res = spawnSync(python, ["-m", "superchat", ...args], {
    cwd: repoRoot,
    encoding: "utf-8",
  });
  if (res.status !== 0) {
    throw new Error(
      `superchat ${args[0]} failed (${res.status}):\n${res.stdout}\n${res.stderr}`,
    );
  }
}

async function freePort(): Promise<number> {
  return await new Promise((resolve, reject) => {
    const srv = createServer();
    srv.listen(0, "127.0.0.1", () => {
      const address = srv.address();
      if (address && typeof address === "object") {
        const port = address.port;
        srv.close(() => resolve(port));
      } else {
        reject(new Error("no port"));
      }
    });
  });
}

async function waitHealthy(url: string, timeoutMs: number) {
  const deadline = Date.now() + timeoutMs;
  let lastError: unknown = null;
  while (Date.now() < deadline) {
    try {
      const res = await fetch(`${url}/healthz`);
      if (res.status === 200) return;
      lastError = new Error(`healthz status ${res.status}`);
    } catch (err) {
      lastError = err;
    }
    await new Promise((r) => setTimeout(r, 300));
  }
  throw new Error(`server at ${url} never became healthy: ${lastError}`);
}

export default async function setup() {
  mkdirSync(artifacts, { recursive: true });
  if (!existsSync(join(manifest, "manifest.txt"))) {
    console.log("[e2e] preparing toy manifest...");
    cli(["prepare", "--config", config, "--corpus", corpus, "--out", manifest]);
  }
  if (!existsSync(checkpoint)) {
    console.log("[e2e] training toy checkpoint (memorization, ~10 s)...");
    cli(["train", "--config", config, "--manifest", manifest, "--checkpoint", checkpoint]);
  }

  const port = await freePort();
  const url = `http://127.0.0.1:${port}`;
  console.log(`[e2e] starting superchat serve on ${url}`);
  const server = spawn(
    python,
    ["-m", "superchat", "serve", "--config", config, "--manifest", manifest,
     "--checkpoint", checkpoint, "--bind", `127.0.0.1:${port}`],
    { cwd: repoRoot, stdio: ["ignore", "pipe", "pipe"] },
  );
  const logs: string[] = [];
  server.stdout?.on("data", (d) => logs.push(String(d)));
  server.stderr?.on("data", (d) => logs.push(String(d)));
  try {
    await waitHealthy(url, 120_000);
  } catch (err) {
    server.kill();
    throw new Error(`${err}\nserver logs:\n${logs.join("")}`);
  }

  process.env.SUPERCHAT_SERVER = url;
  return async () => {
    server.kill("SIGTERM");
    await new Promise((r) => setTimeout(r, 300));
    if (server.exitCode === null) server.kill("SIGKILL");
  };
}
