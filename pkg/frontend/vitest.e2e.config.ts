import { defineConfig } from "vitest/config";

// End-to-end run against a real inference server: globalSetup trains a
// small toy model through the Python CLI (cached between runs) and
// spawns `superchat serve`.
export default defineConfig({
  test: {
    environment: "jsdom",
    include: ["e2e/**/*.test.ts"],
    globalSetup: ["e2e/global-setup.ts"],
    testTimeout: 120_000,
    hookTimeout: 300_000,
  },
});
