import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["test/**/*.test.ts"],
    // Every assertion shells out to the CLI, so individual tests are slow.
    testTimeout: 120_000,
    hookTimeout: 120_000,
  },
});
