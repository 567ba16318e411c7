/**
 * Subprocess plumbing.  Every binding call shells out to the dtibench CLI;
 * nothing is computed on this side of the boundary.
 */

import { spawnSync } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { BenchError, errorFromStderr } from "./errors.js";

export interface CliResult {
  stdout: string;
  stderr: string;
}

interface Launcher {
  cmd: string;
  prefix: string[];
}

let launcher: Launcher | null = null;

/**
 * Locate the CLI once per process.  DTIBENCH_BIN overrides; otherwise the
 * `dtibench` console script is preferred and `python3 -m dtibench.cli` is
 * the fallback for environments where the entry point is not on PATH.
 */
function resolveLauncher(): Launcher {
  const override = process.env["DTIBENCH_BIN"];
  if (override) return { cmd: override, prefix: [] };
  const probe = spawnSync("dtibench", ["--version"], { encoding: "utf8" });
  if (!probe.error && probe.status === 0) return { cmd: "dtibench", prefix: [] };
  return { cmd: "python3", prefix: ["-m", "dtibench.cli"] };
}

export function runCli(args: string[]): CliResult {
  launcher ??= resolveLauncher();
  const res = spawnSync(launcher.cmd, [...launcher.prefix, ...args], {
    encoding: "utf8",
    maxBuffer: 64 * 1024 * 1024,
  });
  if (res.error) {
    throw new BenchError(`could not launch ${launcher.cmd}: ${res.error.message}`);
  }
  if (res.status !== 0) {
    throw errorFromStderr(res.stderr ?? "");
  }
  return { stdout: res.stdout ?? "", stderr: res.stderr ?? "" };
}

export function makeTempDir(): string {
  return mkdtempSync(join(tmpdir(), "dtibind-"));
}

export function removeTempDir(dir: string): void {
  rmSync(dir, { recursive: true, force: true });
}

/** Run `fn` with a scratch directory that is removed afterwards. */
export function withTempDir<T>(fn: (dir: string) => T): T {
  const dir = makeTempDir();
  try {
    return fn(dir);
  } finally {
    removeTempDir(dir);
  }
}
