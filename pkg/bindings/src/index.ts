/**
 * Node bindings for the dtibench toolkit.
 *
 * Each operation shells out to the CLI with explicit seeds, reads the
 * artifacts back and returns plain objects.  No algorithm is reimplemented
 * here, so a binding result is byte-for-byte the CLI result parsed back.
 */

import { copyFileSync, readFileSync, readdirSync } from "node:fs";
import { basename, join } from "node:path";

import { makeTempDir, removeTempDir, runCli, withTempDir } from "./cli.js";
import {
  EdgePair,
  MatrixInput,
  PlanMapping,
  SampleRecord,
  StatsRow,
  readPlanJson,
  readSampleTsv,
  readStatsCsv,
  writeEdgeTsv,
  writeMatrixTsv,
  writeScoresCsv,
} from "./formats.js";
import { ReleasedHandleError, ValidationError } from "./errors.js";

export * from "./errors.js";
export type {
  EdgePair,
  FoldMapping,
  MatrixInput,
  PlanMapping,
  SampleRecord,
  StatsRow,
} from "./formats.js";

const NAME_RE = /^[A-Za-z0-9][A-Za-z0-9._-]*$/;

/**
 * A loaded interaction graph.
 *
 * The handle owns a private copy of the edge list, so later changes to the
 * source file cannot desynchronise operations.  After release() every
 * operation fails with ReleasedHandleError.
 */
export class BoundGraphHandle {
  readonly name: string;
  readonly edgeCount: number;
  private readonly dir: string;
  private readonly path: string;
  private released = false;

  /** @internal use bindLoad() */
  constructor(name: string, dir: string, path: string, edgeCount: number) {
    this.name = name;
    this.dir = dir;
    this.path = path;
    this.edgeCount = edgeCount;
  }

  get isReleased(): boolean {
    return this.released;
  }

  /** Path of the managed edge-list copy; throws once released. */
  get edgesPath(): string {
    if (this.released) {
      throw new ReleasedHandleError(`graph handle '${this.name}' was released`);
    }
    return this.path;
  }

  /** Drop the managed copy.  Safe to call more than once. */
  release(): void {
    if (this.released) return;
    this.released = true;
    removeTempDir(this.dir);
  }
}

export interface LoadOptions {
  /**
   * Dataset name; defaults to the source file's stem, or "graph" for
   * in-memory edges.  It names the handle's managed file, so the stats
   * table reports it as the dataset.
   */
  name?: string;
}

/**
 * Load an edge list (a TSV path or an array of [drug, protein] pairs) and
 * return a handle.  The file is parsed by the core immediately, so malformed
 * input fails here, not at first use.
 */
export function bindLoad(
  source: string | readonly EdgePair[],
  opts: LoadOptions = {},
): BoundGraphHandle {
  const name =
    opts.name ?? (typeof source === "string" ? stemOf(source) : "graph");
  if (!NAME_RE.test(name)) {
    throw new ValidationError(`bad graph name ${JSON.stringify(name)}`);
  }
  const dir = makeTempDir();
  try {
    const path = join(dir, `${name}.tsv`);
    if (typeof source === "string") {
      try {
        copyFileSync(source, path);
      } catch (err) {
        const msg = err instanceof Error ? err.message : String(err);
        throw new ValidationError(`cannot read edge list ${source}: ${msg}`);
      }
    } else {
      writeEdgeTsv(path, source);
    }
    const check = join(dir, "load-check");
    runCli(["stats", "--edges", path, "--out", check, "--no-figures"]);
    const row = statsRowFor(readStatsCsv(join(check, "stats.csv")), name);
    const edgeCount = Number(row["Total number of edges"]);
    removeTempDir(check);
    return new BoundGraphHandle(name, dir, path, edgeCount);
  } catch (err) {
    removeTempDir(dir);
    throw err;
  }
}

function stemOf(path: string): string {
  const base = basename(path);
  const dot = base.lastIndexOf(".");
  return dot > 0 ? base.slice(0, dot) : base;
}

function statsRowFor(rows: StatsRow[], dataset: string): StatsRow {
  const row = rows.find((r) => r["dataset"] === dataset);
  if (!row) {
    throw new ValidationError(`stats table has no row for dataset '${dataset}'`);
  }
  return row;
}

/**
 * Network statistics, keyed by the CSV header labels.  Values stay the
 * exact strings the CLI wrote (counts, density with two decimals).
 */
export function bindStats(handle: BoundGraphHandle): StatsRow {
  const edges = handle.edgesPath;
  return withTempDir((out) => {
    runCli(["stats", "--edges", edges, "--out", out, "--no-figures"]);
    return statsRowFor(readStatsCsv(join(out, "stats.csv")), handle.name);
  });
}

export type SplitMode = "Sp" | "Sd" | "St";

export interface SplitOptions {
  mode: SplitMode;
  seed: number;
  /** Train/val/test fractions; the CLI default is 0.75/0.15/0.10. */
  ratios?: readonly [number, number, number];
  /** Fold count; switches to repeated k-fold plans. */
  k?: number;
  /** Repeat count for k-fold mode (CLI default 5). */
  repeats?: number;
  valFraction?: number;
}

export function bindSplit(
  handle: BoundGraphHandle,
  opts: SplitOptions & { k: number },
): PlanMapping[];
export function bindSplit(
  handle: BoundGraphHandle,
  opts: SplitOptions & { k?: undefined },
): PlanMapping;
export function bindSplit(
  handle: BoundGraphHandle,
  opts: SplitOptions,
): PlanMapping | PlanMapping[] {
  const edges = handle.edgesPath;
  const args = [
    "split",
    "--edges", edges,
    "--mode", opts.mode,
    "--seed", String(opts.seed),
  ];
  if (opts.ratios) args.push("--ratios", opts.ratios.join(","));
  if (opts.k !== undefined) args.push("--k", String(opts.k));
  if (opts.repeats !== undefined) args.push("--repeats", String(opts.repeats));
  if (opts.valFraction !== undefined) {
    args.push("--val-fraction", String(opts.valFraction));
  }
  return withTempDir((out) => {
    runCli([...args, "--out", out]);
    if (opts.k === undefined) {
      return readPlanJson(join(out, "plan.json"));
    }
    const reps = readdirSync(out)
      .map((f) => /^plan_rep(\d+)\.json$/.exec(f))
      .filter((m): m is RegExpExecArray => m !== null)
      .sort((a, b) => Number(a[1]) - Number(b[1]));
    return reps.map((m) => readPlanJson(join(out, m[0])));
  });
}

export interface SampleResult {
  /** Positives first, then negatives, as ordered in the artifact. */
  records: SampleRecord[];
  summary: {
    positives: number;
    trainNegatives: number;
    holdoutNegatives: number;
    fallbacks: number;
  };
}

function runSample(handle: BoundGraphHandle, args: string[]): SampleResult {
  const edges = handle.edgesPath;
  return withTempDir((out) => {
    runCli(["sample", "--edges", edges, ...args, "--out", out]);
    const records = readSampleTsv(join(out, "sample.tsv"));
    const raw = JSON.parse(
      readFileSync(join(out, "summary.json"), "utf8"),
    ) as Record<string, number>;
    return {
      records,
      summary: {
        positives: raw["positives"] ?? 0,
        trainNegatives: raw["train_negatives"] ?? 0,
        holdoutNegatives: raw["holdout_negatives"] ?? 0,
        fallbacks: raw["fallbacks"] ?? 0,
      },
    };
  });
}

export interface RandomSampleOptions {
  seed: number;
  /** Negatives per positive (CLI default 1). */
  ratio?: number;
}

/** Uniform negative sampling: one random non-edge per positive by default. */
export function bindSampleRandom(
  handle: BoundGraphHandle,
  opts: RandomSampleOptions,
): SampleResult {
  const args = ["--sampler", "random", "--seed", String(opts.seed)];
  if (opts.ratio !== undefined) args.push("--ratio", String(opts.ratio));
  return runSample(handle, args);
}

export interface RmsdSampleOptions {
  /** RMSD matrix: a TSV path or an in-memory square matrix. */
  rmsd: string | MatrixInput;
  seed: number;
  /** Train-window upper bound in angstrom (CLI default 6.0). */
  t?: number;
  ratio?: number;
}

/** Structure-aware negative sampling over RMSD windows. */
export function bindSampleRmsd(
  handle: BoundGraphHandle,
  opts: RmsdSampleOptions,
): SampleResult {
  return withTempDir((dir) => {
    let rmsdPath: string;
    if (typeof opts.rmsd === "string") {
      rmsdPath = opts.rmsd;
    } else {
      rmsdPath = join(dir, "rmsd.tsv");
      writeMatrixTsv(rmsdPath, opts.rmsd);
    }
    const args = [
      "--sampler", "rmsd-window",
      "--rmsd", rmsdPath,
      "--seed", String(opts.seed),
    ];
    if (opts.t !== undefined) args.push("--t", String(opts.t));
    if (opts.ratio !== undefined) args.push("--ratio", String(opts.ratio));
    return runSample(handle, args);
  });
}

export interface RankingMetrics {
  auroc: number;
  auprc: number;
  n: number;
}

/**
 * AUROC/AUPRC for a scored binary set.  Labels must contain both classes;
 * a one-class input raises SingleClassError from the core.
 */
export function bindAuroc(
  scores: readonly number[],
  labels: readonly number[],
): RankingMetrics {
  if (scores.length !== labels.length) {
    throw new ValidationError(
      `got ${scores.length} scores for ${labels.length} labels`,
    );
  }
  if (scores.length === 0) {
    throw new ValidationError("scores are empty");
  }
  return withTempDir((dir) => {
    const path = join(dir, "scores.csv");
    writeScoresCsv(path, scores, labels);
    const res = runCli(["metrics", "--scores", path]);
    return JSON.parse(res.stdout) as RankingMetrics;
  });
}
