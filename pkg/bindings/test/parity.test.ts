/**
 * Parity suite: every binding result must equal the artifact of an
 * independent CLI invocation, parsed back with the test's own readers.
 * The CLI runner and parsers here are deliberately separate from the
 * binding internals so a shared bug cannot cancel out.
 */

import { spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, test } from "vitest";

import {
  BenchError,
  BoundGraphHandle,
  MissingNodeError,
  NotEnoughEdgesError,
  ParseError,
  ReleasedHandleError,
  SamplingError,
  SingleClassError,
  ValidationError,
  bindAuroc,
  bindLoad,
  bindSampleRandom,
  bindSampleRmsd,
  bindSplit,
  bindStats,
} from "../src/index.js";
import type { MatrixInput, PlanMapping, SplitMode } from "../src/index.js";
import { CORPUS_SIZE, T_MAX, buildGraph, buildMatrix, buildScores } from "./corpus.js";
import type { ToyGraph } from "./corpus.js";

let root: string;

beforeAll(() => {
  root = mkdtempSync(join(tmpdir(), "dtiparity-"));
});

afterAll(() => {
  rmSync(root, { recursive: true, force: true });
});

/** Direct CLI invocation, bypassing the binding's runner on purpose. */
function cli(args: string[]): void {
  const res = spawnSync("dtibench", args, { encoding: "utf8" });
  if (res.error) throw res.error;
  expect(res.status, res.stderr).toBe(0);
}

function writeEdges(path: string, g: ToyGraph): void {
  writeFileSync(path, g.edges.map(([d, p]) => d + "\t" + p + "\n").join(""), "utf8");
}

function writeMatrix(path: string, m: MatrixInput): void {
  let text = "id\t" + m.ids.join("\t") + "\n";
  m.ids.forEach((id, i) => {
    text += id + "\t" + m.values[i]!.map(String).join("\t") + "\n";
  });
  writeFileSync(path, text, "utf8");
}

function parseStatsRow(path: string): Record<string, string> {
  // the table is CRLF-terminated CSV
  const lines = readFileSync(path, "utf8").split(/\r?\n/).filter((l) => l !== "");
  const header = lines[0]!.split(",");
  const cells = lines[1]!.split(",");
  expect(cells.length).toBe(header.length);
  const row: Record<string, string> = {};
  header.forEach((h, i) => {
    row[h] = cells[i]!;
  });
  return row;
}

function parseSampleRows(path: string) {
  const lines = readFileSync(path, "utf8").trim().split("\n");
  expect(lines[0]).toBe("drug_id\tprotein_id\tlabel\twindow\trmsd\tprovenance");
  return lines.slice(1).map((line) => {
    const c = line.split("\t");
    expect(c.length).toBe(6);
    return {
      drug: c[0]!,
      protein: c[1]!,
      label: Number(c[2]!),
      window: c[3]!,
      rmsd: c[4]!,
      provenance: c[5]!,
    };
  });
}

interface CaseSetup {
  g: ToyGraph;
  matrix: MatrixInput;
  edgesPath: string;
  handle: BoundGraphHandle;
}

function setupCase(i: number): CaseSetup {
  const g = buildGraph(i);
  const matrix = buildMatrix(g, i);
  const edgesPath = join(root, `${g.name}.tsv`);
  writeEdges(edgesPath, g);
  // alternate the two load paths: from pairs and from a file
  const handle =
    i % 2 === 0 ? bindLoad(g.edges, { name: g.name }) : bindLoad(edgesPath);
  return { g, matrix, edgesPath, handle };
}

// populated across the corpus so the suite provably hits both windows
const windowCounts = { train: 0, holdout: 0, fallback: 0 };

describe("parity corpus", () => {
  for (let i = 0; i < CORPUS_SIZE; i++) {
    const mode: SplitMode = (["Sp", "Sd", "St"] as const)[i % 3]!;

    test(`graph ${i}: stats, split ${mode}, samplers, auroc`, () => {
      const { g, matrix, edgesPath, handle } = setupCase(i);
      try {
        expect(handle.name).toBe(g.name);
        expect(handle.edgeCount).toBe(g.edges.length);

        // stats
        const statsOut = join(root, `stats${i}`);
        cli(["stats", "--edges", edgesPath, "--out", statsOut, "--no-figures"]);
        expect(bindStats(handle)).toEqual(parseStatsRow(join(statsOut, "stats.csv")));

        // split; even graphs run repeated k-fold, odd ones a single plan
        const splitOut = join(root, `split${i}`);
        const seed = 7 + i;
        if (i % 2 === 0) {
          cli([
            "split", "--edges", edgesPath, "--mode", mode,
            "--k", "3", "--repeats", "2", "--seed", String(seed),
            "--out", splitOut,
          ]);
          const mine = bindSplit(handle, { mode, seed, k: 3, repeats: 2 });
          const theirs = [0, 1].map(
            (r) =>
              JSON.parse(
                readFileSync(join(splitOut, `plan_rep${r}.json`), "utf8"),
              ) as PlanMapping,
          );
          expect(mine).toEqual(theirs);
        } else {
          const ratioArgs: string[] =
            i % 5 === 1 ? ["--ratios", "0.6,0.2,0.2"] : [];
          cli([
            "split", "--edges", edgesPath, "--mode", mode,
            ...ratioArgs, "--seed", String(seed), "--out", splitOut,
          ]);
          const mine = bindSplit(handle, {
            mode,
            seed,
            ...(i % 5 === 1 ? { ratios: [0.6, 0.2, 0.2] as const } : {}),
          });
          const theirs = JSON.parse(
            readFileSync(join(splitOut, "plan.json"), "utf8"),
          ) as PlanMapping;
          expect(mine).toEqual(theirs);
        }

        // uniform negative sampler, occasionally oversampled
        const ratio = i % 7 === 3 ? 2 : 1;
        const randOut = join(root, `rand${i}`);
        cli([
          "sample", "--edges", edgesPath, "--sampler", "random",
          "--ratio", String(ratio), "--seed", String(11 + i), "--out", randOut,
        ]);
        const mineRand = bindSampleRandom(handle, { seed: 11 + i, ratio });
        expect(mineRand.records).toEqual(parseSampleRows(join(randOut, "sample.tsv")));
        const randSummary = JSON.parse(
          readFileSync(join(randOut, "summary.json"), "utf8"),
        );
        expect(mineRand.summary).toEqual({
          positives: randSummary.positives,
          trainNegatives: randSummary.train_negatives,
          holdoutNegatives: randSummary.holdout_negatives,
          fallbacks: randSummary.fallbacks,
        });

        // rmsd-window sampler; the binding serialises the matrix itself
        const rmsdPath = join(root, `rmsd${i}.tsv`);
        writeMatrix(rmsdPath, matrix);
        const rmsdOut = join(root, `rmsdout${i}`);
        cli([
          "sample", "--edges", edgesPath, "--sampler", "rmsd-window",
          "--rmsd", rmsdPath, "--t", String(T_MAX),
          "--seed", String(23 + i), "--out", rmsdOut,
        ]);
        const mineRmsd = bindSampleRmsd(handle, {
          rmsd: matrix,
          seed: 23 + i,
          t: T_MAX,
        });
        expect(mineRmsd.records).toEqual(parseSampleRows(join(rmsdOut, "sample.tsv")));
        windowCounts.train += mineRmsd.summary.trainNegatives;
        windowCounts.holdout += mineRmsd.summary.holdoutNegatives;
        windowCounts.fallback += mineRmsd.summary.fallbacks;

        // ranking metrics
        const { scores, labels } = buildScores(i);
        const scoresPath = join(root, `scores${i}.csv`);
        writeFileSync(
          scoresPath,
          "score,label\n" + scores.map((s, j) => `${s},${labels[j]}`).join("\n") + "\n",
          "utf8",
        );
        const metricsOut = join(root, `metrics${i}`);
        cli(["metrics", "--scores", scoresPath, "--out", metricsOut]);
        const theirsMetrics = JSON.parse(
          readFileSync(join(metricsOut, "metrics.json"), "utf8"),
        );
        expect(bindAuroc(scores, labels)).toEqual(theirsMetrics);
      } finally {
        handle.release();
      }
    });
  }

  test("corpus exercises both sampling windows", () => {
    expect(windowCounts.train).toBeGreaterThan(0);
    expect(windowCounts.holdout).toBeGreaterThan(0);
  });
});

describe("typed errors", () => {
  test("malformed edge list raises ParseError at load", () => {
    const path = join(root, "bad.tsv");
    writeFileSync(path, "D1\tP1\njustonecolumn\n", "utf8");
    try {
      bindLoad(path);
      expect.unreachable("load should have failed");
    } catch (err) {
      expect(err).toBeInstanceOf(ParseError);
      const pe = err as ParseError;
      expect(pe.kind).toBe("parse-error");
      expect(pe.line).toBe(2);
    }
  });

  test("ratios that do not sum to 1 raise ValidationError", () => {
    const h = bindLoad(buildGraph(0).edges, { name: "ratios" });
    try {
      expect(() =>
        bindSplit(h, { mode: "Sp", seed: 1, ratios: [0.5, 0.4, 0.4] }),
      ).toThrowError(ValidationError);
      try {
        bindSplit(h, { mode: "Sp", seed: 1, ratios: [0.5, 0.4, 0.4] });
      } catch (err) {
        expect((err as ValidationError).errors).toHaveLength(1);
        expect((err as ValidationError).errors[0]).toMatch(/do not sum to 1/);
      }
    } finally {
      h.release();
    }
  });

  test("single-class labels raise SingleClassError", () => {
    expect(() => bindAuroc([0.2, 0.7], [1, 1])).toThrowError(SingleClassError);
  });

  test("mismatched score and label lengths raise ValidationError locally", () => {
    expect(() => bindAuroc([0.2, 0.7], [1])).toThrowError(ValidationError);
  });

  test("a graph with no non-edges raises SamplingError", () => {
    const full: [string, string][] = [];
    for (const d of ["D1", "D2"]) for (const p of ["P1", "P2"]) full.push([d, p]);
    const h = bindLoad(full, { name: "complete" });
    try {
      expect(() => bindSampleRandom(h, { seed: 1 })).toThrowError(SamplingError);
    } finally {
      h.release();
    }
  });

  test("a protein absent from the matrix raises MissingNodeError", () => {
    const h = bindLoad(
      [
        ["D1", "P1"],
        ["D1", "P2"],
      ],
      { name: "gap" },
    );
    try {
      bindSampleRmsd(h, {
        rmsd: { ids: ["P1"], values: [[0]] },
        seed: 1,
        t: T_MAX,
      });
      expect.unreachable("sampler should have failed");
    } catch (err) {
      expect(err).toBeInstanceOf(MissingNodeError);
      expect((err as MissingNodeError).nodeId).toBe("P2");
      expect((err as MissingNodeError).nodeKind).toBe("protein");
    } finally {
      h.release();
    }
  });

  test("too few edges for the fold count raise NotEnoughEdgesError", () => {
    const h = bindLoad(
      [
        ["D1", "P1"],
        ["D2", "P2"],
      ],
      { name: "sparse" },
    );
    try {
      expect(() =>
        bindSplit(h, { mode: "Sp", seed: 1, k: 3, repeats: 1 }),
      ).toThrowError(NotEnoughEdgesError);
    } finally {
      h.release();
    }
  });

  test("released handles fail cleanly and release is idempotent", () => {
    const h = bindLoad(buildGraph(1).edges, { name: "released" });
    expect(h.isReleased).toBe(false);
    h.release();
    expect(h.isReleased).toBe(true);
    expect(() => bindStats(h)).toThrowError(ReleasedHandleError);
    expect(() => bindSampleRandom(h, { seed: 1 })).toThrowError(ReleasedHandleError);
    expect(() => h.release()).not.toThrow();
  });

  test("a missing edge-list file surfaces as a typed error", () => {
    try {
      bindLoad(join(root, "does-not-exist.tsv"));
      expect.unreachable("load should have failed");
    } catch (err) {
      expect(err).toBeInstanceOf(BenchError);
      expect(err).toBeInstanceOf(ValidationError);
    }
  });
});
