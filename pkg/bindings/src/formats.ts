/**
 * Readers and writers for the CLI's file formats.  These stay byte-faithful:
 * numeric cells are kept as the strings the CLI wrote so round-tripping a
 * value never changes it.
 */

import { readFileSync, writeFileSync } from "node:fs";

import { ParseError, ValidationError } from "./errors.js";

export type EdgePair = readonly [drug: string, protein: string];

export function writeEdgeTsv(path: string, edges: readonly EdgePair[]): void {
  const lines = edges.map(([d, p]) => `${d}\t${p}`);
  writeFileSync(path, lines.join("\n") + "\n", "utf8");
}

/** One row of the stats table, keyed by the CSV header labels. */
export type StatsRow = Record<string, string>;

export function readStatsCsv(path: string): StatsRow[] {
  const text = readFileSync(path, "utf8");
  const lines = text.split(/\r?\n/).filter((l) => l !== "");
  if (lines.length === 0) throw new ParseError(`${path}: empty stats table`);
  const split = (line: string): string[] => {
    if (line.includes('"')) {
      throw new ParseError(`${path}: quoted CSV cells are not supported`);
    }
    return line.split(",");
  };
  const header = split(lines[0]!);
  return lines.slice(1).map((line, i) => {
    const cells = split(line);
    if (cells.length !== header.length) {
      throw new ParseError(`${path}:${i + 2}: expected ${header.length} cells`);
    }
    const row: StatsRow = {};
    header.forEach((name, j) => {
      row[name] = cells[j]!;
    });
    return row;
  });
}

/** Fold plan mapping exactly as the CLI serialises it. */
export interface FoldMapping {
  index: number;
  train: [string, string][];
  val: [string, string][];
  test: [string, string][];
  [extra: string]: unknown;
}

export interface PlanMapping {
  mode: string;
  seed: number;
  ratios: number[];
  folds: FoldMapping[];
  [extra: string]: unknown;
}

export function readPlanJson(path: string): PlanMapping {
  return JSON.parse(readFileSync(path, "utf8")) as PlanMapping;
}

export const SAMPLE_HEADER = [
  "drug_id",
  "protein_id",
  "label",
  "window",
  "rmsd",
  "provenance",
] as const;

export interface SampleRecord {
  drug: string;
  protein: string;
  label: 0 | 1;
  /** Window tag ("train", "holdout", "-") as written. */
  window: string;
  /** RMSD cell verbatim: a float repr or "NA". */
  rmsd: string;
  provenance: string;
}

export function readSampleTsv(path: string): SampleRecord[] {
  const text = readFileSync(path, "utf8");
  const lines = text.split(/\r?\n/).filter((l) => l !== "");
  if (lines[0] !== SAMPLE_HEADER.join("\t")) {
    throw new ParseError(`${path}: unexpected sample header`);
  }
  return lines.slice(1).map((line, i) => {
    const cells = line.split("\t");
    if (cells.length !== SAMPLE_HEADER.length) {
      throw new ParseError(`${path}:${i + 2}: expected ${SAMPLE_HEADER.length} columns`);
    }
    const label = cells[2]!;
    if (label !== "0" && label !== "1") {
      throw new ParseError(`${path}:${i + 2}: label must be 0 or 1`);
    }
    return {
      drug: cells[0]!,
      protein: cells[1]!,
      label: label === "1" ? 1 : 0,
      window: cells[3]!,
      rmsd: cells[4]!,
      provenance: cells[5]!,
    };
  });
}

/** Square similarity/distance matrix with row ids matching column ids. */
export interface MatrixInput {
  ids: readonly string[];
  values: readonly (readonly number[])[];
}

export function writeMatrixTsv(path: string, matrix: MatrixInput): void {
  const { ids, values } = matrix;
  if (values.length !== ids.length) {
    throw new ValidationError(`matrix has ${values.length} rows for ${ids.length} ids`);
  }
  const lines = ["id\t" + ids.join("\t")];
  ids.forEach((name, i) => {
    const row = values[i]!;
    if (row.length !== ids.length) {
      throw new ValidationError(`matrix row ${name} has ${row.length} cells`);
    }
    lines.push(name + "\t" + row.map((v) => String(v)).join("\t"));
  });
  writeFileSync(path, lines.join("\n") + "\n", "utf8");
}

export function writeScoresCsv(
  path: string,
  scores: readonly number[],
  labels: readonly number[],
): void {
  const lines = ["score,label"];
  scores.forEach((s, i) => lines.push(`${s},${labels[i]}`));
  writeFileSync(path, lines.join("\n") + "\n", "utf8");
}
