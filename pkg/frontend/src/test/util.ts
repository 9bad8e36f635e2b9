/** Shared test helpers: fixtures, an independent CLI runner, seeded fuzz. */

import { spawnSync } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import * as path from "node:path";

import { readBatchCsv, writeBatchCsv } from "../index";

export const TRAFFIC_TEXT =
  "not y_0 or y_1 or y_2 or y_3\n" +
  "not y_0 or not y_1 or not y_2\n" +
  "not y_0 or not y_1 or not y_3\n" +
  "not y_0 or not y_2 or not y_3\n";

export const HEMOGLOBIN_TEXT = "y_0 - y_1 >= 0\ny_2 - y_3 >= 0\n";

export function tempDir(): string {
  return mkdtempSync(path.join(tmpdir(), "shield-ts-test-"));
}

export function writeFixture(dir: string, name: string, content: string): string {
  const file = path.join(dir, name);
  writeFileSync(file, content, "utf8");
  return file;
}

const PYTHON = process.env.SHIELD_PYTHON ?? "python3";
const ENGINE_SRC = path.resolve(__dirname, "..", "..", "..", "src");

/** Drive the CLI directly, bypassing the binding, for parity comparisons. */
export function cliApply(requirements: string, rows: number[][], numVariables: number): number[][] {
  const dir = tempDir();
  const inPath = path.join(dir, "in.csv");
  const outPath = path.join(dir, "out.csv");
  writeBatchCsv(inPath, rows);
  const proc = spawnSync(
    PYTHON,
    ["-m", "shield", "apply", "-r", requirements, "-i", inPath, "-o", outPath, "-n", String(numVariables)],
    {
      encoding: "utf8",
      env: {
        ...process.env,
        PYTHONPATH: process.env.PYTHONPATH
          ? `${ENGINE_SRC}${path.delimiter}${process.env.PYTHONPATH}`
          : ENGINE_SRC,
      },
    },
  );
  if (proc.status !== 0) throw new Error(`cli apply failed: ${proc.stderr}`);
  return readBatchCsv(outPath);
}

/** Deterministic PRNG so fuzz cases are reproducible across runs. */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

function randInt(rng: () => number, lo: number, hi: number): number {
  return lo + Math.floor(rng() * (hi - lo + 1));
}

function sample(rng: () => number, n: number, k: number): number[] {
  const pool = Array.from({ length: n }, (_, i) => i);
  for (let i = pool.length - 1; i > 0; i--) {
    const j = Math.floor(rng() * (i + 1));
    [pool[i], pool[j]] = [pool[j], pool[i]];
  }
  return pool.slice(0, k);
}

/** Satisfiable clause file: every clause keeps one planted-true literal. */
export function plantedCnfText(rng: () => number, maxVars = 8, maxClauses = 12): [number, string] {
  const n = randInt(rng, 1, maxVars);
  const planted = Array.from({ length: n }, () => rng() < 0.5);
  const m = randInt(rng, 1, maxClauses);
  const lines: string[] = [];
  for (let c = 0; c < m; c++) {
    const w = randInt(rng, 1, Math.min(4, n));
    const vars = sample(rng, n, w);
    const lits = vars.map((v) => ({ v, neg: rng() < 0.5 }));
    if (!lits.some(({ v, neg }) => planted[v] !== neg)) {
      const j = Math.floor(rng() * w);
      lits[j] = { v: lits[j].v, neg: !planted[lits[j].v] };
    }
    lines.push(lits.map(({ v, neg }) => `${neg ? "not " : ""}y_${v}`).join(" or "));
  }
  return [n, lines.join("\n") + "\n"];
}

/** Feasible inequality file with small integer coefficients. */
export function feasibleLinearText(rng: () => number, maxVars = 6, maxIneqs = 10): [number, string] {
  const n = randInt(rng, 1, maxVars);
  const xStar = Array.from({ length: n }, () => randInt(rng, -3, 3));
  const m = randInt(rng, 1, maxIneqs);
  const lines: string[] = [];
  for (let q = 0; q < m; q++) {
    const w = randInt(rng, 1, Math.min(3, n));
    const vars = sample(rng, n, w);
    const coeffs = vars.map((v) => ({
      v,
      c: [-3, -2, -1, 1, 2, 3][randInt(rng, 0, 5)],
    }));
    const value = coeffs.reduce((acc, { v, c }) => acc + c * xStar[v], 0);
    const bound = value - randInt(rng, 0, 3);
    const terms = coeffs
      .sort((a, b) => a.v - b.v)
      .map(({ v, c }, i) => {
        const mag = Math.abs(c);
        const body = mag === 1 ? `y_${v}` : `${mag}*y_${v}`;
        if (i === 0) return (c < 0 ? "-" : "") + body;
        return (c < 0 ? "- " : "+ ") + body;
      })
      .join(" ");
    lines.push(`${terms} >= ${bound}`);
  }
  return [n, lines.join("\n") + "\n"];
}

export function randomRows(rng: () => number, rows: number, width: number, lo: number, hi: number): number[][] {
  return Array.from({ length: rows }, () =>
    Array.from({ length: width }, () => lo + rng() * (hi - lo)),
  );
}

export function assertBitIdentical(a: number[][], b: number[][]): void {
  if (a.length !== b.length) throw new Error(`row counts differ: ${a.length} vs ${b.length}`);
  for (let i = 0; i < a.length; i++) {
    for (let j = 0; j < a[i].length; j++) {
      if (!Object.is(a[i][j], b[i][j])) {
        throw new Error(`cell [${i}][${j}] differs: ${a[i][j]} vs ${b[i][j]}`);
      }
    }
  }
}
