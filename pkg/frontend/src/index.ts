/**
 * TypeScript bindings for the shield correction engine.
 *
 * The binding mirrors the engine's construction-then-forward API: build a
 * handle once from a requirement file, then push prediction batches through
 * `forward` (corrected batch out) and pull cotangent batches back through
 * `backward`. The engine itself runs out of process: every call drives the
 * Python CLI through its documented file formats (CSV batches with
 * 17-significant-digit cells, so values cross the boundary bit-exactly).
 */

import { spawnSync } from "node:child_process";
import { mkdtempSync, rmSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import * as path from "node:path";

// ---------------------------------------------------------------------------
// errors: one class per CLI failure class, plus parse/compile specializations

export class ShieldError extends Error {
  constructor(message: string, readonly exitCode: number | null = null) {
    super(message);
    this.name = new.target.name;
  }
}

/** Requirement file failed to parse or compile (CLI exit code 2). */
export class RequirementError extends ShieldError {}
export class RequirementSyntaxError extends RequirementError {}
export class MixedDialectError extends RequirementError {}
export class VariableOutOfRangeError extends RequirementError {}
export class UnsatisfiableError extends RequirementError {}
export class InfeasibleError extends RequirementError {}
export class EngineMismatchError extends RequirementError {}

/** The corrected output failed the engine's own re-check (CLI exit code 3). */
export class InternalGuaranteeError extends ShieldError {}

/** Batch shape or content rejected before reaching the engine. */
export class ShapeMismatchError extends ShieldError {}

function classifyFailure(stderr: string, exitCode: number | null): ShieldError {
  const message = stderr.trim() || `shield CLI failed with exit code ${exitCode}`;
  if (exitCode === 3) return new InternalGuaranteeError(message, exitCode);
  if (/no model/.test(message)) return new UnsatisfiableError(message, exitCode);
  if (/empty region/.test(message)) return new InfeasibleError(message, exitCode);
  if (/dialect differs/.test(message)) return new MixedDialectError(message, exitCode);
  if (/out of range/.test(message)) return new VariableOutOfRangeError(message, exitCode);
  if (/incompatible|hierarchy engine requires/.test(message))
    return new EngineMismatchError(message, exitCode);
  if (/column \d+: expected/.test(message))
    return new RequirementSyntaxError(message, exitCode);
  if (exitCode === 2) return new RequirementError(message, exitCode);
  return new ShieldError(message, exitCode);
}

// ---------------------------------------------------------------------------
// engine invocation

export interface ShieldOptions {
  /** Python interpreter running the engine (default: $SHIELD_PYTHON or python3). */
  python?: string;
  /** Extra PYTHONPATH entry so `python -m shield` resolves without installation. */
  pythonPath?: string;
  engine?: "auto" | "hierarchy" | "general" | "linear";
  ordering?: number[];
  strictEpsilon?: number;
  tolerance?: number;
  fmCap?: number;
}

/** dist/index.js sits in frontend/dist, so ../../src is the engine source tree. */
const DEFAULT_PYTHON_PATH = path.resolve(__dirname, "..", "..", "src");

function runEngine(args: string[], options: ShieldOptions): string {
  const python = options.python ?? process.env.SHIELD_PYTHON ?? "python3";
  const extra = options.pythonPath ?? process.env.SHIELD_PYTHONPATH ?? DEFAULT_PYTHON_PATH;
  const pythonPath = process.env.PYTHONPATH
    ? `${extra}${path.delimiter}${process.env.PYTHONPATH}`
    : extra;
  const proc = spawnSync(python, ["-m", "shield", ...args], {
    encoding: "utf8",
    env: { ...process.env, PYTHONPATH: pythonPath },
    maxBuffer: 1 << 28,
  });
  if (proc.error) throw new ShieldError(`failed to launch ${python}: ${proc.error.message}`);
  if (proc.status !== 0) throw classifyFailure(proc.stderr ?? "", proc.status);
  return proc.stdout ?? "";
}

function planOptionArgs(options: ShieldOptions): string[] {
  const args: string[] = [];
  if (options.engine) args.push("--engine", options.engine);
  if (options.ordering) args.push("--ordering", options.ordering.join(","));
  if (options.strictEpsilon !== undefined)
    args.push("--strict-epsilon", String(options.strictEpsilon));
  if (options.tolerance !== undefined) args.push("--tolerance", String(options.tolerance));
  if (options.fmCap !== undefined) args.push("--fm-cap", String(options.fmCap));
  return args;
}

// ---------------------------------------------------------------------------
// CSV batches: 17 significant digits round-trip float64 exactly

export function formatCell(value: number): string {
  if (!Number.isFinite(value)) throw new ShapeMismatchError(`non-finite value ${value}`);
  return value.toPrecision(17);
}

export function writeBatchCsv(filePath: string, rows: number[][]): void {
  const lines = rows.map((row) => row.map(formatCell).join(","));
  writeFileSync(filePath, lines.join("\n") + "\n", "utf8");
}

export function readBatchCsv(filePath: string): number[][] {
  const text = readFileSync(filePath, "utf8");
  const rows: number[][] = [];
  for (const line of text.split("\n")) {
    if (!line.trim()) continue;
    rows.push(
      line.split(",").map((cell) => {
        const value = Number(cell.trim());
        if (cell.trim() === "" || Number.isNaN(value))
          throw new ShieldError(`unreadable cell ${JSON.stringify(cell)} in ${filePath}`);
        return value;
      }),
    );
  }
  return rows;
}

// ---------------------------------------------------------------------------
// the handle

export interface PlanSummary {
  dialect: string;
  engine: string;
  variables: number;
  requirements: number;
  derivedConstraints: number;
}

/** Opaque token tying a backward call to the forward batch it came from. */
export interface ForwardTrace {
  readonly rows: ReadonlyArray<ReadonlyArray<number>>;
}

export type Batch = number[] | number[][];

function asRows(batch: Batch, width: number, what: string): number[][] {
  const rows: number[][] = Array.isArray(batch[0])
    ? (batch as number[][])
    : [batch as number[]];
  for (const row of rows) {
    if (!Array.isArray(row) || row.length !== width)
      throw new ShapeMismatchError(
        `${what}: every row must have ${width} values, got ${(row as number[]).length}`,
      );
  }
  return rows;
}

export class ShieldHandle {
  /** @internal use buildShieldLayer */
  constructor(
    readonly numVariables: number,
    readonly requirementsPath: string,
    readonly summary: PlanSummary,
    private readonly options: ShieldOptions,
  ) {}

  get dialect(): string {
    return this.summary.dialect;
  }

  get engine(): string {
    return this.summary.engine;
  }

  /** Correct a batch; a single row in gives a single row back. */
  forward(batch: Batch): Batch {
    const rows = asRows(batch, this.numVariables, "forward");
    const corrected = this.runBatch("apply", rows);
    return Array.isArray(batch[0]) ? corrected : corrected[0];
  }

  /** Correct a batch and keep a trace token for the matching backward call. */
  forwardWithTrace(batch: Batch): { corrected: number[][]; trace: ForwardTrace } {
    const rows = asRows(batch, this.numVariables, "forward");
    return {
      corrected: this.runBatch("apply", rows),
      trace: { rows: rows.map((row) => [...row]) },
    };
  }

  /**
   * Pull a cotangent batch back through the correction recorded by `trace`.
   * The correction is deterministic, so the trace is keyed by its input rows.
   */
  backward(trace: ForwardTrace, cotangents: Batch): number[][] {
    const cotRows = asRows(cotangents, this.numVariables, "backward");
    if (cotRows.length !== trace.rows.length)
      throw new ShapeMismatchError(
        `backward: trace has ${trace.rows.length} rows, cotangents ${cotRows.length}`,
      );
    const workdir = mkdtempSync(path.join(tmpdir(), "shield-ts-"));
    try {
      const inPath = path.join(workdir, "in.csv");
      const cotPath = path.join(workdir, "cot.csv");
      const outPath = path.join(workdir, "out.csv");
      writeBatchCsv(inPath, trace.rows.map((row) => [...row]));
      writeBatchCsv(cotPath, cotRows);
      runEngine(
        [
          "vjp",
          "-r", this.requirementsPath,
          "-i", inPath,
          "--cotangent", cotPath,
          "-o", outPath,
          "-n", String(this.numVariables),
          ...planOptionArgs(this.options),
        ],
        this.options,
      );
      return readBatchCsv(outPath);
    } finally {
      rmSync(workdir, { recursive: true, force: true });
    }
  }

  private runBatch(command: "apply", rows: number[][]): number[][] {
    const workdir = mkdtempSync(path.join(tmpdir(), "shield-ts-"));
    try {
      const inPath = path.join(workdir, "in.csv");
      const outPath = path.join(workdir, "out.csv");
      writeBatchCsv(inPath, rows);
      runEngine(
        [
          command,
          "-r", this.requirementsPath,
          "-i", inPath,
          "-o", outPath,
          "-n", String(this.numVariables),
          ...planOptionArgs(this.options),
        ],
        this.options,
      );
      return readBatchCsv(outPath);
    } finally {
      rmSync(workdir, { recursive: true, force: true });
    }
  }
}

function parseSummary(stdout: string): PlanSummary {
  const pick = (re: RegExp): string => {
    const match = stdout.match(re);
    if (!match) throw new ShieldError(`unexpected compile summary:\n${stdout}`);
    return match[1];
  };
  return {
    dialect: pick(/^dialect: (.+)$/m),
    engine: pick(/^engine: (.+)$/m),
    variables: Number(pick(/^variables: (\d+)$/m)),
    requirements: Number(pick(/^requirements: (\d+)/m)),
    derivedConstraints: Number(pick(/^derived constraints: (\d+)$/m)),
  };
}

/**
 * Compile a requirement file into a correction handle.
 *
 * `numVariables` is the trailing dimension of every batch the handle will
 * see; the file may reference fewer variables (the rest pass through), never
 * more. Compile failures surface as typed errors: UnsatisfiableError,
 * InfeasibleError, RequirementSyntaxError, MixedDialectError, ...
 */
export function buildShieldLayer(
  numVariables: number,
  requirementsPath: string,
  options: ShieldOptions = {},
): ShieldHandle {
  if (!Number.isInteger(numVariables) || numVariables <= 0)
    throw new ShapeMismatchError(`numVariables must be a positive integer, got ${numVariables}`);
  const stdout = runEngine(
    [
      "compile",
      "-r", requirementsPath,
      "-n", String(numVariables),
      ...planOptionArgs(options),
    ],
    options,
  );
  return new ShieldHandle(numVariables, requirementsPath, parseSummary(stdout), options);
}
