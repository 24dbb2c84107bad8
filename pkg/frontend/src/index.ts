// Thin wrapper over the gcao CLI. All numeric work happens in the core
// process; this module only serializes arrays to CSV, invokes the CLI and
// parses the artifacts back, so any numeric difference from the core is a
// bug by definition. Calls are blocking.

import { spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

export const VERSION = "0.1.0";

export interface FitTransformOptions {
  /** neighbor count for grouping and forces */
  k: number;
  /** step size coefficient (the CLI's --lambda) */
  lambda: number;
  /** number of contraction iterations */
  iters: number;
  /** "full" | "s" | "d" | "g" (default "full") */
  variant?: string;
  /** z-score features first (default true, matching the pipeline) */
  standardize?: boolean;
  /** seed recorded in the run config (contraction itself is deterministic) */
  seed?: number;
  /** python interpreter used to launch the core (default: $GCAO_PYTHON or "python3") */
  pythonPath?: string;
}

export interface Metrics {
  nmi: number;
  ari: number;
  homogeneity: number;
  acc: number;
}

function pythonOf(opts?: { pythonPath?: string }): string {
  return opts?.pythonPath ?? process.env.GCAO_PYTHON ?? "python3";
}

function runCli(python: string, args: string[]): { stdout: string; stderr: string } {
  const proc = spawnSync(python, ["-m", "gcao", ...args], {
    encoding: "utf-8",
    env: process.env,
    maxBuffer: 256 * 1024 * 1024,
  });
  if (proc.error) {
    throw new Error(`failed to launch gcao core via ${python}: ${proc.error.message}`);
  }
  if (proc.status !== 0) {
    const detail = (proc.stderr || proc.stdout || "").trim();
    throw new Error(detail.length > 0 ? detail : `gcao exited with status ${proc.status}`);
  }
  return { stdout: proc.stdout, stderr: proc.stderr };
}

function toCsv(data: number[][]): string {
  // String(x) is shortest-round-trip for doubles, so the core reads back
  // bit-identical values.
  return data.map((row) => row.map((v) => String(v)).join(",")).join("\n") + "\n";
}

function parseCsv(text: string): number[][] {
  return text
    .split("\n")
    .filter((line) => line.trim().length > 0)
    .map((line) => line.split(",").map(Number));
}

/**
 * Contract a coordinate matrix with the core pipeline and return the moved
 * coordinates. Output is identical to running `gcao run` on the same
 * CSV-serialized input: that is literally what happens underneath.
 */
export function fitTransform(data: number[][], opts: FitTransformOptions): number[][] {
  if (!Array.isArray(data) || data.length === 0 || !Array.isArray(data[0])) {
    throw new Error("fitTransform expects a non-empty 2-D numeric array");
  }
  const python = pythonOf(opts);
  const work = mkdtempSync(join(tmpdir(), "gcao-"));
  try {
    const input = join(work, "input.csv");
    const out = join(work, "out");
    writeFileSync(input, toCsv(data));
    const args = [
      "run",
      "--data", input,
      "--k", String(opts.k),
      "--lambda", String(opts.lambda),
      "--iters", String(opts.iters),
      "--variant", opts.variant ?? "full",
      "--seed", String(opts.seed ?? 0),
      "--out", out,
    ];
    if (opts.standardize === false) {
      args.push("--no-standardize");
    }
    runCli(python, args);
    return parseCsv(readFileSync(join(out, "contracted.csv"), "utf-8"));
  } finally {
    rmSync(work, { recursive: true, force: true });
  }
}

/**
 * Score a predicted labeling against ground truth with the core's metrics
 * (`gcao eval`). Both arrays are integer labels of equal length.
 */
export function evaluate(truth: number[], pred: number[], opts?: { pythonPath?: string }): Metrics {
  const python = pythonOf(opts);
  const work = mkdtempSync(join(tmpdir(), "gcao-eval-"));
  try {
    const truthPath = join(work, "truth.csv");
    const predPath = join(work, "pred.csv");
    writeFileSync(truthPath, truth.map((v) => String(v)).join("\n") + "\n");
    writeFileSync(predPath, pred.map((v) => String(v)).join("\n") + "\n");
    const { stdout } = runCli(python, ["eval", "--truth", truthPath, "--pred", predPath]);
    return JSON.parse(stdout) as Metrics;
  } finally {
    rmSync(work, { recursive: true, force: true });
  }
}

/** Version string reported by the core CLI. */
export function coreVersion(opts?: { pythonPath?: string }): string {
  return runCli(pythonOf(opts), ["--version"]).stdout.trim();
}
