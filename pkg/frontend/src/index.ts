/**
 * Node bindings for the framepoint timestamping core.
 *
 * Stateless pass-through: every call spawns the core's `api` subcommand
 * (one JSON request on stdin, one JSON response on stdout). Doubles
 * survive the boundary bit-exactly because both sides use shortest
 * round-trip JSON encoding. Core errors surface as thrown Errors
 * carrying the core's message text.
 */

import { spawnSync } from "node:child_process";

export interface LossResult {
  value: number;
  gradient: number[];
}

export type ExtractMode = "binary" | "poisson";

export type ClassWeight = number | "auto";

export interface BindingOptions {
  /** Seconds per frame; only affects extraction output units. */
  frameDurationS?: number;
  /** Override the core command, e.g. ["python3", "-m", "framepoint"]. */
  command?: string[];
  /** Extra environment variables for the core process. */
  env?: Record<string, string>;
}

interface ApiError {
  error: string;
  message: string;
}

function candidateCommands(options?: BindingOptions): string[][] {
  if (options?.command) return [options.command];
  const fromEnv = process.env.FRAMEPOINT_CMD;
  if (fromEnv) return [fromEnv.split(" ").filter((part) => part.length > 0)];
  return [["framepoint"], ["python3", "-m", "framepoint"]];
}

function callApi(request: object, options?: BindingOptions): any {
  const payload = JSON.stringify(request);
  let lastFailure = "no core command attempted";
  for (const command of candidateCommands(options)) {
    const proc = spawnSync(command[0], [...command.slice(1), "api"], {
      input: payload,
      encoding: "utf8",
      env: { ...process.env, ...options?.env },
      maxBuffer: 256 * 1024 * 1024,
    });
    if (proc.error) {
      // command not found: try the next candidate
      lastFailure = `${command.join(" ")}: ${proc.error.message}`;
      continue;
    }
    if (proc.status !== 0) {
      let parsed: ApiError | undefined;
      try {
        parsed = JSON.parse(proc.stderr.trim()) as ApiError;
      } catch {
        throw new Error(
          `framepoint api failed (exit ${proc.status}): ${proc.stderr}`,
        );
      }
      throw new Error(parsed.message);
    }
    return JSON.parse(proc.stdout);
  }
  throw new Error(`framepoint core not found (${lastFailure}); install the ` +
    "Python package or set FRAMEPOINT_CMD");
}

function asNumberArray(values: ArrayLike<number>): number[] {
  return Array.from(values);
}

/**
 * Negative log-likelihood of event times (frame units) under rates
 * exp(scores), conditioned on the event count, with the gradient with
 * respect to the scores.
 */
export function poissonNll(
  scores: ArrayLike<number>,
  eventTimesFrames: ArrayLike<number>,
  options?: BindingOptions,
): LossResult {
  return callApi(
    {
      op: "poisson_nll",
      scores: asNumberArray(scores),
      event_times_frames: asNumberArray(eventTimesFrames),
      frame_duration_s: options?.frameDurationS ?? 0.04,
    },
    options,
  ) as LossResult;
}

/**
 * Class-weighted per-frame cross-entropy against sigmoid(scores);
 * weight "auto" uses this sequence's negative/positive frequency ratio.
 */
export function binaryLoss(
  scores: ArrayLike<number>,
  marks: ArrayLike<number>,
  weight: ClassWeight = "auto",
  options?: BindingOptions,
): LossResult {
  return callApi(
    {
      op: "binary_loss",
      scores: asNumberArray(scores),
      marks: asNumberArray(marks),
      weight,
      frame_duration_s: options?.frameDurationS ?? 0.04,
    },
    options,
  ) as LossResult;
}

/**
 * Extract `count` timestamps (seconds) from per-frame scores: top-k
 * frame midpoints for the binary head, exact per-index posterior modes
 * for the Poisson head.
 */
export function extractTimestamps(
  scores: ArrayLike<number>,
  mode: ExtractMode,
  count: number,
  options?: BindingOptions,
): number[] {
  const response = callApi(
    {
      op: "extract",
      scores: asNumberArray(scores),
      mode,
      count,
      frame_duration_s: options?.frameDurationS ?? 0.04,
    },
    options,
  ) as { seconds: number[] };
  return response.seconds;
}
