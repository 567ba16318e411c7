/**
 * Typed errors mirroring the core error taxonomy one to one.
 *
 * The CLI reports failures as a single JSON object on stderr with a stable
 * machine-readable `error` kind plus a human message.  Each kind maps to one
 * class here so callers can catch by type instead of string matching.
 */

export interface ErrorPayload {
  error: string;
  message: string;
  [extra: string]: unknown;
}

export class BenchError extends Error {
  readonly kind: string = "error";
  /** Raw payload the CLI emitted, when the failure came from the CLI. */
  readonly payload?: ErrorPayload;

  constructor(message: string, payload?: ErrorPayload) {
    super(message);
    this.name = new.target.name;
    this.payload = payload;
  }
}

export class ParseError extends BenchError {
  override readonly kind = "parse-error";
  readonly path?: string;
  readonly line?: number;

  constructor(message: string, payload?: ErrorPayload) {
    super(message, payload);
    if (typeof payload?.path === "string") this.path = payload.path;
    if (typeof payload?.line === "number") this.line = payload.line;
  }
}

export class ValidationError extends BenchError {
  override readonly kind = "validation-error";
  /** Every problem found; the message holds them joined. */
  readonly errors: string[];

  constructor(message: string, payload?: ErrorPayload) {
    super(message, payload);
    const extra = payload?.errors;
    this.errors = Array.isArray(extra) ? extra.map(String) : [message];
  }
}

export class NotEnoughEdgesError extends BenchError {
  override readonly kind = "not-enough-edges-to-train";
}

export class InsufficientOverlapError extends BenchError {
  override readonly kind = "insufficient-overlap";
}

export class MissingNodeError extends BenchError {
  override readonly kind = "missing-node";
  readonly nodeKind?: string;
  readonly nodeId?: string;

  constructor(message: string, payload?: ErrorPayload) {
    super(message, payload);
    if (typeof payload?.node_kind === "string") this.nodeKind = payload.node_kind;
    if (typeof payload?.node_id === "string") this.nodeId = payload.node_id;
  }
}

export class SingleClassError extends BenchError {
  override readonly kind = "single-class";
}

export class SamplingError extends BenchError {
  override readonly kind = "sampling-error";
}

export class OverlapViolationError extends BenchError {
  override readonly kind = "sc-overlap";
}

export class ChecksumError extends BenchError {
  override readonly kind = "checksum-mismatch";
}

/** Thrown locally when an operation touches a handle after release(). */
export class ReleasedHandleError extends BenchError {
  override readonly kind = "released-handle";
}

type ErrorCtor = new (message: string, payload?: ErrorPayload) => BenchError;

const KIND_MAP: Record<string, ErrorCtor> = {
  "parse-error": ParseError,
  "validation-error": ValidationError,
  "not-enough-edges-to-train": NotEnoughEdgesError,
  "insufficient-overlap": InsufficientOverlapError,
  "missing-node": MissingNodeError,
  "single-class": SingleClassError,
  "sampling-error": SamplingError,
  "sc-overlap": OverlapViolationError,
  "checksum-mismatch": ChecksumError,
  "released-handle": ReleasedHandleError,
};

export function errorFromPayload(payload: ErrorPayload): BenchError {
  const ctor = KIND_MAP[payload.error] ?? BenchError;
  return new ctor(payload.message, payload);
}

/**
 * Build the typed error for a failed CLI run.  The payload is the last
 * stderr line that parses as JSON with an `error` key; anything else on
 * stderr (progress notes and the like) is ignored.
 */
export function errorFromStderr(stderr: string): BenchError {
  const lines = stderr.split("\n").filter((l) => l.trim() !== "");
  for (let i = lines.length - 1; i >= 0; i--) {
    const line = lines[i]!;
    if (!line.startsWith("{")) continue;
    let parsed: unknown;
    try {
      parsed = JSON.parse(line);
    } catch {
      continue;
    }
    if (
      typeof parsed === "object" && parsed !== null &&
      typeof (parsed as ErrorPayload).error === "string" &&
      typeof (parsed as ErrorPayload).message === "string"
    ) {
      return errorFromPayload(parsed as ErrorPayload);
    }
  }
  return new BenchError(`CLI failed without a structured error: ${stderr.trim()}`);
}
