// Sentence encoders behind one interface. The default backend is a
// deterministic hashed character-n-gram encoder at the reference width
// (1024); a command backend pipes sentences to any locally installed
// encoder process, which is how a pretrained multilingual checkpoint is
// wired in. Language codes come from the corpus records, never from
// detection.

import { spawnSync } from "node:child_process";

export interface Encoder {
  readonly id: string;
  readonly version: string;
  readonly dim: number;
  encode(texts: string[], lang: string): Float32Array[];
}

const FNV_OFFSET = 0x811c9dc5;
const FNV_PRIME = 0x01000193;

function fnv1a(bytes: Uint8Array): number {
  let h = FNV_OFFSET;
  for (const b of bytes) {
    h ^= b;
    h = Math.imul(h, FNV_PRIME) >>> 0;
  }
  return h >>> 0;
}

function normalizeText(text: string): string {
  return text
    .normalize("NFKC")
    .toLowerCase()
    .replace(/[^\p{L}\p{N}]+/gu, " ")
    .trim();
}

export class HashNgramEncoder implements Encoder {
  readonly id = "hash-ngram";
  readonly version = "1";
  readonly dim: number;
  private readonly n: number;

  constructor(dim = 1024, n = 3) {
    if (dim <= 0) throw new Error("dim must be positive");
    this.dim = dim;
    this.n = n;
  }

  encodeOne(text: string): Float32Array {
    const normalized = normalizeText(text);
    if (!normalized) {
      throw new Error("text has no encodable content after normalization");
    }
    const padded = ` ${normalized} `;
    const vec = new Float32Array(this.dim);
    const enc = new TextEncoder();
    for (let i = 0; i + this.n <= padded.length; i++) {
      const h = fnv1a(enc.encode(padded.slice(i, i + this.n)));
      const index = h % this.dim;
      const sign = (h >>> 16) & 1 ? 1 : -1;
      vec[index] += sign;
    }
    return vec;
  }

  encode(texts: string[], _lang: string): Float32Array[] {
    return texts.map((t) => this.encodeOne(t));
  }
}

// External process contract: one JSON request per stdin line
// {"text": ..., "lang": ...}, one response line of whitespace-separated
// float components per request, constant width.
export class CommandEncoder implements Encoder {
  readonly id: string;
  readonly version = "external";
  readonly dim: number;
  private readonly command: string;

  constructor(command: string, dim = 1024) {
    this.command = command;
    this.id = `command:${command}`;
    this.dim = dim;
  }

  encode(texts: string[], lang: string): Float32Array[] {
    const input = texts.map((text) => JSON.stringify({ text, lang })).join("\n") + "\n";
    const proc = spawnSync(this.command, { input, encoding: "utf-8", shell: true, maxBuffer: 1 << 28 });
    if (proc.status !== 0) {
      throw new Error(`encoder command failed (${proc.status}): ${proc.stderr}`);
    }
    const lines = proc.stdout.split(/\r?\n/).filter((l) => l.trim());
    if (lines.length !== texts.length) {
      throw new Error(`encoder command returned ${lines.length} vectors for ${texts.length} texts`);
    }
    return lines.map((line) => {
      const values = line.trim().split(/\s+/).map(Number);
      if (values.length !== this.dim || values.some((v) => !Number.isFinite(v))) {
        throw new Error(`encoder command produced a malformed vector (want ${this.dim} finite floats)`);
      }
      return Float32Array.from(values);
    });
  }
}

export function resolveEncoder(spec: string, dim = 1024): Encoder {
  if (spec === "hash") return new HashNgramEncoder(dim);
  if (spec.startsWith("command:")) return new CommandEncoder(spec.slice("command:".length), dim);
  throw new Error(`unknown encoder '${spec}' (use 'hash' or 'command:<exe>')`);
}
