// Export pipeline: canonical JSONL corpus -> EMB1 file + JSON manifest.
// Every implicit relation contributes "<id>:arg1" and "<id>:arg2"; any
// encoding failure aborts naming the offending relation.

import { createHash } from "node:crypto";
import { readFileSync, writeFileSync } from "node:fs";

import { writeEmb1 } from "./emb1.js";
import { Encoder, HashNgramEncoder } from "./encoder.js";
import { parseJsonl, selectImplicit } from "./jsonl.js";

export interface ExportOptions {
  encoder?: Encoder;
  normalize?: boolean;
  manifestPath?: string;
}

export interface ExportManifest {
  corpus: string;
  encoder: string;
  encoder_version: string;
  dim: number;
  count: number;
  normalized: boolean;
  sha256: string;
}

function l2Normalize(vec: Float32Array): Float32Array {
  let sum = 0;
  for (const v of vec) sum += v * v;
  const norm = Math.sqrt(sum);
  if (norm === 0) return vec;
  return vec.map((v) => v / norm) as Float32Array;
}

export function exportEmbeddings(
  corpusPath: string,
  outPath: string,
  options: ExportOptions = {},
): ExportManifest {
  const encoder = options.encoder ?? new HashNgramEncoder(1024);
  const normalize = options.normalize ?? false;
  const relations = selectImplicit(parseJsonl(readFileSync(corpusPath, "utf-8"), corpusPath));

  // Batch per language so command backends see homogeneous requests.
  const byLang = new Map<string, { keys: string[]; texts: string[]; ids: string[] }>();
  for (const rel of relations) {
    let bucket = byLang.get(rel.lang);
    if (!bucket) {
      bucket = { keys: [], texts: [], ids: [] };
      byLang.set(rel.lang, bucket);
    }
    bucket.keys.push(`${rel.id}:arg1`, `${rel.id}:arg2`);
    bucket.texts.push(rel.arg1, rel.arg2);
    bucket.ids.push(rel.id, rel.id);
  }

  const vectors = new Map<string, Float32Array>();
  for (const [lang, bucket] of byLang) {
    let encoded: Float32Array[];
    try {
      encoded = encoder.encode(bucket.texts, lang);
    } catch (err) {
      // Re-encode one by one to attribute the failure to a relation.
      encoded = [];
      for (let i = 0; i < bucket.texts.length; i++) {
        try {
          encoded.push(...encoder.encode([bucket.texts[i]], lang));
        } catch (inner) {
          const msg = inner instanceof Error ? inner.message : String(inner);
          throw new Error(`failed to encode relation '${bucket.ids[i]}': ${msg}`);
        }
      }
      void err;
    }
    for (let i = 0; i < bucket.keys.length; i++) {
      let vec = encoded[i];
      if (vec.length !== encoder.dim) {
        throw new Error(
          `failed to encode relation '${bucket.ids[i]}': got ${vec.length} components, want ${encoder.dim}`,
        );
      }
      if (normalize) vec = l2Normalize(vec);
      vectors.set(bucket.keys[i], vec);
    }
  }

  // Entries in corpus order regardless of language batching.
  const entries: Array<[string, Float32Array]> = [];
  for (const rel of relations) {
    for (const slot of ["arg1", "arg2"] as const) {
      const key = `${rel.id}:${slot}`;
      const vec = vectors.get(key);
      if (!vec) throw new Error(`internal: no vector for '${key}'`);
      entries.push([key, vec]);
    }
  }
  const blob = writeEmb1(encoder.dim, entries);
  writeFileSync(outPath, blob);

  const manifest: ExportManifest = {
    corpus: corpusPath,
    encoder: encoder.id,
    encoder_version: encoder.version,
    dim: encoder.dim,
    count: entries.length,
    normalized: normalize,
    sha256: createHash("sha256").update(blob).digest("hex"),
  };
  writeFileSync(
    options.manifestPath ?? `${outPath}.manifest.json`,
    JSON.stringify(manifest, null, 2) + "\n",
  );
  return manifest;
}
