#!/usr/bin/env node
// emb-export <corpus.jsonl> --out <file.emb> [--encoder hash|command:<exe>]
//            [--dim N] [--normalize] [--manifest <path>]

import { resolveEncoder } from "./encoder.js";
import { exportEmbeddings } from "./export.js";

function usage(): never {
  console.error(
    "usage: emb-export <corpus.jsonl> --out <file.emb> " +
      "[--encoder hash|command:<exe>] [--dim N] [--normalize] [--manifest <path>]",
  );
  process.exit(64);
}

function main(argv: string[]): number {
  let corpusPath: string | undefined;
  let outPath: string | undefined;
  let encoderSpec = "hash";
  let dim = 1024;
  let normalize = false;
  let manifestPath: string | undefined;

  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (arg === "--out") outPath = argv[++i];
    else if (arg === "--encoder") encoderSpec = argv[++i];
    else if (arg === "--dim") dim = Number(argv[++i]);
    else if (arg === "--normalize") normalize = true;
    else if (arg === "--manifest") manifestPath = argv[++i];
    else if (arg === "--help" || arg === "-h") usage();
    else if (arg.startsWith("-")) usage();
    else if (corpusPath === undefined) corpusPath = arg;
    else usage();
  }
  if (!corpusPath || !outPath || !Number.isInteger(dim) || dim <= 0) usage();

  const manifest = exportEmbeddings(corpusPath, outPath, {
    encoder: resolveEncoder(encoderSpec, dim),
    normalize,
    manifestPath,
  });
  console.log(`wrote ${outPath}`);
  console.log(
    `encoder=${manifest.encoder} dim=${manifest.dim} count=${manifest.count} ` +
      `normalized=${manifest.normalized} sha256=${manifest.sha256.slice(0, 12)}...`,
  );
  return 0;
}

try {
  process.exit(main(process.argv.slice(2)));
} catch (err) {
  console.error(`emb-export: error: ${err instanceof Error ? err.message : err}`);
  process.exit(1);
}
