// EMB1 binary format, little-endian throughout: magic "EMB1", format
// version u16, dim u32, count u64, then count records of
// [key_len u16, key UTF-8 bytes, dim * f32]. This mirrors the consumer's
// reader exactly; the consumer side stays the validation authority.

const MAGIC = "EMB1";
const FORMAT_VERSION = 1;
const HEADER_LEN = 4 + 2 + 4 + 8;

export function writeEmb1(dim: number, entries: Array<[string, Float32Array]>): Buffer {
  if (dim <= 0) throw new Error("dim must be positive");
  const chunks: Buffer[] = [];
  const head = Buffer.alloc(HEADER_LEN);
  head.write(MAGIC, 0, "ascii");
  head.writeUInt16LE(FORMAT_VERSION, 4);
  head.writeUInt32LE(dim, 6);
  head.writeBigUInt64LE(BigInt(entries.length), 10);
  chunks.push(head);
  const seen = new Set<string>();
  for (const [key, vec] of entries) {
    if (seen.has(key)) throw new Error(`duplicate key '${key}'`);
    seen.add(key);
    if (vec.length !== dim) {
      throw new Error(`vector for '${key}' has ${vec.length} components, want ${dim}`);
    }
    const keyBytes = Buffer.from(key, "utf-8");
    if (keyBytes.length > 0xffff) throw new Error(`key too long: '${key.slice(0, 40)}...'`);
    const record = Buffer.alloc(2 + keyBytes.length + 4 * dim);
    record.writeUInt16LE(keyBytes.length, 0);
    keyBytes.copy(record, 2);
    const view = new DataView(record.buffer, record.byteOffset + 2 + keyBytes.length);
    for (let i = 0; i < dim; i++) {
      if (!Number.isFinite(vec[i])) throw new Error(`non-finite component in vector for '${key}'`);
      view.setFloat32(4 * i, vec[i], true);
    }
    chunks.push(record);
  }
  return Buffer.concat(chunks);
}

export interface Emb1File {
  dim: number;
  entries: Map<string, Float32Array>;
}

export function readEmb1(data: Buffer): Emb1File {
  if (data.length < HEADER_LEN) throw new Error("truncated header");
  if (data.toString("ascii", 0, 4) !== MAGIC) throw new Error("bad magic");
  const version = data.readUInt16LE(4);
  if (version !== FORMAT_VERSION) throw new Error(`unsupported format version ${version}`);
  const dim = data.readUInt32LE(6);
  if (dim === 0) throw new Error("dim must be positive");
  const count = Number(data.readBigUInt64LE(10));
  const entries = new Map<string, Float32Array>();
  let offset = HEADER_LEN;
  for (let r = 0; r < count; r++) {
    if (offset + 2 > data.length) throw new Error("truncated record header");
    const keyLen = data.readUInt16LE(offset);
    offset += 2;
    if (offset + keyLen + 4 * dim > data.length) throw new Error("truncated record payload");
    const key = data.toString("utf-8", offset, offset + keyLen);
    offset += keyLen;
    const vec = new Float32Array(dim);
    const view = new DataView(data.buffer, data.byteOffset + offset, 4 * dim);
    for (let i = 0; i < dim; i++) {
      vec[i] = view.getFloat32(4 * i, true);
      if (!Number.isFinite(vec[i])) throw new Error(`non-finite component in vector for '${key}'`);
    }
    offset += 4 * dim;
    if (entries.has(key)) throw new Error(`duplicate key '${key}'`);
    entries.set(key, vec);
  }
  if (offset !== data.length) throw new Error(`${data.length - offset} trailing bytes`);
  return { dim, entries };
}
