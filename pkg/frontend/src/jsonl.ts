// Canonical JSONL corpus reading: one object per line, UTF-8, with the
// eight keys shared with the training toolkit.

export interface DiscourseRelation {
  id: string;
  corpus: string;
  lang: string;
  doc_id: string;
  rel_type: string;
  senses: string[];
  arg1: string;
  arg2: string;
}

const REQUIRED_KEYS = [
  "id",
  "corpus",
  "lang",
  "doc_id",
  "rel_type",
  "senses",
  "arg1",
  "arg2",
] as const;

export function parseJsonl(text: string, pathForErrors = "<input>"): DiscourseRelation[] {
  const out: DiscourseRelation[] = [];
  const seen = new Set<string>();
  const lines = text.split(/\r?\n/);
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].trim();
    if (!line) continue;
    let obj: unknown;
    try {
      obj = JSON.parse(line);
    } catch (err) {
      const msg = err instanceof Error ? err.message : String(err);
      throw new Error(`${pathForErrors}:${i + 1}: invalid JSON (${msg})`);
    }
    if (typeof obj !== "object" || obj === null || Array.isArray(obj)) {
      throw new Error(`${pathForErrors}:${i + 1}: expected a JSON object`);
    }
    const record = obj as Record<string, unknown>;
    for (const key of REQUIRED_KEYS) {
      if (!(key in record)) {
        throw new Error(`${pathForErrors}:${i + 1}: missing key '${key}'`);
      }
    }
    if (!Array.isArray(record.senses)) {
      throw new Error(`${pathForErrors}:${i + 1}: 'senses' must be an array`);
    }
    const rel: DiscourseRelation = {
      id: String(record.id),
      corpus: String(record.corpus),
      lang: String(record.lang),
      doc_id: String(record.doc_id),
      rel_type: String(record.rel_type),
      senses: record.senses.map(String),
      arg1: String(record.arg1),
      arg2: String(record.arg2),
    };
    if (seen.has(rel.id)) {
      throw new Error(`${pathForErrors}:${i + 1}: duplicate id '${rel.id}'`);
    }
    seen.add(rel.id);
    out.push(rel);
  }
  return out;
}

export function selectImplicit(rels: DiscourseRelation[]): DiscourseRelation[] {
  return rels.filter((r) => r.rel_type === "Implicit");
}
