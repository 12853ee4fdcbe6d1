// Deterministic corpus fixtures. The English fixture mirrors the reference
// per-sense distribution (20/52/107/15 implicit relations, 194 total); the
// parallel fixture provides translation-equivalent sentence pairs whose
// rewording keeps the content words, plus fully distinct content across
// pair indices.

import { DiscourseRelation } from "../src/jsonl.js";

const SENSE_COUNTS: Array<[string, number]> = [
  ["Comparison", 20],
  ["Contingency", 52],
  ["Expansion", 107],
  ["Temporal", 15],
];

const SUBJECTS = [
  "committee", "engineer", "orchestra", "glacier", "novelist", "satellite",
  "parliament", "beekeeper", "archivist", "volcano", "economist", "lighthouse",
  "surgeon", "monsoon", "cartographer", "referee", "vineyard", "astronomer",
  "locksmith", "ferry", "chancellor", "meteor", "brewery", "diplomat",
  "reservoir", "violinist", "tribunal", "falcon", "geologist", "printer",
];
const VERBS = [
  "approved", "measured", "rehearsed", "carved", "drafted", "tracked",
  "debated", "harvested", "catalogued", "buried", "forecast", "guided",
  "repaired", "flooded", "mapped", "penalized", "pruned", "observed",
  "replaced", "crossed", "announced", "lit", "bottled", "negotiated",
  "supplied", "tuned", "dismissed", "hunted", "sampled", "stamped",
];
const OBJECTS = [
  "budget", "bridge", "symphony", "valley", "manuscript", "orbit",
  "amendment", "hive", "ledger", "village", "deficit", "harbor",
  "fracture", "delta", "coastline", "match", "trellis", "nebula",
  "vault", "channel", "treaty", "horizon", "cellar", "ceasefire",
  "aqueduct", "concerto", "verdict", "nest", "stratum", "pamphlet",
];
const PLACES = [
  "museum", "estuary", "plaza", "ridge", "library", "observatory",
  "senate", "meadow", "basement", "island", "exchange", "pier",
  "clinic", "floodplain", "archipelago", "stadium", "hillside", "desert",
  "workshop", "strait", "embassy", "crater", "distillery", "consulate",
  "dam", "conservatory", "courtroom", "cliff", "quarry", "pressroom",
];

function sentencePair(k: number): [string, string] {
  const s = SUBJECTS[k % SUBJECTS.length];
  const v = VERBS[(k * 7 + 3) % VERBS.length];
  const o = OBJECTS[(k * 11 + 5) % OBJECTS.length];
  const p = PLACES[(k * 13 + 1) % PLACES.length];
  return [
    `The ${s} ${v} the ${o} before the meeting at the ${p}.`,
    `Afterwards the ${s} explained why the ${o} mattered to the ${p}.`,
  ];
}

export function tedmdbEnglishFixture(): DiscourseRelation[] {
  const rels: DiscourseRelation[] = [];
  let k = 0;
  for (const [sense, count] of SENSE_COUNTS) {
    for (let i = 0; i < count; i++) {
      const [arg1, arg2] = sentencePair(k);
      rels.push({
        id: `en${k}`,
        corpus: "ted-mdb",
        lang: "en",
        doc_id: "talk_01",
        rel_type: "Implicit",
        senses: [sense],
        arg1,
        arg2,
      });
      k++;
    }
  }
  return rels;
}

export function relationsToJsonl(rels: DiscourseRelation[]): string {
  return rels.map((r) => JSON.stringify(r)).join("\n") + (rels.length ? "\n" : "");
}

// Thirty aligned pairs: variant B rewords variant A but keeps its content
// words, the way a close translation of the same talk segment would.
export function parallelFixture(): { a: DiscourseRelation[]; b: DiscourseRelation[] } {
  const a: DiscourseRelation[] = [];
  const b: DiscourseRelation[] = [];
  for (let i = 0; i < 30; i++) {
    const s = SUBJECTS[i];
    const v = VERBS[i];
    const o = OBJECTS[i];
    const p = PLACES[i];
    const argA1 = `The ${s} ${v} the ${o} near the ${p} last spring.`;
    const argA2 = `Everyone heard how the ${s} described the ${o} at the ${p}.`;
    const argB1 = `Last spring, near the ${p}, that ${s} had ${v} an ${o}.`;
    const argB2 = `At the ${p}, all of them heard the ${s} describing this ${o}.`;
    a.push({
      id: `pair${i}`,
      corpus: "parallel-a",
      lang: "en",
      doc_id: "talk_02",
      rel_type: "Implicit",
      senses: ["Expansion"],
      arg1: argA1,
      arg2: argA2,
    });
    b.push({
      id: `pair${i}`,
      corpus: "parallel-b",
      lang: "xx",
      doc_id: "talk_02",
      rel_type: "Implicit",
      senses: ["Expansion"],
      arg1: argB1,
      arg2: argB2,
    });
  }
  return { a, b };
}
