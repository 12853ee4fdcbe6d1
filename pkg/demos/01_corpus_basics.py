"""Corpus ingestion walkthrough: pipe files, canonical JSONL, senses, splits.

Run: python demos/01_corpus_basics.py
"""

from drelkit.corpus import (
    PDTB_STANDARD,
    PipeColumnMap,
    SenseTop,
    assign_split,
    parse_jsonl,
    parse_pipe_file,
    select_implicit,
    sense_histogram,
    top_sense,
    write_jsonl,
)

# A pipe file is one relation per line; the column map tells the parser
# where each field lives, since annotation releases lay them out differently.
pipe_text = """\
Implicit|Contingency.Cause.Reason||the drought reduced stockpiles|they have enough storage space
Explicit|Comparison.Contrast||some funds have taken defensive steps|others have not
EntRel|||cash positions rose|the fund held steady
Implicit|Expansion.Conjunction|Temporal.Asynchronous|prices fell sharply|volume stayed thin
"""

cmap = PipeColumnMap(field_count_min=5, rel_type_idx=0, sense_idxs=(1, 2), arg1_idx=3, arg2_idx=4)
relations = parse_pipe_file(pipe_text, cmap, doc_id="wsj_2102", corpus="demo", lang="en")
print(f"parsed {len(relations)} relations from the pipe file")
for rel in relations:
    print(f"  {rel.id}: {rel.rel_type:8s} senses={list(rel.senses)}")

# Only implicit relations take part in training and evaluation; EntRel and
# the explicit types are parsed but excluded.
implicit = select_implicit(relations)
print(f"\nimplicit only: {[r.id for r in implicit]}")

# The first label decides the top-level sense, even for multi-label annotations.
multi = implicit[1]
print(f"{multi.id} senses={list(multi.senses)} -> top sense {top_sense(multi)}")

print("\nhistogram over the implicit relations:")
for sense, count in sense_histogram(relations).items():
    print(f"  {sense.value:12s} {count}")

# Documents bucket into train/dev/test by their WSJ section digits.
for doc in ("wsj_0003", "wsj_1200", "wsj_2102", "wsj_9901"):
    rel = implicit[0]
    rel = type(rel)(**{**rel.__dict__, "doc_id": doc, "extra": {}})
    print(f"{doc} -> {assign_split(rel, PDTB_STANDARD)}")

# Everything normalizes into canonical JSONL, the interchange format shared
# by every command and by the embedding exporter.
blob = write_jsonl(implicit)
print(f"\ncanonical JSONL ({len(blob)} bytes), round-trips losslessly:",
      write_jsonl(parse_jsonl(blob)) == blob)
print(blob.decode("utf-8").splitlines()[0])
