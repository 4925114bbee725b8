"""Independent expected values for the mini fixture.

Writes expected_alias.tsv (alias, entity, count) from corpus.txt and
expected_stats.tsv from masked.jsonl.
"""
import json
import re
from collections import Counter

DROPPED = ("File:", "Image:", "Media:", "Category:", "Template:")


def norm(t):
    return " ".join(t.replace("_", " ").split())


counts = Counter()
for line in open("corpus.txt", encoding="utf-8"):
    if "\t" not in line:
        continue
    body = line.split("\t", 1)[1]
    for inner in re.findall(r"\[\[([^\[\]]*?)\]\]", body):
        target, _, anchor = inner.partition("|")
        if not anchor:
            anchor = target
        if target.lstrip().startswith(DROPPED):
            continue
        target, anchor = norm(target), " ".join(anchor.split())
        if target and anchor:
            counts[(anchor, target)] += 1

with open("expected_alias.tsv", "w", encoding="utf-8") as f:
    for (alias, ent), n in sorted(counts.items()):
        f.write(f"{alias}\t{ent}\t{n}\n")

rows = [json.loads(l) for l in open("masked.jsonl", encoding="utf-8") if l.strip()]
n = len(rows)
pos = sum(r["answer"] not in ("NIL", "UNANNOTATED") for r in rows)
nil = [r for r in rows if r["answer"] == "NIL"]
unann = sum(r["answer"] == "UNANNOTATED" for r in rows)
mentions = {" ".join(r["mention"].split()) for r in rows}
entities = {c for r in rows for c in r["candidates"]}
avg = sum(len(r["candidates"]) for r in rows) / n
stats = [
    ("entries", n),
    ("positive", pos),
    ("nil", len(nil)),
    ("unannotated", unann),
    ("nil_percentage", f"{100 * len(nil) / n:.2f}"),
    ("missing_entity", sum(r["nil_pattern"] == "MissingEntity" for r in nil)),
    ("non_entity_phrase", sum(r["nil_pattern"] == "NonEntityPhrase" for r in nil)),
    ("mentions", len(mentions)),
    ("entities", len(entities)),
    ("avg_candidates", f"{avg:.2f}"),
]
with open("expected_stats.tsv", "w", encoding="utf-8") as f:
    for k, v in stats:
        f.write(f"{k}\t{v}\n")

# masking arithmetic
orig = [json.loads(l) for l in open("dataset.jsonl", encoding="utf-8") if l.strip()]
positives = sum(r["answer"] not in ("NIL", "UNANNOTATED") for r in orig)
masked = [r for r in rows if r["masked"]]
assert len(masked) == int(0.1 * positives + 0.5), (len(masked), positives)
gold = {r["id"]: r["answer"] for r in orig}
for r in masked:
    assert gold[r["id"]] not in r["candidates"]
    assert r["seed"] == gold[r["id"]]
print(f"{len(counts)} alias pairs; {n} entries; masked {len(masked)} of {positives}")
