"""Checking the generated truth predicate against the native evaluator.

Run with ``python3 walkthroughs/truth_definition.py``.  Takes a few seconds.
"""

from efpl.metacheck import footprint, load_corpus, meta_check, sat_program
from efpl.parser import parse_formula, print_formula

base, corpus = load_corpus()
program = sat_program(base.vocab)
print(f"Sat program over {base.vocab.symbols()}: {len(program)} rules")
for rule in program[:3]:
    print("  ", rule.head, "<-", print_formula(rule.body)[:70], "...")

# a handful of corpus sentences; the footprint fixes the smallest safe bound
for label, phi in corpus[:6]:
    fp = footprint(phi, base)
    r = meta_check(phi, base)
    print(f"{label:24} footprint {fp.depth:3} d={r.depth:3} native={r.native_verdict!s:5} "
          f"sat={r.sat_verdict!s:5} agree={r.agreement}")

# Sat unfolds a call to an extra predicate under the caller's assignment, so a
# rule body variable re-bound between the Let and the call is captured.
# Renaming bound variables apart before quoting avoids it.
capture = parse_formula(
    "exists x. (Mark(x) & let P() <- Mark(x) then exists x. ((x = c0()) & P()))", base.vocab)
raw = meta_check(capture, base, standardize=False)
fixed = meta_check(capture, base)
print("quoted as written:  native", raw.native_verdict, "sat", raw.sat_verdict)
print("renamed apart:      native", fixed.native_verdict, "sat", fixed.sat_verdict)
