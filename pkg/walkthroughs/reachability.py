"""Reachability with an induction assertion, stage by stage.

Run with ``python3 walkthroughs/reachability.py``.
"""

from efpl import evaluate, lfp, parse_formula, parse_program, parse_structure
from efpl.evaluator import stage_bound, trace_lines

WORLD = """
universe a b c d e
fun start/0 -> a
rel E/2 negatable: (a,b) (b,c) (c,a) (d,e)
"""

vocab, X = parse_structure(WORLD)

# T is the transitive closure of E; the least fixed point grows one path length per stage
program = parse_program("T(x, y) <- (E(x, y) | exists z. (E(x, z) & T(z, y)))", vocab)
res = lfp(program, {}, X)
for line in trace_lines(res.trace, X):
    print(line)
print(f"closed at stage {res.trace.closure_stage}, bound {stage_bound(program, X)}")

reach = parse_formula(
    "let T(x, y) <- (E(x, y) | exists z. (E(x, z) & T(z, y))) then T(start(), w)", vocab)
for target in "abcde":
    print(f"start reaches {target}:", evaluate(reach, {"w": X.element(target)}, X))

# negation is only allowed on negatable atoms, so "unreachable" is not expressible
# directly; a 2-cycle test is fine though
cyc = parse_formula("exists x. exists y. (E(x, y) & E(y, x))", vocab)
print("has a 2-cycle:", evaluate(cyc, {}, X))
