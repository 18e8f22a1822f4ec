"""Existential fixed point sentences survive homomorphisms.

Run with ``python3 walkthroughs/homomorphisms.py``.
"""

import random

from efpl import evaluate
from efpl.generate import random_homomorphism, random_sentence, random_structure
from efpl.parser import print_formula
from efpl.structure import Homomorphism, check_homomorphism
from efpl.syntax import Vocabulary

vocab = Vocabulary({"f": 1, "c": 0}, [("E", 2, True), ("M", 1, False)])
rng = random.Random(7)

src = random_structure(rng, vocab, 3)
tgt, mapping = random_homomorphism(rng, src, 4, injective=True)
print("map:", {src.names[a]: tgt.names[b] for a, b in mapping.items()})
print("homomorphism:", check_homomorphism(Homomorphism(src, tgt, mapping)).ok)

shown = 0
while shown < 5:
    phi = random_sentence(rng, vocab, depth=2)
    a, b = evaluate(phi, {}, src), evaluate(phi, {}, tgt)
    if a:
        # true in the source forces true in the target
        print(f"{print_formula(phi)[:60]:60} source={a} target={b}")
        shown += 1
