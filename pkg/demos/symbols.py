"""Hilbert symbols over Q2 and one of its quadratic extensions.

Prints the 8 x 8 sign table of Q2 and checks that pairs of base-field
elements pair trivially once pushed up to E = Q2(sqrt 5).
"""

import random

from metasplit.hilbert import base_class_ints, hilbert, hilbert_report
from metasplit.padic import FieldDesc

F = FieldDesc(2)
reps = base_class_ints(F)
print("      " + " ".join(f"{r:>4}" for r in reps))
for a in reps:
    row = (hilbert(F.element(a), F.element(b), F) for b in reps)
    print(f"{a:>5} " + " ".join(f"{s:>+4d}" for s in row))

E = F.ext(5)
rng = random.Random(1)
signs = set()
for _ in range(50):
    a, b = rng.choice(reps), rng.choice(reps)
    signs.add(hilbert(E.element(a), E.element(b), E))
print(f"\nbase pairs read in {E}: signs seen = {sorted(signs)}")
print("(3, 5) in Q2:", hilbert_report(F.element(3), F.element(5), F))
