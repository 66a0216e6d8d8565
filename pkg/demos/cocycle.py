"""The cocycle on GL2(E) and a sampled splitting over a torus.

Shows one cocycle value with its symbol arguments, then certifies a
splitting over the image of L^x for the quaternion division algebra at p = 3.
"""

import random

from metasplit.metaplectic import Mat2E, cocycle_report, verify_cocycle_identity, random_gl2
from metasplit.padic import FieldDesc
from metasplit.quaternion import QuatAlg, splitting_over_Lx

E = FieldDesc(3).ext(2)
g1 = Mat2E.of(E, 1, 2, 3, 4)
g2 = Mat2E.of(E, 0, 1, -1, 5)
print(cocycle_report(g1, g2))

rng = random.Random(7)
ok = all(verify_cocycle_identity(*(random_gl2(E, rng) for _ in range(3))) for _ in range(50))
print("cocycle identity on 50 random triples:", ok)

D = QuatAlg.standard(3)
cert = splitting_over_Lx(D, 3, 40, random.Random(0))
print(f"torus splitting for d = 3: {len(cert.pairs)} pairs certified, all passed = {cert.all_passed}")
print("conjugator:", cert.conjugator)
