"""Second cohomology of F_q2^x semidirect Z from its two-term assembly.

Compares Z/2 and Q/Z coefficients across a few residue field sizes and
cross-checks a finite quotient against a brute-force cocycle count.
"""

from metasplit import cohomology as coh

for q in (3, 5, 7, 9):
    z2 = coh.assemble_h2_gprime(q, "z2")
    qz = coh.assemble_h2_gprime(q, "qz")
    h1, ker, im = coh.hilbert90(q)
    print(f"q = {q}: H2 with Z/2 = {z2.describe():<12} with Q/Z = {qz.describe():<6} |ker N| = {ker}, |im(s-1)| = {im}")

print("brute force, semidirect:3 ->", coh.brute_force_h2(coh.group_table("semidirect:3")).describe())
