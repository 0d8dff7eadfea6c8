"""Eigenlevels of coexact forms on S^1 and S^5, with certificates.

Level i carries the eigenvalue (2k+i)^2.  The operator *d is never applied
on the sphere: its matrix is solved from the exact linear system
G [Jt] = A, where G is the sphere Gram of the polynomial representatives
and A their boundary pairing; squaring the solution certifies the
eigenvalue.
"""

from chiral_blocks.spectra import build_level, eigenlevel_to_json

print("== the circle (k = 0) ==")
for i in range(1, 5):
    lv = build_level(0, i)
    print(f"level {i}: lambda = {lv.lam}, dim = {lv.dim}, "
          f"chiral half = {lv.chiral_basis}")

lv1 = build_level(0, 1)
print("\n[Jt] at level 1 (matrix of *d):")
for row in lv1.jtilde:
    print("   ", [str(v) for v in row])
print("squares to -lambda * I with lambda =", lv1.lam)

print("\n== S^5 (k = 1) ==")
for i in (1, 2):
    lv = build_level(1, i)
    print(f"level {i}: lambda = {lv.lam}, dim = {lv.dim}, "
          f"split {len(lv.chiral_basis)} + {len(lv.antichiral_basis)}")

print("\nA sample chiral representative on R^6 (level 1):")
print("  ", build_level(1, 1).chiral_basis[0])

print("\nJSON record of the circle level 1:")
import json
print(json.dumps(eigenlevel_to_json(lv1, include_bases=False), indent=2))
