"""The Heisenberg coherent-state model over a finite chiral basis.

Scalars like e^{2(xi,eta)_V} are held as exact formal exponentials, so the
projective multiplier relation and the invariance of the vacuum pairing
are decided by exact comparison, never numerically.
"""

import random

from chiral_blocks.fock import (
    CoherentVector,
    HeisenbergElement,
    chi,
    gram_coherent,
    invariant_functional_dim,
    projective_defect,
    rho_act,
    unit_generators,
)
from chiral_blocks.scalars import GaussScalar
from chiral_blocks.spectra import assemble_W

wfin = assemble_W(0, 2)      # chiral levels 1..2 of the circle; Gram diag(2, 4)
print("W basis dim:", wfin.dim)
print("Gram diagonal:", [str(wfin.gram[t][t]) for t in range(wfin.dim)])

print("\n== coherent Gram values ==")
e1 = (1, 0)
print("<eps_0, eps_0>   =", gram_coherent(wfin, (0, 0), (0, 0)))
print("<eps_w1, eps_w1> =", gram_coherent(wfin, e1, e1))

print("\n== the displayed action ==")
vac = CoherentVector.vacuum(wfin)
create = HeisenbergElement(wfin, (1, 0), (0, 0))
annihilate = HeisenbergElement(wfin, (0, 0), (1, 0))
print("rho(w, 0) eps_0      =", rho_act(create, vac))
print("rho(0, wbar) eps_0   =", rho_act(annihilate, vac))
print("rho(0, wbar) eps_w1  =", rho_act(annihilate, CoherentVector.coherent(wfin, e1)))

print("\n== projective multiplier: the defect is exactly 1 ==")
rng = random.Random(42)


def coords():
    return tuple(GaussScalar(rng.randint(-3, 3), rng.randint(-3, 3))
                 for _ in range(wfin.dim))


for trial in range(3):
    v = HeisenbergElement(wfin, coords(), coords())
    v2 = HeisenbergElement(wfin, coords(), coords())
    probe = CoherentVector.coherent(wfin, coords())
    print(f"trial {trial}: defect = {projective_defect(v, v2, probe)}")

print("\n== the vacuum pairing chi and its invariance ==")
u = CoherentVector.coherent(wfin, coords()).scale(GaussScalar(3)) \
    + CoherentVector.coherent(wfin, coords()).scale(GaussScalar(-2))
print("chi(3 eps_a - 2 eps_b)   =", chi(u))
w = HeisenbergElement(wfin, coords(), (0, 0))
print("chi(rho(w) u)            =", chi(rho_act(w, u)), " (unchanged)")

print("\n== invariant functionals at truncation ==")
for D in (2, 3, 4):
    dim = invariant_functional_dim(wfin, D, unit_generators(wfin))
    print(f"D = {D}: dim = {dim}")
