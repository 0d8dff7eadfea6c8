"""Seeded exact verification suites, shared by the CLI and the test suite.

Every trial is an exact pass/fail comparison; a suite result carries the
trial count and the number of failures (expected: zero).  Trials are
independent, so they may be fanned out across workers; aggregation is by
trial index and therefore order-independent.
"""

from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor

from .errors import CheckFailed
from .exterior import PolyForm, random_form, wedge
from .fock import (
    CoherentVector,
    HeisenbergElement,
    cocycle_pairing,
    projective_defect,
)
from .scalars import GaussScalar
from .spectra import (
    assemble_W,
    build_level,
    chirality_energy_check,
    stokes_identity_check,
)
from .blocks import chiral_image_basis


def _run_trials(fns, threads: int = 1):
    """Run one boolean callable per trial; deterministic regardless of
    worker count (results are collected by index)."""
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda f: f(), fns))
    else:
        results = [f() for f in fns]
    return results


def suite_stokes(k: int, trials: int, seed: int, threads: int = 1) -> dict:
    """Boundary-pairing identity on seeded random pairs, plus the worked
    coordinate instance for the circle."""
    n = 4 * k + 2
    rng = random.Random(seed)
    cases = []
    if k == 0:
        cases.append((PolyForm.coordinate(2, 0), PolyForm.coordinate(2, 1)))
    while len(cases) < trials:
        deg = rng.randint(1, 4 if k == 0 else 3)
        nt = rng.randint(1, 4)
        cases.append((random_form(rng, n, 2 * k, deg, nterms=nt),
                      random_form(rng, n, 2 * k, rng.randint(1, 4 if k == 0 else 3),
                                  nterms=nt)))
    fns = [(lambda B=B, B2=B2: stokes_identity_check(k, B, B2))
           for B, B2 in cases]
    results = _run_trials(fns, threads)
    return {"suite": "stokes", "k": k, "trials": len(results),
            "failures": results.count(False)}


def suite_energy(k: int, max_level: int, seed: int, threads: int = 1) -> dict:
    """Self-dual energy inequality on every computed chiral and antichiral
    representative, plus seeded radial perturbations (same restrictions,
    both halves nonzero)."""
    n = 4 * k + 2
    levels = [build_level(k, i) for i in range(1, max_level + 1)]
    rng = random.Random(seed)
    r2m1 = PolyForm.zero(n, 0)
    for j in range(n):
        xj = PolyForm.coordinate(n, j)
        r2m1 = r2m1 + wedge(xj, xj)
    r2m1 = r2m1 - PolyForm.one(n)

    def one(B, sign, reference=None):
        def check():
            try:
                chirality_energy_check(k, B, levels, sign, reference=reference)
                return True
            except CheckFailed:
                return False
        return check

    fns = []
    for lv in levels:
        for B in lv.chiral_basis:
            fns.append(one(B, +1))
            if k == 0:
                pert = B + wedge(r2m1, random_form(rng, n, 2 * k,
                                                   rng.randint(0, 1), nterms=2))
                fns.append(one(pert, +1, reference=B))
        for B in lv.antichiral_basis:
            fns.append(one(B, -1))
    results = _run_trials(fns, threads)
    return {"suite": "energy", "k": k, "trials": len(results),
            "failures": results.count(False)}


def suite_projective(k: int, trials: int, seed: int, threads: int = 1,
                     float_crosscheck: bool = False) -> dict:
    """Projective multiplier identity on seeded Heisenberg triples."""
    wfin = assemble_W(k, 2)
    rng = random.Random(seed)
    m = wfin.dim

    def coords():
        return tuple(GaussScalar(rng.randint(-3, 3), rng.randint(-3, 3))
                     for _ in range(m))

    cases = [(HeisenbergElement(wfin, coords(), coords()),
              HeisenbergElement(wfin, coords(), coords()),
              CoherentVector.coherent(wfin, coords()))
             for _ in range(trials)]
    fns = [(lambda v=v, v2=v2, probe=probe:
            projective_defect(v, v2, probe).is_one())
           for v, v2, probe in cases]
    results = _run_trials(fns, threads)
    out = {"suite": "projective", "k": k, "trials": len(results),
           "failures": results.count(False)}
    if float_crosscheck:
        import numpy as np
        from .fock import coherent_gram_float
        labels = [tuple(GaussScalar(rng.randint(-1, 1)) for _ in range(m))
                  for _ in range(4)]
        labels = list(dict.fromkeys(labels))
        eig = np.linalg.eigvalsh(coherent_gram_float(wfin, labels))
        out["gram_min_eig_float"] = float(eig.min())
        if eig.min() <= 0:
            out["failures"] += 1
    return out


def suite_cocycle(k: int, trials: int, seed: int, threads: int = 1) -> dict:
    """Antisymmetry of the boundary 2-cocycle on seeded pairs of level
    representative combinations."""
    max_level = 3 if k == 0 else 2
    levels = [build_level(k, i) for i in range(1, max_level + 1)]
    rng = random.Random(seed)

    def combo():
        w = PolyForm.zero(4 * k + 2, 2 * k)
        for lv in levels:
            for B in lv.ambient_space.basis[:4]:
                c = GaussScalar(rng.randint(-2, 2), rng.randint(-2, 2))
                if c:
                    w = w + B.scale(c)
        return w

    cases = [(combo(), combo()) for _ in range(trials)]

    def one(a, b):
        s = cocycle_pairing(a, b) + cocycle_pairing(b, a)
        return not s

    fns = [(lambda a=a, b=b: one(a, b)) for a, b in cases]
    results = _run_trials(fns, threads)
    return {"suite": "cocycle", "k": k, "trials": len(results),
            "failures": results.count(False)}


def suite_ortho(k: int, max_level: int, seed: int = 0, threads: int = 1) -> dict:
    """Chirality-split orthogonality: the W assembly re-runs its exact
    cross-level and chiral-vs-antichiral zero-Gram certifications."""
    try:
        wb = assemble_W(k, max_level)
        chiral_image_basis(k, max_level, wb)
        failures = 0
        trials = wb.dim
    except CheckFailed:
        failures = 1
        trials = 1
    return {"suite": "ortho", "k": k, "trials": trials, "failures": failures}


SUITES = {
    "stokes": lambda cfg: suite_stokes(cfg.k, cfg.trials, cfg.seed, cfg.threads),
    "energy": lambda cfg: suite_energy(cfg.k, cfg.max_level, cfg.seed, cfg.threads),
    "projective": lambda cfg: suite_projective(
        cfg.k, cfg.trials, cfg.seed, cfg.threads,
        float_crosscheck=(cfg.arithmetic == "exact-with-float-crosscheck")),
    "cocycle": lambda cfg: suite_cocycle(cfg.k, cfg.trials, cfg.seed, cfg.threads),
    "ortho": lambda cfg: suite_ortho(cfg.k, cfg.max_level, cfg.seed, cfg.threads),
}
