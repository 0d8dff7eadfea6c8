import random

import numpy as np
import pytest
from gmpy2 import mpq

from chiral_blocks.errors import PreconditionError, StructuralError
from chiral_blocks.exterior import PolyForm, random_form, wedge
from chiral_blocks.fock import (
    CoherentVector,
    FockVector,
    FormalScalar,
    HeisenbergElement,
    SimpleWFin,
    chi,
    cocycle_pairing,
    coherent_gram_float,
    coherent_to_json,
    default_loop_wfin,
    diagonal_wfin,
    exp_truncated,
    fock_monomials,
    fock_to_json,
    gram_coherent,
    heisenberg_phase_exponent,
    invariant_functional_basis,
    invariant_functional_dim,
    loop_sector_dim,
    multiply_truncated,
    pair_V,
    pair_W_Wbar,
    projective_defect,
    rho_act,
    unit_generators,
)
from chiral_blocks.scalars import GaussScalar


def gs(re, im=0):
    return GaussScalar(re, im)


@pytest.fixture
def wfin2():
    return default_loop_wfin(2)      # gram diag(2, 4)


def rand_coords(rng, m, span=3):
    return tuple(GaussScalar(rng.randint(-span, span), rng.randint(-span, span))
                 for _ in range(m))


class TestFormalScalar:
    def test_merge_and_zero(self):
        s = FormalScalar([(gs(1), gs(2)), (gs(-1), gs(2))])
        assert not s
        assert s == FormalScalar.zero()

    def test_product_adds_exponents(self):
        a = FormalScalar.exp(gs(1, 1))
        b = FormalScalar.exp(gs(2))
        assert (a * b) == FormalScalar.exp(gs(3, 1))

    def test_sum_concatenates(self):
        a = FormalScalar.exp(gs(1))
        b = FormalScalar.exp(gs(2))
        s = a + b
        assert len(s.terms) == 2

    def test_is_one(self):
        assert FormalScalar.one().is_one()
        assert not FormalScalar.exp(gs(1)).is_one()

    def test_divide_by_single_term(self):
        a = FormalScalar([(gs(6), gs(5))])
        b = FormalScalar([(gs(2), gs(3))])
        assert a.divide_by(b) == FormalScalar([(gs(3), gs(2))])
        with pytest.raises(StructuralError):
            a.divide_by(a + FormalScalar.one())

    def test_conjugate(self):
        s = FormalScalar([(gs(1, 2), gs(0, 1))])
        assert s.conjugate() == FormalScalar([(gs(1, -2), gs(0, -1))])

    def test_float_evaluation(self):
        s = FormalScalar.exp(gs(1))
        assert abs(complex(s) - complex(np.e)) < 1e-12

    def test_json_roundtrip(self):
        s = FormalScalar([(gs(mpq(1, 2), 3), gs(-2, mpq(5, 7)))])
        assert FormalScalar.from_json(s.to_json()) == s


class TestGramCoherent:
    def test_vacuum(self, wfin2):
        z = (0, 0)
        assert gram_coherent(wfin2, z, z).is_one()

    def test_first_basis_vector(self, wfin2):
        e1 = (1, 0)
        g = pair_V(wfin2, (gs(1), gs(0)), (gs(1), gs(0)))
        assert g == gs(2)
        assert gram_coherent(wfin2, e1, e1) == FormalScalar.exp(gs(4))

    def test_hermitian(self, wfin2):
        rng = random.Random(3)
        for _ in range(10):
            xi = rand_coords(rng, 2)
            eta = rand_coords(rng, 2)
            assert gram_coherent(wfin2, xi, eta) == \
                gram_coherent(wfin2, eta, xi).conjugate()


class TestRhoAct:
    def test_identity_element(self, wfin2):
        u = CoherentVector.coherent(wfin2, (gs(1), gs(2, 1)))
        v = HeisenbergElement(wfin2, (0, 0), (0, 0))
        assert rho_act(v, u) == u

    def test_pure_creation_moves_vacuum(self, wfin2):
        v = HeisenbergElement(wfin2, (gs(2), gs(0, 1)), (0, 0))
        got = rho_act(v, CoherentVector.vacuum(wfin2))
        assert got == CoherentVector.coherent(wfin2, (gs(2), gs(0, 1)))

    def test_pure_annihilation_fixes_vacuum(self, wfin2):
        v = HeisenbergElement(wfin2, (0, 0), (gs(3), gs(1, -1)))
        got = rho_act(v, CoherentVector.vacuum(wfin2))
        assert got == CoherentVector.vacuum(wfin2)

    def test_linear(self, wfin2):
        rng = random.Random(4)
        v = HeisenbergElement(wfin2, rand_coords(rng, 2), rand_coords(rng, 2))
        a = CoherentVector.coherent(wfin2, rand_coords(rng, 2))
        b = CoherentVector.coherent(rng and wfin2, rand_coords(rng, 2))
        lhs = rho_act(v, a + b.scale(gs(2, 1)))
        rhs = rho_act(v, a) + rho_act(v, b).scale(gs(2, 1))
        assert lhs == rhs

    def test_basis_mismatch(self, wfin2):
        other = diagonal_wfin([1, 1, 1])
        v = HeisenbergElement(other, (0, 0, 0), (0, 0, 0))
        with pytest.raises(StructuralError):
            rho_act(v, CoherentVector.vacuum(wfin2))


class TestProjectiveRelation:
    def test_phase_exponent_closed_form(self, wfin2):
        # the generic block computation must equal B(p, q') - B(p', q)
        rng = random.Random(5)
        for _ in range(25):
            v = HeisenbergElement(wfin2, rand_coords(rng, 2), rand_coords(rng, 2))
            v2 = HeisenbergElement(wfin2, rand_coords(rng, 2), rand_coords(rng, 2))
            expect = pair_W_Wbar(wfin2, v.v_plus, v2.v_minus) \
                - pair_W_Wbar(wfin2, v2.v_plus, v.v_minus)
            assert heisenberg_phase_exponent(v, v2) == expect

    def test_creation_annihilation_pair(self, wfin2):
        v = HeisenbergElement(wfin2, (gs(1), gs(0)), (0, 0))
        v2 = HeisenbergElement(wfin2, (0, 0), (gs(1), gs(0)))
        assert projective_defect(v, v2, CoherentVector.vacuum(wfin2)).is_one()

    def test_inverse_pair(self, wfin2):
        rng = random.Random(6)
        p, q = rand_coords(rng, 2), rand_coords(rng, 2)
        v = HeisenbergElement(wfin2, p, q)
        v2 = HeisenbergElement(wfin2, tuple(-c for c in p), tuple(-c for c in q))
        probe = CoherentVector.coherent(wfin2, rand_coords(rng, 2))
        assert projective_defect(v, v2, probe).is_one()

    def test_seeded_triples(self, wfin2):
        rng = random.Random(7)
        for _ in range(20):
            v = HeisenbergElement(wfin2, rand_coords(rng, 2), rand_coords(rng, 2))
            v2 = HeisenbergElement(wfin2, rand_coords(rng, 2), rand_coords(rng, 2))
            probe = CoherentVector.coherent(wfin2, rand_coords(rng, 2))
            assert projective_defect(v, v2, probe).is_one()

    def test_nontrivial_central_scalars(self, wfin2):
        rng = random.Random(8)
        v = HeisenbergElement(wfin2, rand_coords(rng, 2), rand_coords(rng, 2),
                              FormalScalar.exp(gs(1, 1)))
        v2 = HeisenbergElement(wfin2, rand_coords(rng, 2), rand_coords(rng, 2),
                               FormalScalar.of(gs(0, 2)))
        probe = CoherentVector.vacuum(wfin2)
        assert projective_defect(v, v2, probe).is_one()


class TestCocyclePairing:
    def test_worked_instance(self):
        x1 = PolyForm.coordinate(2, 0)
        x2 = PolyForm.coordinate(2, 1)
        assert cocycle_pairing(x1, x2).value == gs(1)

    def test_antisymmetry_on_self(self):
        x1 = PolyForm.coordinate(2, 0)
        assert not cocycle_pairing(x1, x1)

    def test_bilinear_seeded(self):
        rng = random.Random(9)
        for _ in range(10):
            a = random_form(rng, 2, 0, rng.randint(1, 3), nterms=2)
            b = random_form(rng, 2, 0, rng.randint(1, 3), nterms=2)
            c = random_form(rng, 2, 0, rng.randint(1, 3), nterms=2)
            s = GaussScalar(rng.randint(-4, 4), rng.randint(-4, 4))
            lhs = cocycle_pairing(a + b.scale(s), c)
            rhs = cocycle_pairing(a, c) + cocycle_pairing(b, c).scale(s)
            assert lhs.value == rhs.value

    def test_tangential_precondition(self):
        w = PolyForm.dx(6, 0)  # a 1-form is acceptable only if tangential
        with pytest.raises(PreconditionError):
            cocycle_pairing(wedge(w, PolyForm.dx(6, 1)),
                            wedge(w, PolyForm.dx(6, 2)))


class TestChi:
    def test_on_coherent_symbol(self, wfin2):
        assert chi(CoherentVector.coherent(wfin2, (gs(1), gs(2)))).is_one()

    def test_sum_of_coefficients(self, wfin2):
        u = CoherentVector.coherent(wfin2, (gs(1), gs(0))).scale(gs(3)) + \
            CoherentVector.coherent(wfin2, (gs(0), gs(1))).scale(gs(-2))
        assert chi(u) == FormalScalar.of(gs(1))

    def test_invariant_under_creation(self, wfin2):
        rng = random.Random(10)
        for _ in range(10):
            w = HeisenbergElement(wfin2, rand_coords(rng, 2), (0, 0))
            u = CoherentVector.coherent(wfin2, rand_coords(rng, 2)).scale(
                FormalScalar.exp(gs(1))) + CoherentVector.vacuum(wfin2)
            assert chi(rho_act(w, u)) == chi(u)


class TestFockTruncation:
    def test_monomial_count(self):
        assert len(fock_monomials(2, 4)) == 15
        assert len(fock_monomials(10, 3)) == 286

    def test_multiply_truncates(self, wfin2):
        v = FockVector(wfin2, 2, {(): gs(1)})
        w = multiply_truncated(v, (gs(1), gs(0)))
        assert w.terms == {(0,): gs(1)}
        w2 = multiply_truncated(multiply_truncated(w, (gs(1), gs(0))),
                                (gs(1), gs(0)))
        assert w2.terms == {}        # degree 3 > D = 2

    def test_exp_truncated_vacuum(self, wfin2):
        v = FockVector(wfin2, 2, {(): gs(1)})
        e = exp_truncated(v, (gs(1), gs(0)))
        assert e.terms == {(): gs(1), (0,): gs(1), (0, 0): gs(mpq(1, 2))}


class TestInvariantFunctionals:
    def test_loop_model_dimension(self, wfin2):
        gens = unit_generators(wfin2)
        assert invariant_functional_dim(wfin2, 4, gens) == 1

    def test_modes_agree(self, wfin2):
        gens = unit_generators(wfin2)
        for D in (1, 2, 3, 4):
            assert invariant_functional_dim(wfin2, D, gens, "group") == \
                invariant_functional_dim(wfin2, D, gens, "infinitesimal")

    def test_spanning_sets_agree(self, wfin2):
        units = unit_generators(wfin2)
        mixed = [(gs(1), gs(1)), (gs(1), gs(-1))]
        enriched = units + [(gs(2, 1), gs(0, 3))]
        d0 = invariant_functional_dim(wfin2, 3, units)
        assert invariant_functional_dim(wfin2, 3, mixed) == d0
        assert invariant_functional_dim(wfin2, 3, enriched) == d0

    def test_non_spanning_rejected(self, wfin2):
        with pytest.raises(PreconditionError):
            invariant_functional_dim(wfin2, 3, [(gs(1), gs(0))])

    def test_empty_rejected(self, wfin2):
        with pytest.raises(PreconditionError):
            invariant_functional_dim(wfin2, 3, [])

    def test_rescaling_invariance(self, wfin2):
        scaled = SimpleWFin([[c * 7 for c in row] for row in wfin2.gram])
        gens = unit_generators(wfin2)
        assert invariant_functional_dim(scaled, 3, gens) == \
            invariant_functional_dim(wfin2, 3, gens)

    def test_chi_spans_the_space(self, wfin2):
        monos, basis = invariant_functional_basis(wfin2, 4,
                                                  unit_generators(wfin2))
        assert len(basis) == 1
        vec = basis[0]
        const_col = monos.index(())
        assert vec[const_col] == GaussScalar.one()
        assert set(vec) == {const_col}   # exactly the vacuum-pairing functional


class TestLoopSectorDim:
    def test_lambda_zero(self):
        assert loop_sector_dim(0) == 1

    def test_lambda_one(self):
        assert loop_sector_dim(1) == 0

    def test_weight_lattice_parity(self):
        # lambda=1: the weight lattice 1 + 2Z never contains 0
        assert all((1 + 2 * xi) != 0 for xi in range(-50, 51))

    def test_bad_lambda(self):
        with pytest.raises(PreconditionError):
            loop_sector_dim(2)


class TestFloatCrossCheck:
    def test_coherent_gram_positive(self, wfin2):
        rng = random.Random(11)
        labels = [(0, 0)] + [rand_coords(rng, 2, span=1) for _ in range(3)]
        labels = list({tuple(l) for l in labels})    # distinct
        M = coherent_gram_float(wfin2, labels)
        eig = np.linalg.eigvalsh(M)
        assert eig.min() > 0


class TestSerialization:
    def test_coherent_json(self, wfin2):
        u = CoherentVector.coherent(wfin2, (gs(1), gs(0, 1)))
        d = coherent_to_json(u)
        assert d["w_fin"] == {"k": 0, "N": 2}
        assert len(d["terms"]) == 1

    def test_fock_json(self, wfin2):
        v = FockVector(wfin2, 3, {(0, 1): gs(mpq(1, 3))})
        d = fock_to_json(v)
        assert d["D"] == 3 and d["terms"][0]["mono"] == [0, 1]
