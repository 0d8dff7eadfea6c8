import pytest

from chiral_blocks.blocks import (
    BlockReport,
    chiral_image_basis,
    conformal_block_dim,
    truncation_stability,
)
from chiral_blocks.errors import PreconditionError
from chiral_blocks.exterior import PolyForm, wedge
from chiral_blocks.scalars import GaussScalar
from chiral_blocks.spectra import assemble_W


def z_power(m):
    z = PolyForm.coordinate(2, 0) + PolyForm.coordinate(2, 1).scale(GaussScalar.i())
    w = PolyForm.one(2)
    for _ in range(m):
        w = wedge(w, z)
    return w


class TestChiralImageBasis:
    def test_k0_representatives_are_z_powers(self):
        reps = chiral_image_basis(0, 2)
        assert len(reps) == 2
        assert reps[0].B == z_power(1)
        assert reps[1].B == z_power(2)
        assert reps[0].level == 1 and reps[1].level == 2

    def test_restrictions_are_unit_vectors(self):
        reps = chiral_image_basis(0, 3)
        for pos, rep in enumerate(reps):
            for t, c in enumerate(rep.restriction):
                assert c == (GaussScalar.one() if t == pos else GaussScalar.zero())

    def test_k1_count(self):
        reps = chiral_image_basis(1, 1)
        assert len(reps) == 10

    def test_delta_is_curvature(self):
        from chiral_blocks.exterior import ext_d
        for rep in chiral_image_basis(0, 2):
            assert rep.delta == ext_d(rep.B)

    def test_needs_positive_N(self):
        with pytest.raises(PreconditionError):
            chiral_image_basis(0, 0)


class TestConformalBlockDim:
    def test_theorem_value_k1(self):
        report = conformal_block_dim(1, 0, 1, 3)
        assert report.dim == 1
        assert report.all_passed()

    def test_circle_table_lambda0(self):
        assert conformal_block_dim(0, 0, 3, 4).dim == 1

    def test_circle_table_lambda1(self):
        assert conformal_block_dim(0, 1, 3, 4).dim == 0

    def test_k1_rejects_nonzero_lambda(self):
        with pytest.raises(PreconditionError):
            conformal_block_dim(1, 1, 1, 3)

    def test_circle_rejects_lambda_outside_z2(self):
        with pytest.raises(PreconditionError):
            conformal_block_dim(0, 2, 2, 3)

    def test_bad_truncations(self):
        with pytest.raises(PreconditionError):
            conformal_block_dim(0, 0, 0, 3)
        with pytest.raises(PreconditionError):
            conformal_block_dim(0, 0, 2, 0)

    def test_only_disks_supported(self):
        with pytest.raises(PreconditionError):
            conformal_block_dim(0, 0, 2, 3, domain="annulus")

    def test_reports_deterministic(self):
        a = conformal_block_dim(0, 0, 2, 3).to_json_bytes()
        b = conformal_block_dim(0, 0, 2, 3).to_json_bytes()
        assert a == b

    def test_json_schema(self):
        d = conformal_block_dim(0, 0, 2, 3).to_json_dict()
        assert set(d) == {"k", "lambda", "N", "D", "dim", "checks", "unit"}
        assert d["unit"] == "pi^1"
        assert all(set(c) == {"name", "pass"} for c in d["checks"])

    def test_reuses_assembled_basis(self):
        wb = assemble_W(0, 2)
        report = conformal_block_dim(0, 0, 2, 3, wbasis=wb)
        assert report.dim == 1


class TestTruncationStability:
    def test_circle_lambda0_grid(self):
        table = truncation_stability(0, 0, [1, 2, 3, 4], [2, 3, 4, 5])
        assert table["constant"] and table["dims"] == [1]
        assert len(table["grid"]) == 16

    def test_circle_lambda1_grid(self):
        table = truncation_stability(0, 1, [1, 2], [2, 3])
        assert table["constant"] and table["dims"] == [0]

    def test_k1_small_grid(self):
        table = truncation_stability(1, 0, [1], [2, 3])
        assert table["constant"] and table["dims"] == [1]

    def test_empty_grid_rejected(self):
        with pytest.raises(PreconditionError):
            truncation_stability(0, 0, [], [2])
