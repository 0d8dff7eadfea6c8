"""Exact eigenspaces of coexact forms on odd spheres, chirality splittings,
and the Heisenberg coherent-state model with its invariant functionals."""

from .scalars import GaussScalar
from .exterior import (
    MeasureValue,
    PolyForm,
    ball_monomial_integral,
    codiff,
    euler_contract,
    ext_d,
    hodge_star_flat,
    l2_inner_ball,
    laplacian,
    random_form,
    sphere_l2_inner_tangential,
    sphere_monomial_integral,
    sphere_wedge_d_pair,
    wedge,
)

__version__ = "0.1.0"
