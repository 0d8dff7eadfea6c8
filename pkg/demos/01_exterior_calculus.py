"""Exact exterior calculus on R^n: a guided tour.

Everything below is computed in exact Gaussian-rational arithmetic; the only
transcendental quantity, pi^{n/2}, is carried symbolically as a unit.
"""

from chiral_blocks.exterior import (
    PolyForm,
    ball_monomial_integral,
    codiff,
    euler_contract,
    ext_d,
    hodge_star_flat,
    l2_inner_ball,
    laplacian,
    sphere_monomial_integral,
    sphere_wedge_d_pair,
    wedge,
)

# Coordinates and coframe on the plane.
x1 = PolyForm.coordinate(2, 0)
x2 = PolyForm.coordinate(2, 1)
dx1 = PolyForm.dx(2, 0)
dx2 = PolyForm.dx(2, 1)

print("== differential and wedge ==")
print("d(x1 x2)        =", ext_d(wedge(x1, x2)))
print("dx1 ^ dx2       =", wedge(dx1, dx2))
print("dx2 ^ dx1       =", wedge(dx2, dx1), "   (anticommutes)")

print("\n== Hodge star: ** = -1 in middle degree ==")
print("*dx1            =", hodge_star_flat(dx1))
print("**dx1           =", hodge_star_flat(hodge_star_flat(dx1)))

print("\n== codifferential and Laplacian ==")
print("d*(x1 dx1)      =", codiff(wedge(x1, dx1)), "  (minus the divergence)")
print("Lap(x1^2)       =", laplacian(wedge(x1, x1)))
print("Lap(x1^2-x2^2)  =", laplacian(wedge(x1, x1) - wedge(x2, x2)), " (harmonic)")

print("\n== Euler contraction and the homogeneity identity ==")
w = wedge(x1, dx2)
lhs = ext_d(euler_contract(w)) + euler_contract(ext_d(w))
print("(d i_E + i_E d)(x1 dx2) =", lhs, "  -- equals (p+i) w = 2 w")

print("\n== exact integrals in pi-units ==")
print("area of S^1     =", sphere_monomial_integral((0, 0)).value, "* pi")
print("int x1^2 on S^1 =", sphere_monomial_integral((2, 0)).value, "* pi")
print("int x1^2 on B^2 =", ball_monomial_integral((2, 0)).value, "* pi")
print("vol of S^5      =", sphere_monomial_integral((0,) * 6).value, "* pi^3")

print("\n== the boundary pairing via Stokes ==")
print("int_S x1 d(x2)  =", sphere_wedge_d_pair(x1, x2).value, "* pi")
print("||dx1||^2 (ball) =", l2_inner_ball(dx1, dx1).value, "* pi")
