"""Block dimensions for the disk, reproduced at truncation.

For the six-dimensional disk (k = 1) the dimension is 1; the circle gives
1 for the even class and 0 for the odd one, where the constant subgroup's
weight filter removes every sector but weight zero.  The grids confirm the
answers are stable in both truncation parameters.
"""

from chiral_blocks.blocks import conformal_block_dim, truncation_stability

print("== k = 1 (six-dimensional disk) ==")
report = conformal_block_dim(1, 0, N=1, D=3)
print(f"dim = {report.dim}")
print("checks:", dict(report.checks))
print(report.to_json_bytes().decode())

print("== the circle: both classes ==")
for lam in (0, 1):
    rep = conformal_block_dim(0, lam, N=3, D=4)
    print(f"lambda = {lam}: dim = {rep.dim}")

print("\n== truncation stability grids ==")
table = truncation_stability(0, 0, [1, 2, 3], [2, 3, 4])
print("k=0, lambda=0:", "constant" if table["constant"] else "NOT CONSTANT",
      "dims =", table["dims"])
table = truncation_stability(0, 1, [1, 2, 3], [2, 3, 4])
print("k=0, lambda=1:", "constant" if table["constant"] else "NOT CONSTANT",
      "dims =", table["dims"])
table = truncation_stability(1, 0, [1, 2], [2, 3])
print("k=1, lambda=0:", "constant" if table["constant"] else "NOT CONSTANT",
      "dims =", table["dims"])
