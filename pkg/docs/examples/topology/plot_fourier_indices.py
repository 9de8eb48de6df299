"""
=====================================
Indices of the Fourier pair of tori
=====================================

Locating the six vectors unbiased to both the computational and the Fourier
basis in dimension 3, and reading off the sign of each intersection.

"""

import matplotlib.pyplot as plt

# %%
# Import necessary packages
import numpy as np
import cliffordtori

# %%
# Solve the unbiasedness equations for the Fourier matrix. The solver reports
# the phases (α₁, α₂) of every common point together with the determinant of
# the tangent frames there.
F = cliffordtori.fourier_matrix(3)
result = cliffordtori.find_intersections(F)
print(result.classification.value, result.count, "points, index sum", result.index_sum)

alpha = np.array([point.alpha for point in result.points])
index = np.array([point.index for point in result.points])
plt.scatter(alpha[index > 0, 0], alpha[index > 0, 1], c="r", label="index +1")
plt.scatter(alpha[index < 0, 0], alpha[index < 0, 1], c="b", label="index -1")
plt.xlim(0, 2 * np.pi)
plt.ylim(0, 2 * np.pi)
plt.xlabel("α₁")
plt.ylabel("α₂")
plt.legend()
plt.show()

# %%
# The same points are the circulant bases |z, a⟩. In prime dimension p the
# sign of the determinant depends only on whether z is a quadratic residue.
for p in (3, 5, 7):
    rows = cliffordtori.fourier_mub_index_table(p)
    z = np.array([row.z for row in rows])
    det = np.array([row.det for row in rows])
    plt.plot(z + 0.1 * (p - 5), det, "o", label=f"p = {p}")
plt.axhline(0, color="k", linewidth=0.5)
plt.xlabel("basis label z")
plt.ylabel("frame determinant")
plt.legend()
plt.show()

# Choose the last image as a thumbnail for the gallery
# sphinx_gallery_thumbnail_number = -1
