"""
===========================================
Counting intersections over a cross section
===========================================

Scanning the triangle spanned by the even permutations and counting how many
points the corresponding pair of Clifford tori have in common.

"""

import matplotlib.pyplot as plt

# %%
# Import necessary packages
import numpy as np
import cliffordtori

# %%
# The section through the van der Waerden matrix that contains the three even
# permutation matrices. Its unistochastic part is bounded by a deltoid of
# orthostochastic matrices, which we trace first.
spec = cliffordtori.CrossSectionSpec.triangle()
boundary = cliffordtori.section_boundary_trace(spec, resolution=240)

corners = np.array([[1.0, 0.0], [-0.5, np.sqrt(3) / 2], [-0.5, -np.sqrt(3) / 2], [1.0, 0.0]])
plt.plot(corners[:, 0], corners[:, 1], "k-", label="Birkhoff's polytope")
plt.plot(boundary[:, 0], boundary[:, 1], "r.", markersize=2, label="orthostochastic")
plt.gca().set_aspect("equal")
plt.legend()
plt.show()

# %%
# Now count the intersections on a coarse grid. Inside the deltoid every
# matrix gives a pair of tori and we record how many points they share.
# Grid points outside the deltoid carry no count, and the few cells where
# the tori meet along curves are left out as well.
cells = cliffordtori.scan_section(spec, resolution=15)
inside = [cell for cell in cells if isinstance(cell.count, int)]
counts = np.array([cell.count for cell in inside])
u = np.array([cell.u for cell in inside])
v = np.array([cell.v for cell in inside])

plt.plot(corners[:, 0], corners[:, 1], "k-")
plt.plot(boundary[:, 0], boundary[:, 1], "r.", markersize=2)
scatter = plt.scatter(u, v, c=counts, cmap="viridis", vmin=3, vmax=6)
plt.colorbar(scatter, label="number of intersections")
plt.gca().set_aspect("equal")
plt.show()

# Choose the last image as a thumbnail for the gallery
# sphinx_gallery_thumbnail_number = -1
