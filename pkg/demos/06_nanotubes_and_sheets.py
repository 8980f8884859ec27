"""
Nanotubes and finite sheets
===========================

Open boundaries change which searches work. Nanotubes only have Dirac states
for certain lengths and some sites are invisible to them. Sheets with zigzag
or bearded edges carry edge states that spoil searches started from them.
"""

# %%
import numpy as np

from diracwalk import A, ThreeBond, adjacency_matrix, build_armchair_nanotube, build_sheet
from diracwalk.dynamics import normalize, run_search, zero_mode_weights
from diracwalk.spectral import avoided_crossing_gap, edge_state_detection, eigendecompose

# %%
for n_x in range(5, 12):
    ev = np.linalg.eigvalsh(-adjacency_matrix(build_armchair_nanotube(n_x, 8)))
    print(f"n_x = {n_x:2d}: zero mode {'yes' if np.min(np.abs(ev)) < 1e-10 else 'no'}")

# %%
# Along a tube with zero modes some sites carry no zero-mode weight; marking them gives no gap.
tube = build_armchair_nanotube(20, 8)
w = zero_mode_weights(tube)
for i in range(8):
    s = tube.site(i, 0, A)
    print(f"{s.label}: weight {w[s.linear]:.4f}, gap {avoided_crossing_gap(tube, ThreeBond(s)):.2e}")

# %%
sheet = build_sheet(10, 10, "bearded")
d = eigendecompose(-adjacency_matrix(sheet))
edge = edge_state_detection(d, sheet)
print(len(edge), "edge states at energies", np.round(np.sort(d.eigenvalues[edge]), 4))

# %%
# Starting in an edge state does nothing; the first delocalized state finds a central site.
p = ThreeBond(sheet.site(5, 5, A))
worst = max(run_search(sheet, p, start=normalize(d.eigenvectors[:, i])).peak_probability for i in edge)
best = run_search(sheet, p)
print(f"edge starts peak at most {worst:.4f}; delocalized start peaks at {best.peak_probability:.4f}")
