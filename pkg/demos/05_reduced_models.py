"""
Few-state models
================

Project the search and transfer dynamics onto the Dirac states plus the
perturber's own state and compare with the full lattice.
"""

# %%
import numpy as np

from diracwalk import A, ThreeBond, build_torus, search_hamiltonian
from diracwalk.dynamics import run_search
from diracwalk.reduced import (
    embedding_basis,
    reduced_comm_evolution,
    reduced_communication,
    reduced_extra_site,
    reduced_three_bond,
    search_time,
)

n = 288

# %%
# Closed-form levels.
print("three-bond:", reduced_three_bond(n).eigenvalues())
print("extra site:", reduced_extra_site(n).eigenvalues())
print("same class:", reduced_communication(n, (0, 0), (1, 1)).eigenvalues())
print("other class:", reduced_communication(n, (0, 0), (1, 0)).eigenvalues())

# %%
# The 3 x 3 matrix is exactly the full Hamiltonian compressed onto (K, K', l).
lat = build_torus(12, 12)
q = embedding_basis(lat, 0, 0)
h = search_hamiltonian(lat, ThreeBond(lat.site(0, 0, A)))
print("compression error:", np.max(np.abs(q.conj().T @ h @ q - reduced_three_bond(n).matrix)))

# %%
# The full model peaks later than the few-state time because the bulk slows it down.
full = run_search(lat, ThreeBond(lat.site(0, 0, A)))
print(f"few-state time {search_time(reduced_three_bond(n)):.2f}, full-model peak {full.peak_time:.2f}")

# %%
m = reduced_communication(n, (0, 0), (1, 0))
for t in (0, 10, 20, 40, 80):
    ps, pt = reduced_comm_evolution(m, t)
    print(f"t = {t:3d}: source {ps:.3f}, target {pt:.3f}")
