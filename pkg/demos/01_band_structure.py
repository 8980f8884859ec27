"""
Honeycomb tori and their Dirac points
=====================================

Build a periodic honeycomb lattice, compare the closed-form band energies with
a dense diagonalization, and look at the zero-energy states that exist only
when both torus dimensions are multiples of three.
"""

# %%
import numpy as np

from _common import output_dir
from diracwalk import A, B, adjacency_matrix, build_torus
from diracwalk.spectral import dirac_states, dispersion, quantized_momenta, torus_band_energies
from diracwalk.svg import line_plot

out = output_dir()

# %%
# A 12 x 12 torus has 288 sites, each with three neighbours.
lat = build_torus(12, 12)
print(lat.n_sites, "sites, valences", set(lat.valence()))

# %%
# The Bloch formula reproduces every eigenvalue of -A.
ev = np.linalg.eigvalsh(-adjacency_matrix(lat))
print("max |band - eig| =", np.max(np.abs(torus_band_energies(12, 12) - ev)))

# %%
# Zero modes appear only when 3 divides both dimensions.
for m in (9, 10, 11, 12):
    e = np.linalg.eigvalsh(-adjacency_matrix(build_torus(m, m)))
    print(f"{m:2d} x {m:<2d}: {np.sum(np.abs(e) < 1e-10)} zero modes")

# %%
# The four zero modes are the K and K' states on each sublattice.
for sub in (A, B):
    k, kp = dirac_states(lat, sub)
    print(sub, "|A K| =", np.linalg.norm(adjacency_matrix(lat) @ k), " <K|K'> =", abs(np.vdot(k, kp)))

# %%
# Upper band along the quantized momenta, sorted by energy.
eps = np.sort([dispersion(k)[0] for k in quantized_momenta(12, 12)])
line_plot(out / "bands.svg", [("upper band", np.arange(eps.size), eps), ("lower band", np.arange(eps.size), -eps)],
          "momentum index (sorted)", "energy", "12 x 12 torus bands")
print("wrote", out / "bands.svg")
