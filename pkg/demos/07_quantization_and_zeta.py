"""
Where the perturbed level sits
==============================

Locate the level pulled out of the Dirac point by solving a scalar equation
over the unperturbed spectrum, and follow the lattice sums that control it.
"""

# %%
import numpy as np

from diracwalk import A, ThreeBond, build_torus, search_hamiltonian
from diracwalk.theory import (
    DIRAC_FORM,
    UnperturbedSpectrum,
    e_plus_estimate,
    epstein_zeta_report,
    i_sum,
    log_bound_table,
    solve_perturbed_energy,
)

# %%
for m in (6, 12, 18, 24):
    spec = UnperturbedSpectrum.from_torus(m, m)
    root = solve_perturbed_energy(spec)
    lat = build_torus(m, m)
    ev = np.linalg.eigvalsh(search_hamiltonian(lat, ThreeBond(lat.site(0, 0, A))))
    est, _ = e_plus_estimate(spec.n_sites, i_sum(2, spec))
    print(f"N = {spec.n_sites:4d}: root {root:.10f}, eigenvalue {ev[ev > 1e-9].min():.10f}, "
          f"estimate {est:.4f}, I2 = {i_sum(2, spec):.4f}")

# %%
z = epstein_zeta_report(DIRAC_FORM, 2.0)
print(f"Z(2) = {z.value:.12e} (partial {z.partial:.6e} + tail {z.tail:.3e}, tail error ~ {z.tail_bound:.1e})")
spec = UnperturbedSpectrum.from_torus(30, 30)
print(f"I4 / N at N = 1800: {i_sum(4, spec) / spec.n_sites:.5f}  vs 8 sqrt(3) Z(2) = {8 * np.sqrt(3) * z.value:.5f}")

# %%
t = log_bound_table(range(6, 31, 3))
for m, s, sq in zip(t.sizes, t.sums, t.square_sums):
    print(f"m = {m:2d}: sum/ln N = {s / np.log(2 * m * m):.4f}, square part {sq:.4f} <= {s:.4f}")
