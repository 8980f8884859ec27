"""
Sending a signal between two marked sites
=========================================

Localize the walker at one marked site, switch on a second marked site, and
watch the probability move. How well it moves depends on how the two sites
are related.
"""

# %%
import numpy as np

from _common import output_dir
from diracwalk import A, B, ThreeBond, build_torus
from diracwalk.dynamics import farthest_equivalent_site, run_communication
from diracwalk.svg import line_plot

out = output_dir()
lat = build_torus(12, 12)
src = ThreeBond(lat.site(0, 0, A))
t_c = np.pi / 2 * np.sqrt(lat.n_sites / 6)

# %%
targets = {
    "same phase class": farthest_equivalent_site(lat, src.marked),
    "other phase class": lat.site(4, 5, A),
    "other sublattice": lat.site(5, 3, B),
}
for name, site in targets.items():
    r = run_communication(lat, src, ThreeBond(site), t_max=12 * t_c, n_steps=3000)
    print(f"{name:18s} -> {site.label}: {r.case}, target peak {r.target_peak:.3f} at t = {r.target_peak_time:.1f}")
    tr = r.trajectory
    line_plot(out / f"comm_{r.case}.svg", [("source", tr.times, tr.tracked["source"]),
                                          ("target", tr.times, tr.tracked["target"])],
              "time", "probability", f"transfer to {site.label}")

# %%
# The two-frequency beat between non-equivalent sites does not care where the pair sits.
a = run_communication(lat, ThreeBond(lat.site(0, 0, A)), ThreeBond(lat.site(4, 5, A)))
b = run_communication(lat, ThreeBond(lat.site(6, 2, A)), ThreeBond(lat.site(10, 7, A)))
print("translation drift:", np.max(np.abs(a.trajectory.tracked["target"] - b.trajectory.tracked["target"])))
