"""
Searching for a marked site
===========================

Three ways of marking a site on a 12 x 12 torus: rewire its three bonds,
switch on a single bond inside its cell, or hang an extra site off it.
"""

# %%
from _common import output_dir
from diracwalk import A, ExtraSite, SingleBond, ThreeBond, build_torus
from diracwalk.dynamics import run_search, start_state_family
from diracwalk.svg import line_plot

out = output_dir()
lat = build_torus(12, 12)

# %%
# Three-bond marking: probability gathers on the three neighbours.
res = run_search(lat, ThreeBond(lat.site(0, 0, A)))
print(f"three-bond: peak {res.peak_probability:.3f} at t = {res.peak_time:.2f} "
      f"(few-state estimate {res.reference_time:.2f})")
tr = res.trajectory
line_plot(out / "search.svg", [("neighbours", tr.times, tr.total)], "time", "probability", "three-bond search")

# %%
# Only the start state matched to the marked site's phase class finds it.
for label, start in start_state_family(lat):
    r = run_search(lat, ThreeBond(lat.site(0, 0, A)), start=start)
    print(f"  start {label}: peak {r.peak_probability:.3f}")

# %%
# Single-bond marking at gamma = 1/3 spreads the peak over both vertices and their neighbours.
res = run_search(lat, SingleBond((0, 0)))
for site, p in res.site_peaks.items():
    print(f"  {site:8s} {p:.4f}")
print(f"single-bond combined peak {res.peak_probability:.3f}")

# %%
# Extra-site marking: the walker ends up on the added site itself.
res = run_search(lat, ExtraSite(lat.site(0, 0, A)))
print(f"extra site: peak {res.peak_probability:.3f} at t = {res.peak_time:.2f}")
