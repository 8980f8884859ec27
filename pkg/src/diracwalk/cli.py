"""Command-line experiment runner.

Every subcommand reads one JSON config and writes its results into ``--out``::

    diracwalk search --config search.json --out results/

Exit status is 0 on success, 2 for a bad config and 3 when a numerical step
fails. ``DIRACWALK_WORKERS`` overrides ``--workers``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import dynamics, reduced, spectral, theory
from .lattice import A, B, BoundarySpec, Lattice, build
from .operators import ExtraSite, SingleBond, ThreeBond
from .svg import line_plot

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


class ConfigError(Exception):
    pass


def _need(cfg: dict, key: str, where: str = "config"):
    if key not in cfg:
        raise ConfigError(f"{where}: missing field '{key}'")
    return cfg[key]


def parse_lattice(cfg: dict) -> Lattice:
    lc = _need(cfg, "lattice")
    if not isinstance(lc, dict):
        raise ConfigError("lattice: expected an object")
    dims = _need(lc, "dims", "lattice")
    if not (isinstance(dims, list) and len(dims) == 2 and all(isinstance(d, int) for d in dims)):
        raise ConfigError("lattice.dims: expected two integers")
    try:
        return build(BoundarySpec(_need(lc, "variant", "lattice"), tuple(dims), lc.get("edge")))
    except ValueError as exc:
        raise ConfigError(f"lattice: {exc}") from None


def _site(lat: Lattice, spec, where: str):
    if not (isinstance(spec, list) and len(spec) in (2, 3)):
        raise ConfigError(f"{where}: expected [alpha, beta] or [alpha, beta, sublattice]")
    sub = spec[2] if len(spec) == 3 else A
    if sub not in (A, B):
        raise ConfigError(f"{where}: sublattice must be 'A' or 'B'")
    try:
        return lat.site(int(spec[0]), int(spec[1]), sub)
    except KeyError as exc:
        raise ConfigError(f"{where}: {exc.args[0]}") from None


def parse_perturbation(lat: Lattice, pc: dict, where: str = "perturbation"):
    if not isinstance(pc, dict):
        raise ConfigError(f"{where}: expected an object")
    kind = _need(pc, "kind", where)
    if kind == "three_bond":
        return ThreeBond(_site(lat, _need(pc, "site", where), f"{where}.site"))
    if kind == "extra_site":
        return ExtraSite(_site(lat, _need(pc, "site", where), f"{where}.site"))
    if kind == "single_bond":
        cell = _need(pc, "cell", where)
        _site(lat, list(cell[:2]) + [A], f"{where}.cell")
        _site(lat, list(cell[:2]) + [B], f"{where}.cell")
        return SingleBond((int(cell[0]), int(cell[1])))
    raise ConfigError(f"{where}.kind: unknown perturbation {kind!r}")


def _gamma_grid(cfg: dict, grid: int | None) -> np.ndarray:
    g = cfg.get("gamma_grid", {"start": 0.0, "stop": 1.5, "num": 301})
    if isinstance(g, list):
        arr = np.array(g, dtype=float)
    elif isinstance(g, dict):
        arr = np.linspace(float(g.get("start", 0.0)), float(g.get("stop", 1.5)), int(g.get("num", 301)))
    else:
        raise ConfigError("gamma_grid: expected a list or {start, stop, num}")
    if grid is not None:
        arr = np.linspace(arr[0], arr[-1], grid) if arr.size else arr
    if arr.size == 0:
        raise ConfigError("gamma_grid: grid is empty")
    if np.any(np.diff(arr) <= 0):
        raise ConfigError("gamma_grid: must be strictly increasing")
    return arr


def _time(cfg: dict, grid: int | None) -> tuple[float | None, int]:
    tc = cfg.get("time", {})
    n = int(tc.get("n_steps", dynamics.DEFAULT_STEPS)) if grid is None else grid
    if n < 3:
        raise ConfigError("time.n_steps: need at least 3 samples")
    t_max = tc.get("t_max")
    return (None if t_max is None else float(t_max)), n


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _trajectory_svg(path: Path, traj: dynamics.Trajectory, title: str) -> None:
    series = [(k, traj.times, v) for k, v in traj.tracked.items()] + [("total", traj.times, traj.total)]
    line_plot(path, series, "time", "probability", title, ylim=(0.0, max(0.05, float(traj.total.max()) * 1.1)))


# -- subcommands --------------------------------------------------------------

def cmd_lattice(cfg: dict, out: Path, **_) -> dict:
    lat = parse_lattice(cfg)
    (out / "lattice.json").write_text(lat.to_json(indent=1) + "\n")
    return {"n_sites": lat.n_sites}


def cmd_sweep(cfg: dict, out: Path, workers: int = 1, grid: int | None = None) -> dict:
    lat = parse_lattice(cfg)
    pert = parse_perturbation(lat, _need(cfg, "perturbation"))
    gammas = _gamma_grid(cfg, grid)
    window = tuple(cfg.get("window", (-0.6, 0.6)))
    sw = spectral.gamma_sweep(lat, pert, gammas, workers=workers, window=window)
    sw.to_csv(out / "sweep.csv")
    lo, hi = window
    series = []
    for j in range(sw.traces.shape[1]):
        tr = sw.traces[:, j]
        if np.any((tr > lo) & (tr < hi)):
            series.append(("", sw.gamma_grid, tr))
    line_plot(out / "sweep.svg", series or [("", sw.gamma_grid, sw.traces[:, 0])], "gamma", "energy",
              f"{pert.kind} spectrum", ylim=(lo, hi), legend=False, stroke=0.8)
    return {"levels": int(sw.traces.shape[1]), "points": int(sw.gamma_grid.size)}


def cmd_search(cfg: dict, out: Path, workers: int = 1, grid: int | None = None) -> dict:
    lat = parse_lattice(cfg)
    pert = parse_perturbation(lat, _need(cfg, "perturbation"))
    gamma = cfg.get("gamma")
    t_max, n = _time(cfg, grid)
    start_cfg = cfg.get("start", "optimal")
    summary = {}
    if start_cfg == "family":
        if not isinstance(pert, ThreeBond):
            raise ConfigError("start: 'family' applies to three_bond searches")
        runs = []
        for label, s in dynamics.start_state_family(lat):
            r = dynamics.run_search(lat, pert, gamma, t_max, n, start=s, start_descriptor=label)
            runs.append({"start": label, "peak_probability": r.peak_probability, "peak_time": r.peak_time})
        summary["family"] = runs
    elif start_cfg != "optimal":
        raise ConfigError("start: expected 'optimal' or 'family'")
    res = dynamics.run_search(lat, pert, gamma, t_max, n)
    res.trajectory.to_csv(out / "trajectory.csv")
    payload = res.to_dict(cfg)
    payload.update(summary)
    _write_json(out / "search.json", payload)
    _trajectory_svg(out / "search.svg", res.trajectory, f"{pert.kind} search, N = {lat.n_sites}")
    return {"peak_probability": res.peak_probability, "peak_time": res.peak_time}


def cmd_comm(cfg: dict, out: Path, workers: int = 1, grid: int | None = None) -> dict:
    lat = parse_lattice(cfg)
    src = parse_perturbation(lat, _need(cfg, "source"), "source")
    tc = _need(cfg, "target")
    if tc == "farthest_equivalent":
        site = dynamics.farthest_equivalent_site(lat, dynamics._site_of(src))
        tgt = type(src)(site)
    else:
        tgt = parse_perturbation(lat, tc, "target")
    try:
        dynamics.pair_case(src, tgt)
        from .operators import communication_hamiltonian
        communication_hamiltonian(lat, src, tgt)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"target: {exc}") from None
    t_max, n = _time(cfg, grid)
    res = dynamics.run_communication(lat, src, tgt, t_max, n)
    res.trajectory.to_csv(out / "trajectory.csv")
    _write_json(out / "comm.json", res.to_dict(cfg))
    _trajectory_svg(out / "comm.svg", res.trajectory, f"transfer ({res.case}), N = {lat.n_sites}")
    return {"case": res.case, "target_peak": res.target_peak, "target_peak_time": res.target_peak_time}


def _sizes(cfg: dict, default) -> list[tuple[int, int]]:
    raw = cfg.get("sizes", default)
    try:
        sizes = [(int(s), int(s)) if isinstance(s, int) else (int(s[0]), int(s[1])) for s in raw]
    except (TypeError, ValueError, IndexError):
        raise ConfigError("sizes: expected integers or [m, n] pairs") from None
    return sizes


def cmd_scaling(cfg: dict, out: Path, workers: int = 1, **_) -> dict:
    sizes = _sizes(cfg, list(range(6, 31, 3)))
    kind = cfg.get("kind", "three_bond")
    if kind not in ("three_bond", "single_bond"):
        raise ConfigError("kind: expected 'three_bond' or 'single_bond'")
    if len(sizes) < 4 or any(m % 3 or n % 3 for m, n in sizes):
        raise ConfigError("sizes: need at least 4 tori with dimensions divisible by 3")
    res = spectral.gap_scaling_fit(sizes, kind, workers)
    _write_json(out / "scaling.json", res.to_dict())
    res.to_csv(out / "scaling.csv")
    n = res.sizes.astype(float)
    nn = np.linspace(n.min(), n.max(), 200)
    line_plot(out / "scaling.svg", [
        ("gap", n, res.gaps),
        ("c1/sqrt(N)", nn, res.c1 / np.sqrt(nn)),
        ("c2/sqrt(N ln N)", nn, res.c2 / np.sqrt(nn * np.log(nn))),
    ], "N", "gap", "gap scaling")
    return res.to_dict()


def cmd_reduced(cfg: dict, out: Path, **_) -> dict:
    n_sites = int(cfg.get("n_sites", 288))
    src = tuple(cfg.get("source", [0, 0]))
    tgt = tuple(cfg.get("target", [1, 1]))
    try:
        tb = reduced.reduced_three_bond(n_sites, *src[:2])
        es = reduced.reduced_extra_site(n_sites, *src[:2])
        cm = reduced.reduced_communication(n_sites, src[:2], tgt[:2])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    payload = {
        "n_sites": n_sites,
        "three_bond": {**tb.to_dict(), "search_time": reduced.search_time(tb)},
        "extra_site": {**es.to_dict(), "search_time": reduced.search_time(es)},
        "communication": {**cm.to_dict(), "transfer_time": reduced.transfer_time(n_sites)},
    }
    _write_json(out / "reduced.json", payload)
    print(json.dumps(payload, indent=2, sort_keys=True))
    return {"search_time": payload["three_bond"]["search_time"]}


def theory_record(m: int, n: int) -> dict:
    from .lattice import build_torus
    from .operators import search_hamiltonian

    spec = theory.UnperturbedSpectrum.from_torus(m, n)
    e_root = theory.solve_perturbed_energy(spec)
    i2 = theory.i_sum(2, spec)
    e_est, fp_est = theory.e_plus_estimate(spec.n_sites, i2)
    lat = build_torus(m, n)
    pert = ThreeBond(lat.site(0, 0, A))
    decomp = spectral.eigendecompose(search_hamiltonian(lat, pert))
    start = dynamics.optimal_start_state(lat, pert)
    ov = theory.overlap_start_perturbed(decomp, start, pert.marked.linear, spec)
    return {
        "N": spec.n_sites,
        "E_plus_root": e_root,
        "E_plus_est": e_est,
        "F_prime_root": theory.f_prime(e_root, spec),
        "F_prime_est": fp_est,
        "I2": i2,
        "I4": theory.i_sum(4, spec),
        "overlap_direct": ov.direct,
        "overlap_formula": ov.formula,
    }


def cmd_theory(cfg: dict, out: Path, workers: int = 1, **_) -> dict:
    sizes = _sizes(cfg, [12])
    if any(m % 3 or n % 3 for m, n in sizes):
        raise ConfigError("sizes: tori need dimensions divisible by 3")
    records = spectral._map(lambda mn: theory_record(*mn), sizes, workers)
    payload = {"records": records}
    lb_sizes = cfg.get("log_bound_sizes", list(range(6, 31, 3)))
    if len(lb_sizes) >= 4:
        t = theory.log_bound_table(lb_sizes)
        payload["log_bounds"] = {"sizes": list(t.sizes), "sums": t.sums.tolist(),
                                 "square_sums": t.square_sums.tolist(), "C1": t.c1, "C2": t.c2}
    z = theory.epstein_zeta_report(theory.DIRAC_FORM, 2.0, int(cfg.get("cutoff", 500)))
    payload["epstein_z2"] = {"value": z.value, "partial": z.partial, "tail": z.tail,
                             "tail_bound": z.tail_bound, "cutoff": z.cutoff}
    _write_json(out / "theory.json", payload)
    return {"records": len(records)}


COMMANDS = {
    "lattice": cmd_lattice,
    "sweep": cmd_sweep,
    "search": cmd_search,
    "comm": cmd_comm,
    "scaling": cmd_scaling,
    "reduced": cmd_reduced,
    "theory": cmd_theory,
}


def resolve_workers(flag: int | None) -> int:
    env = os.environ.get("DIRACWALK_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"DIRACWALK_WORKERS must be an integer, got {env!r}") from None
    return max(1, flag if flag is not None else (os.cpu_count() or 1))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="diracwalk", description="Quantum-walk search experiments on honeycomb lattices.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", type=Path, help="JSON experiment config (optional for 'reduced')")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    p.add_argument("--workers", type=int, default=None, help="parallel jobs (default: CPU count)")
    p.add_argument("--grid", type=int, default=None, help="override gamma-grid or time-grid size")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config is None:
            if args.command != "reduced":
                raise ConfigError("--config is required")
            cfg = {}
        else:
            try:
                cfg = json.loads(args.config.read_text())
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError(f"cannot read config: {exc}") from None
            if not isinstance(cfg, dict):
                raise ConfigError("config must be a JSON object")
        if args.grid is not None and args.grid < 1:
            raise ConfigError("--grid must be positive")
        workers = resolve_workers(args.workers)
        args.out.mkdir(parents=True, exist_ok=True)
        summary = COMMANDS[args.command](cfg, args.out, workers=workers, grid=args.grid)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (np.linalg.LinAlgError, ValueError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    print(json.dumps({"command": args.command, **{k: v for k, v in summary.items() if not isinstance(v, list)}},
                     sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
