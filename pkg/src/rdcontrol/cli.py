"""Command-line experiment runner.

Subcommands mirror the experiments (barriers, simulate, report, eigen,
energy, mintime, transform-check) plus ``preset <name>``; every run is
scenario-driven and deterministic.  Exit codes: 0 ok, 2 configuration
problem, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from .errors import InvalidInput, SolverFailure
from .model import GridProfile
from .scenario import PRESETS, Scenario, load_scenario, write_csv


def _load_raw(args) -> dict:
    if getattr(args, "scenario", None):
        if not os.path.exists(args.scenario):
            raise InvalidInput(f"invalid-scenario: file not found: {args.scenario}")
        try:
            with open(args.scenario) as fh:
                return json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidInput(f"invalid-scenario: JSON parse error at line "
                               f"{exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if getattr(args, "preset", None):
        return {"preset": args.preset}
    raise InvalidInput("invalid-scenario: provide --scenario FILE or a preset name")


def _overrides(args) -> dict:
    out = {}
    if getattr(args, "grid", None):
        out["n"] = args.grid
    if getattr(args, "seed", None) is not None:
        out["seed"] = args.seed
    if getattr(args, "family", None):
        out["family"] = args.family
    if getattr(args, "sigmas", None):
        out["sigmas"] = [float(s) for s in args.sigmas.split(",")]
    if getattr(args, "experiment", None):
        out["experiment"] = args.experiment
    return out


def run(sc: Scenario) -> int:
    """Dispatch one scenario; writes artifacts into sc.out_dir."""
    os.makedirs(sc.out_dir, exist_ok=True)
    kind = sc.experiment
    if kind in ("barriers", "phase-portrait"):
        return _run_barriers(sc)
    if kind == "simulate":
        return _run_simulate(sc)
    if kind == "report":
        return _run_report(sc)
    if kind == "mintime-scan":
        return _run_mintime(sc)
    if kind == "eigen":
        return _run_eigen(sc)
    if kind == "energy":
        return _run_energy(sc)
    if kind == "transform-check":
        return _run_transform(sc)
    raise InvalidInput(f"invalid-scenario: experiment {kind!r}")


def _run_barriers(sc: Scenario) -> int:
    from .steady import find_barrier_one, find_barrier_zero
    from .svgplot import phase_portrait

    d = sc.geometry.d if sc.geometry.kind == "ball" else 1
    R = sc.geometry.inradius()
    boundaries = [int(sc.extra.get("boundary", 0))] if "boundary" in sc.extra else [0, 1]
    events = {}
    for bv in boundaries:
        finder = find_barrier_one if bv == 1 else find_barrier_zero
        barrier = finder(sc.nl, sc.drift, sc.drift.sigma, R, d, n_grid=sc.n)
        tag = f"barrier_{bv}"
        if barrier is None:
            events[tag] = {"exists": False}
            continue
        write_csv(os.path.join(sc.out_dir, f"{tag}.csv"), ["x", "p"],
                  zip(barrier.profile.x.tolist(), barrier.profile.values.tolist()), sc.raw)
        events[tag] = {"exists": True, "residual": barrier.residual,
                       "p_min": barrier.p_min, "p_max": barrier.p_max,
                       "alpha": barrier.alpha}
        if barrier.trajectory is not None:
            tr = barrier.trajectory
            write_csv(os.path.join(sc.out_dir, f"{tag}_trajectory.csv"), ["r", "p", "v"],
                      zip(tr.r.tolist(), tr.p.tolist(), tr.v.tolist()), sc.raw)
            events[tag]["events"] = {k: v for k, v in tr.events.items()}
            phase_portrait(os.path.join(sc.out_dir, f"{tag}_phase.svg"), sc.nl, tr,
                           title=f"boundary value {bv}")
    with open(os.path.join(sc.out_dir, "events.json"), "w") as fh:
        json.dump(events, fh, indent=2, sort_keys=True)
    print(json.dumps(events, sort_keys=True))
    return 0


def _run_simulate(sc: Scenario) -> int:
    from .dynamics import ControlSchedule, simulate
    from .svgplot import line_plot

    targets = sc.extra.get("targets", [0])
    verdicts = {}
    for entry in targets:
        # entries are targets a, or [a, p0] pairs for explicit starts
        if isinstance(entry, (list, tuple)):
            a, p0_val = float(entry[0]), float(entry[1])
            p0 = GridProfile(sc.geometry, np.full(sc.n, p0_val))
            tag = f"{a:g}_from_{p0_val:g}"
        else:
            a = float(entry)
            p0 = sc.initial_profile() if "p0" in sc.raw else GridProfile(
                sc.geometry, np.full(sc.n, 1.0 - a))
            tag = f"{a:g}"
        sim = simulate(p0, sc.nl, sc.drift, ControlSchedule.static(a),
                       sc.T, sc.dt, snapshot_every=max(1, int(round(sc.T / sc.dt / 40))))
        rows = []
        for t, snap in zip(sim.times, sim.snapshots):
            for x, p in zip(snap.x, snap.values):
                rows.append((float(t), float(x), float(p)))
        write_csv(os.path.join(sc.out_dir, f"simulate_to_{tag}.csv"), ["t", "x", "p"], rows, sc.raw)
        dist = np.max(np.abs(sim.final.values - a))
        final_gap = float(dist)
        tail_move = float(np.max(np.abs(sim.snapshots[-1].values
                                        - sim.snapshots[max(0, len(sim.snapshots) * 9 // 10)].values)))
        status = ("converged" if final_gap < 1e-3 else
                  "blocked" if tail_move < 1e-4 else "indeterminate")
        verdicts[tag] = {"status": status,
                         "time": float(sim.times[-1]) if status == "converged" else None,
                         "residual_sup": final_gap, "tail_move": tail_move}
        series = [(snap.x, snap.values, f"rgb({int(200*k/max(1,len(sim.snapshots)-1))},0,0)", "")
                  for k, snap in enumerate(sim.snapshots)]
        line_plot(os.path.join(sc.out_dir, f"simulate_to_{tag}.svg"), series,
                  title=f"static control u = {a}", xlabel="x", ylabel="p")
    with open(os.path.join(sc.out_dir, "verdict.json"), "w") as fh:
        json.dump(verdicts, fh, indent=2, sort_keys=True)
    print(json.dumps(verdicts, sort_keys=True))
    return 0


def _run_report(sc: Scenario) -> int:
    from .control import controllability_report

    rep = controllability_report(sc.nl, sc.drift, sc.geometry, n=sc.n, dt=sc.dt,
                                 T_max=sc.T, delta1=float(sc.extra.get("delta1", 0.05)),
                                 T1=float(sc.extra.get("T1", 20.0)))
    out = {}
    rows = []
    for key, tv in rep.items():
        out[key] = {"status": tv.status, "time": tv.time,
                    "witness": None if tv.witness is None else
                    {"residual": tv.witness.residual, "p_min": tv.witness.p_min,
                     "p_max": tv.witness.p_max}}
        rows.append((key, tv.status, tv.time if tv.time is not None else math.inf))
    write_csv(os.path.join(sc.out_dir, "report.csv"), ["target", "status", "time"], rows, sc.raw)
    with open(os.path.join(sc.out_dir, "report.json"), "w") as fh:
        json.dump(out, fh, indent=2, sort_keys=True)
    print(json.dumps(out, sort_keys=True))
    return 0


def _run_mintime(sc: Scenario) -> int:
    from .control import mintime_scan

    family = sc.extra.get("family")
    sigmas = sc.extra.get("sigmas")
    horizons = sc.extra.get("horizons", list(np.geomspace(1.0, 300.0, 24)))
    if not family or not sigmas:
        raise InvalidInput("invalid-scenario: mintime-scan needs family and sigmas")
    jobs = int(sc.extra.get("jobs", 1))
    results = mintime_scan(str(family), sigmas, sc.nl, sc.geometry, horizons,
                           n=sc.n, dt=sc.dt, jobs=jobs)
    rows = [(r.parameter, r.T_min) for r in results]
    write_csv(os.path.join(sc.out_dir, f"mintime_{family}.csv"),
              ["sigma", "T_min"], rows, sc.raw)
    print(json.dumps({"family": family,
                      "rows": [[r.parameter, r.T_min] for r in results]}))
    return 0


def _run_eigen(sc: Scenario) -> int:
    from .spectral import dirichlet_lambda1, lambda_sigma, uniqueness_certificate

    plain = dirichlet_lambda1(sc.geometry, sc.n)
    weighted = lambda_sigma(sc.geometry, sc.drift, sc.n)
    cert_kind = "zero-bc" if sc.drift.kind in ("homogeneous", "spatial-log") else "general"
    cert = uniqueness_certificate(sc.nl, sc.drift, sc.geometry, cert_kind, n=sc.n)
    write_csv(os.path.join(sc.out_dir, "eigenprofile.csv"), ["x", "u"],
              zip(plain.eigenprofile.x.tolist(), plain.eigenprofile.values.tolist()), sc.raw)
    info = {"lambda1_dirichlet": plain.lambda_, "lambda_sigma": weighted.lambda_,
            "n": sc.n, "residual": plain.residual,
            "certificate": {"which": cert.which, "holds": cert.holds,
                            "lhs": cert.lhs, "rhs": cert.rhs}}
    with open(os.path.join(sc.out_dir, "eigen.json"), "w") as fh:
        json.dump(info, fh, indent=2, sort_keys=True)
    print(json.dumps(info, sort_keys=True))
    return 0


def _run_energy(sc: Scenario) -> int:
    from .energy import energy_sigma, negative_energy_sigma_threshold, plateau_ramp_eta

    delta = float(sc.extra.get("delta", sc.geometry.inradius() / 5.0))
    sigma_star, status = negative_energy_sigma_threshold(sc.nl, sc.drift, sc.geometry, delta,
                                                         n=sc.n)
    eta = plateau_ramp_eta(delta, sc.geometry, sc.n)
    rows = []
    for sig in np.geomspace(max(sigma_star, 1e-6) / 8.0 if sigma_star else 1e-3,
                            (sigma_star if sigma_star not in (0.0, math.inf) else 1.0) * 8.0, 9):
        rep = energy_sigma(sc.nl, sc.drift, float(sig), eta, sc.geometry, _shifted=True)
        rows.append((float(sig), rep.value, rep.gradient_part, rep.potential_part))
    write_csv(os.path.join(sc.out_dir, "energy_scan.csv"),
              ["sigma", "value_scaled", "gradient_scaled", "potential_scaled"], rows, sc.raw)
    at_star = None
    if 0.0 < sigma_star < math.inf:
        rep = energy_sigma(sc.nl, sc.drift, sigma_star, eta, sc.geometry, _shifted=True)
        at_star = {"sigma": sigma_star, "value": rep.value,
                   "gradient_part": rep.gradient_part, "potential_part": rep.potential_part}
    info = {"sigma_star": sigma_star, "status": status, "delta": delta,
            "report_at_sigma_star": at_star}
    with open(os.path.join(sc.out_dir, "energy.json"), "w") as fh:
        json.dump(info, fh, indent=2, sort_keys=True)
    print(json.dumps(info, sort_keys=True))
    return 0


def _run_transform(sc: Scenario) -> int:
    from .transform import build_map, equivalence_check, tilde_f

    if sc.drift.kind != "infection":
        raise InvalidInput("invalid-scenario: transform-check needs an infection drift")
    N_of_p = sc.drift.N_of_p
    gf = build_map(N_of_p)
    x = sc.geometry.grid(sc.n)
    L = sc.geometry.inradius()
    p0 = GridProfile(sc.geometry, 0.5 * (1.0 + np.cos(np.pi * x / L)) * sc.nl.theta)
    disc = equivalence_check(sc.nl, N_of_p, sc.geometry, p0, lambda t: 0.0, sc.T, sc.dt)
    ps = np.linspace(0.0, 1.0, 101)
    rows = [(float(p), float(gf.script_N(p)), float(tilde_f(gf, sc.nl, float(gf.script_N(p)))))
            for p in ps]
    write_csv(os.path.join(sc.out_dir, "transform.csv"),
              ["p", "script_N", "tilde_f"], rows, sc.raw)
    info = {"sup_discrepancy": disc, "script_N_theta": float(gf.script_N(sc.nl.theta))}
    with open(os.path.join(sc.out_dir, "transform.json"), "w") as fh:
        json.dump(info, fh, indent=2, sort_keys=True)
    print(json.dumps(info, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rdcontrol",
                                 description="Barriers and constrained boundary control "
                                             "for bistable reaction-diffusion equations")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, with_preset=False):
        if with_preset:
            p.add_argument("preset", nargs="?", choices=sorted(PRESETS),
                           help="preset scenario name (or use --scenario)")
        p.add_argument("--scenario", help="scenario JSON file")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--grid", type=int, default=None, help="override node count")
        p.add_argument("--seed", type=int, default=None, help="random seed")
        p.add_argument("--jobs", type=int, default=1, help="parallel scan workers")

    for name, exp in (("barriers", "barriers"), ("simulate", "simulate"),
                      ("report", "report"), ("eigen", "eigen"), ("energy", "energy"),
                      ("transform-check", "transform-check")):
        p = sub.add_parser(name, help=f"run a {exp} experiment")
        common(p)
        p.set_defaults(experiment=exp)

    p = sub.add_parser("mintime", help="minimal-time scan over a drift family")
    common(p)
    p.add_argument("--family", choices=("gauss_out", "gauss_in", "abs_exp", "sin"))
    p.add_argument("--sigmas", help="comma-separated drift intensities")
    p.set_defaults(experiment="mintime-scan")

    p = sub.add_parser("preset", help="run a named preset scenario")
    common(p, with_preset=True)
    p.set_defaults(experiment=None)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        raw = _load_raw(args)
        sc = load_scenario(raw, out_dir=args.out, overrides=_overrides(args))
        if args.jobs and args.jobs > 1:
            sc.extra["jobs"] = args.jobs
        return run(sc)
    except InvalidInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SolverFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
