"""Command-line front end.

Exit codes: 0 success/certified, 1 well-formed but not certified, 2 input
error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import certificate as cert
from . import coupling as cpl
from . import simulate as sim
from ._accel import backend
from .config import Scenario, SimConfig, load_scenario
from .errors import (ConfigParseError, DegenerateWindow, EigensolverFailure, NonFiniteState,
                     ValidationError)
from .topology import Topology

EXIT_OK, EXIT_UNCERTIFIED, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


def fmt(v):
    """17 significant digits for floats, plain text otherwise."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj) if math.isfinite(obj) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def emit(report, as_json, out=None):
    out = sys.stdout if out is None else out
    if as_json:
        json.dump(_jsonable(report), out, indent=2, sort_keys=True)
        out.write("\n")
        return
    for key, val in report.items():
        if isinstance(val, dict):
            out.write(f"{key}:\n")
            for k, v in val.items():
                out.write(f"  {k}: {fmt(v)}\n")
        else:
            out.write(f"{key}: {fmt(val)}\n")


def error_svg(es: sim.ErrorSeries, path, width=640, height=360):
    """Minimal log10 plot of the error envelope."""
    env = np.maximum(es.envelope, 1e-300)
    y = np.log10(env)
    t = es.times
    x0, x1 = float(t[0]), float(t[-1]) if t[-1] > t[0] else float(t[0]) + 1.0
    y0, y1 = float(y.min()), float(y.max()) if y.max() > y.min() else float(y.min()) + 1.0
    pad = 40
    px = pad + (t - x0) / (x1 - x0) * (width - 2 * pad)
    py = height - pad - (y - y0) / (y1 - y0) * (height - 2 * pad)
    pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py))
    Path(path).write_text(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">\n'
        f'<rect width="100%" height="100%" fill="white"/>\n'
        f'<polyline fill="none" stroke="black" stroke-width="1" points="{pts}"/>\n'
        f'<text x="{pad}" y="{pad - 10}" font-size="12">log10 max error norm; t in [{x0:g}, {x1:g}], '
        f'log10 in [{y0:.2f}, {y1:.2f}]</text>\n</svg>\n'
    )


def _warn_asymmetric(sc: Scenario):
    if not sc.topology.is_symmetric:
        print("warning: adjacency is not symmetric; treating the graph as directed", file=sys.stderr)


def _certificate(sc: Scenario):
    margin = sc.tolerances["margin"]
    c = sc.coupling
    if sc.pivot is None:
        return cert.best_pivot(sc.params, sc.topology, c.k1, c.k2, margin)
    return cert.certify(sc.params, sc.topology, c.k1, c.k2, sc.pivot, margin)


def _header(sc: Scenario):
    return {
        "scenario": sc.name,
        "nodes": sc.topology.n,
        "edges": int(sc.topology.adjacency.sum()),
        "coupling": sc.coupling.name,
        "k1": sc.coupling.k1,
        "k2": sc.coupling.k2,
    }


def cmd_check(sc: Scenario, args):
    if sc.topology.n < 2:
        raise ValidationError("certificate needs at least 2 nodes")
    c = _certificate(sc)
    report = _header(sc)
    report["certificate"] = c.summary()
    report["verdict"] = "synchronization certified" if c.hurwitz else "not certified"
    emit(report, args.json)
    return EXIT_OK if c.hurwitz else EXIT_UNCERTIFIED


def _sim_config(sc: Scenario, args) -> SimConfig:
    if sc.sim is None:
        raise ValidationError("config has no 'sim' section")
    cfg = replace(sc.sim)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.dt is not None:
        cfg.dt = args.dt
    if args.t_end is not None:
        cfg.t_end = args.t_end
    return cfg


def cmd_simulate(sc: Scenario, args):
    cfg = _sim_config(sc, args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    pivot = sc.pivot or 0
    x0 = sim.initial_states(sc.topology.n, cfg.seed, cfg.spread, cfg.identical)
    traj = sim.simulate_network(sc.params, sc.topology, sc.coupling, x0, cfg.dt, cfg.t_end, cfg.stride)
    es = sim.error_series(traj, pivot)

    n = sc.topology.n
    write_csv(out / "trajectory.csv", ["t", "node", "x1", "x2", "x3"],
              ((traj.times[k], i, *traj.states[k, i]) for k in range(traj.times.size) for i in range(n)))
    write_csv(out / "errors.csv", ["t", "node", "norm"],
              ((es.times[k], int(j), es.norms[k, r]) for k in range(es.times.size) for r, j in enumerate(es.nodes)))
    manifest = [str(out / "trajectory.csv"), str(out / "errors.csv")]
    if args.svg:
        error_svg(es, out / "errors.svg")
        manifest.append(str(out / "errors.svg"))

    report = _header(sc)
    report["simulation"] = {
        "dt": cfg.dt, "t_end": cfg.t_end, "seed": cfg.seed, "stride": cfg.stride, "pivot": pivot,
        "initial_max_norm": float(es.envelope[0]),
        "final_max_norm": float(es.envelope[-1]),
        "backend": backend(),
    }
    try:
        window = sim.auto_window(es)
        report["simulation"]["fit_window"] = list(window)
        report["simulation"]["fitted_decay_rate"] = sim.fit_decay_rate(es, window)
    except DegenerateWindow as exc:
        report["simulation"]["fitted_decay_rate"] = None
        report["simulation"]["fit_note"] = str(exc)
    if n >= 2:
        report["certificate"] = cert.certify(sc.params, sc.topology, sc.coupling.k1, sc.coupling.k2,
                                             pivot, sc.tolerances["margin"]).summary()
    manifest.append(str(out / "report.json"))
    report["files"] = manifest
    (out / "report.json").write_text(json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n")
    emit(report, args.json)
    return EXIT_OK


def cmd_threshold(sc: Scenario, args):
    t = sc.topology
    if t.n < 2:
        raise ValidationError("threshold undefined for fewer than 2 nodes")
    th = sc.threshold
    report = _header(sc)
    found = False
    if t.n == 2 and t.adjacency[0, 1] and t.adjacency[1, 0]:
        k = cert.two_node_threshold(sc.params)
        report["two_node_threshold"] = max(k, 0.0)
        report["two_node_threshold_text"] = f"k > {max(k, 0.0):.3f}"
        found = True
    scan = th.get("scan")
    if scan is None:
        scan = t.n > 2
    if scan:
        pivot = sc.pivot or 0
        res = cert.min_linear_gain(sc.params, t, pivot, float(th["k_max"]), float(th["resolution"]),
                                   sc.tolerances["margin"])
        if res is None:
            report["scanned_min_gain"] = None
            report["scan_note"] = f"no linear gain up to {th['k_max']} certifies"
        else:
            found = True
            report["scanned_min_gain"] = res.gain
            report["scan_verified"] = res.verified
            report["scan_monotone"] = res.monotone
            if not res.monotone:
                print("warning: non-monotone certificate verdicts observed in gain scan", file=sys.stderr)
    emit(report, args.json)
    return EXIT_OK if found else EXIT_UNCERTIFIED


def cmd_verify_coupling(sc: Scenario, args):
    v, tol = sc.verify, sc.tolerances
    rep = cpl.verify_sector(sc.coupling, float(v["range"]), int(v["samples"]), tol["sector"])
    bound = cpl.check_pair_bound(sc.coupling, int(v["pairs"]), float(v["range"]))
    ok = rep.verified and bound <= tol["pair_bound"]
    report = _header(sc)
    report["sector"] = {"verified": rep.verified, "worst_violation": rep.worst_violation,
                        "samples_tested": rep.samples_tested, "violating_input": rep.violating_input}
    report["pair_bound"] = {"max_residual": bound, "tolerance": tol["pair_bound"], "passed": bound <= tol["pair_bound"]}
    report["verdict"] = "pass" if ok else "fail"
    emit(report, args.json)
    return EXIT_OK if ok else EXIT_UNCERTIFIED


def scan_values(scan):
    if "values" in scan:
        return list(scan["values"])
    start, stop, step = float(scan["start"]), float(scan["stop"]), float(scan["step"])
    if step <= 0:
        raise ValidationError("scan step must be positive")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(max(count, 0))]


def _scan_point(sc: Scenario, parameter, value):
    """Return ``(params, topology, coupling, pivot)`` for one scan sample."""
    params, topo, coupling, pivot = sc.params, sc.topology, sc.coupling, sc.pivot or 0
    if parameter == "pivot":
        pivot = int(value)
    elif parameter == "density":
        topo = Topology.random(topo.n, float(value), int(sc.scan.get("seed", 0)))
    elif parameter in ("alpha", "beta", "gamma", "a", "b"):
        params = replace(params, **{parameter: float(value)})
    elif parameter in coupling.parameters:
        spec = dict(sc.coupling_spec)
        spec[parameter] = float(value)
        coupling = cpl.from_spec(spec)
    else:
        raise ValidationError(f"cannot scan unknown parameter {parameter!r}")
    return params, topo, coupling, pivot


def cmd_scan(sc: Scenario, args):
    if sc.scan is None:
        raise ValidationError("config has no 'scan' section")
    parameter = sc.scan["parameter"]
    rows = []
    for value in scan_values(sc.scan):
        params, topo, coupling, pivot = _scan_point(sc, parameter, value)
        c = cert.certify(params, topo, coupling.k1, coupling.k2, pivot, sc.tolerances["margin"])
        rows.append((value, pivot, coupling.k1, coupling.k2, c.spectral_abscissa, c.hurwitz))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "scan.csv", [parameter, "pivot", "k1", "k2", "spectral_abscissa", "hurwitz"], rows)
    report = _header(sc)
    report["scan"] = {"parameter": parameter, "samples": len(rows),
                      "certified": sum(1 for r in rows if r[-1])}
    report["files"] = [str(out / "scan.csv")]
    emit(report, args.json)
    return EXIT_OK


COMMANDS = {
    "check": cmd_check,
    "simulate": cmd_simulate,
    "threshold": cmd_threshold,
    "verify-coupling": cmd_verify_coupling,
    "scan": cmd_scan,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="chuasync", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "check": "build the comparison matrix and test it for Hurwitz stability",
        "simulate": "integrate the network and write trajectory/error CSV files",
        "threshold": "two-node closed-form gain threshold and/or scanned minimal linear gain",
        "verify-coupling": "audit the coupling's sector claim and the two-argument residual bound",
        "scan": "sweep one parameter and tabulate the certificate",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", required=True,
                       help="scenario JSON file, or the name of a bundled scenario (example1, example2)")
        p.add_argument("--out", default="out", help="output directory (simulate, scan)")
        p.add_argument("--json", action="store_true", help="machine-readable report on stdout")
        p.add_argument("--seed", type=int, help="override sim.seed")
        p.add_argument("--dt", type=float, help="override sim.dt")
        p.add_argument("--t-end", dest="t_end", type=float, help="override sim.t_end")
        if name == "simulate":
            p.add_argument("--svg", action="store_true", help="also write errors.svg")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        sc = load_scenario(args.config)
        _warn_asymmetric(sc)
        return COMMANDS[args.command](sc, args)
    except (ConfigParseError, ValidationError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NonFiniteState, EigensolverFailure) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
