"""Command-line front end: figure sweeps to CSV, validation suites, queries.

Exit codes: 0 success, 1 validation failure, 2 usage error, 3 I/O error.
Sweep grids are evaluated on a thread pool sized by ANOMA_THREADS
(default: machine parallelism); rows are always written in axis order,
so output is deterministic for a fixed spec and seed.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import design, timing, validate
from .model import DomainError, FrameConfig, LinkConfig, TimingError
from .throughput import (throughput_asymptotic, throughput_closed,
                         throughput_matrix, throughput_noma, throughput_oma,
                         throughput_report)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_IO = 3


class UsageError(Exception):
    pass


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return format(float(v), ".12g")


def _worker_count() -> int:
    env = os.environ.get("ANOMA_THREADS", "")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise UsageError(f"ANOMA_THREADS must be an integer, got {env!r}")
        if n < 1:
            raise UsageError("ANOMA_THREADS must be >= 1")
        return n
    return os.cpu_count() or 1


def _pmap(fn, items: list) -> list:
    items = list(items)
    workers = min(_worker_count(), max(1, len(items)))
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def _axis(params: dict, lo_key: str, hi_key: str, step_key: str) -> np.ndarray:
    """Inclusive grid over [lo, hi] with the given step.

    When both endpoints are whole multiples of the step the grid is
    built as step * k, so symmetric ranges hit 0.0 exactly; otherwise it
    is anchored at lo.  Either way each point is a single product, never
    an accumulated sum.
    """
    lo, hi, step = params[lo_key], params[hi_key], params[step_key]
    if step <= 0:
        raise UsageError(f"{step_key} must be > 0")
    if hi < lo:
        raise UsageError(f"{hi_key} must be >= {lo_key}")
    q0, q1 = lo / step, hi / step
    if abs(q0 - round(q0)) < 1e-9 and abs(q1 - round(q1)) < 1e-9:
        return step * np.arange(round(q0), round(q1) + 1)
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(count)


# ---------------------------------------------------------------------------
# figure sweeps


def _fig_rate_vs_gain(p: dict):
    h1_grid = _axis(p, "h1_sq_min", "h1_sq_max", "h1_sq_step")
    h2_list = list(p["h2_sq_values"])
    if not h2_list:
        raise UsageError("h2_sq_values must be non-empty")
    frame = FrameConfig(int(p["n"]), p["tau"])
    header = ["h1_sq"]
    for h2 in h2_list:
        tag = _fmt(h2)
        header += [f"anoma_matrix_h2sq{tag}", f"anoma_closed_h2sq{tag}",
                   f"noma_h2sq{tag}"]

    def row(h1_sq: float):
        out = [h1_sq]
        for h2_sq in h2_list:
            link = LinkConfig(p1=p["p1"], p2=p["p2"],
                              h1=math.sqrt(h1_sq), h2=math.sqrt(h2_sq))
            out += [throughput_matrix(link, frame),
                    throughput_closed(link, frame),
                    throughput_noma(link.mu1, link.mu2)]
        return out

    return header, _pmap(row, [float(v) for v in h1_grid])


def _fig_rate_vs_n(p: dict):
    taus = list(p["tau_values"])
    if not taus:
        raise UsageError("tau_values must be non-empty")
    if int(p["n_points"]) < 1 or int(p["n_min"]) < 1 or p["n_max"] < p["n_min"]:
        raise UsageError("n_min/n_max/n_points must define a non-empty range")
    ns = np.unique(np.round(np.logspace(math.log10(p["n_min"]),
                                        math.log10(p["n_max"]),
                                        int(p["n_points"]))).astype(int))
    link = LinkConfig.from_gains(p["mu1"], p["mu2"])
    header = (["N"] + [f"anoma_tau{_fmt(t)}" for t in taus] + ["noma"]
              + [f"asymptote_{_fmt(t)}" for t in taus])

    def row(n: int):
        out = [int(n)]
        out += [throughput_matrix(link, FrameConfig(int(n), t)) for t in taus]
        out.append(throughput_noma(link.mu1, link.mu2))
        out += [throughput_asymptotic(link.mu1, link.mu2, t) for t in taus]
        return out

    return header, _pmap(row, [int(v) for v in ns])


def _fig_power_surface(p: dict):
    pg = _axis(p, "p_min", "p_max", "p_step")
    frame = FrameConfig(int(p["n"]), p["tau"])
    h1, h2 = math.sqrt(p["h1_sq"]), math.sqrt(p["h2_sq"])
    header = ["p1", "p2", "throughput"]

    def row(pair):
        p1, p2 = pair
        link = LinkConfig(p1=p1, p2=p2, h1=h1, h2=h2)
        return [p1, p2, throughput_closed(link, frame)]

    pairs = [(float(a), float(b)) for a in pg for b in pg]
    return header, _pmap(row, pairs)


def _fig_tau_star_vs_n(p: dict):
    gains = [tuple(g) for g in p["gains"]]
    if not gains:
        raise UsageError("gains must be non-empty")
    n_values = [int(n) for n in p["n_values"]]
    if not n_values:
        raise UsageError("n_values must be non-empty")
    res = p["grid_resolution"]
    header = ["N"] + [f"tau_star_mu{_fmt(a)}_{_fmt(b)}" for a, b in gains]

    def row(n: int):
        out = [n]
        for mu1, mu2 in gains:
            r = design.optimal_tau(LinkConfig.from_gains(mu1, mu2), n,
                                   grid_resolution=res)
            out.append(r.tau_star)
        return out

    return header, _pmap(row, n_values)


def _fig_loss_heatmap(p: dict):
    eps = _axis(p, "eps_min", "eps_max", "eps_step")
    link = LinkConfig.from_gains(p["mu1"], p["mu2"])
    frame = FrameConfig(int(p["n"]), p["tau"])
    header = ["eps1", "eps2", "gamma"]

    def row(pair):
        e1, e2 = pair
        g = timing.loss_ratio(link, frame, TimingError(e1, e2))
        return [e1, e2, g]

    pairs = [(float(a), float(b)) for a in eps for b in eps]
    return header, _pmap(row, pairs)


def _fig_loss_slices(p: dict):
    eps = _axis(p, "eps_min", "eps_max", "eps_step")
    link = LinkConfig.from_gains(p["mu1"], p["mu2"])
    frame = FrameConfig(int(p["n"]), p["tau"])
    base = throughput_matrix(link, frame)
    slopes = {b: (timing.sync_loss_slope(link, frame, branch=b),
                  timing.coord_loss_slope(link, frame, branch=b))
              for b in (1, -1)}
    header = ["eps", "gamma_sync_exact", "gamma_sync_linear",
              "gamma_coord_exact", "gamma_coord_linear"]

    def row(e: float):
        c1, c2 = slopes[1 if e >= 0 else -1]
        gs = timing.loss_ratio(link, frame, TimingError(e, 0.0))
        gc = timing.loss_ratio(link, frame, TimingError(0.0, e))
        return [e, gs, e * c1 / base, gc, e * c2 / base]

    return header, _pmap(row, [float(v) for v in eps])


def _fig_scheme_comparison(p: dict):
    eps = _axis(p, "eps_min", "eps_max", "eps_step")
    link = LinkConfig.from_gains(p["mu1"], p["mu2"])
    frame = FrameConfig(int(p["n"]), p["tau"])
    noma = throughput_noma(link.mu1, link.mu2)
    oma = throughput_oma(link.mu1, link.mu2)
    header = ["eps", "anoma_sync_error", "anoma_coord_error", "noma", "oma"]

    def row(e: float):
        sync = timing.throughput_with_error(link, frame, TimingError(e, 0.0))
        coord = timing.throughput_with_error(link, frame, TimingError(0.0, e))
        return [e, sync, coord, noma, oma]

    return header, _pmap(row, [float(v) for v in eps])


FIGURES = {
    "rate_vs_gain": (_fig_rate_vs_gain, {
        "p1": 1.0, "p2": 1.0, "tau": 0.5, "n": 10,
        "h1_sq_min": 0.1, "h1_sq_max": 2.0, "h1_sq_step": 0.1,
        "h2_sq_values": [0.5, 1.0], "seed": 0,
    }),
    "rate_vs_n": (_fig_rate_vs_n, {
        "mu1": 1.0, "mu2": 0.5, "tau_values": [0.5, 0.1],
        "n_min": 1, "n_max": 200, "n_points": 25, "seed": 0,
    }),
    "power_surface": (_fig_power_surface, {
        "h1_sq": 1.0, "h2_sq": 0.5, "p_min": 0.1, "p_max": 1.0,
        "p_step": 0.1, "tau": 0.5, "n": 10, "seed": 0,
    }),
    "tau_star_vs_n": (_fig_tau_star_vs_n, {
        "gains": [[1.0, 0.5], [1.0, 1.0], [2.0, 1.0]],
        "n_values": [1, 2, 5, 10, 20, 50, 100, 200, 500, 1000],
        "grid_resolution": 1e-3, "seed": 0,
    }),
    "loss_heatmap": (_fig_loss_heatmap, {
        "mu1": 1.0, "mu2": 0.5, "tau": 0.5, "n": 10,
        "eps_min": -0.1, "eps_max": 0.1, "eps_step": 0.005, "seed": 0,
    }),
    "loss_slices": (_fig_loss_slices, {
        "mu1": 1.0, "mu2": 0.5, "tau": 0.5, "n": 10,
        "eps_min": -0.1, "eps_max": 0.1, "eps_step": 0.005, "seed": 0,
    }),
    "scheme_comparison": (_fig_scheme_comparison, {
        "mu1": 1.0, "mu2": 0.5, "tau": 0.5, "n": 10,
        "eps_min": -0.4, "eps_max": 0.4, "eps_step": 0.05, "seed": 0,
    }),
}

QUERY_DEFAULTS = {"mu1": 1.0, "mu2": 0.5, "tau": 0.5, "n": 10,
                  "eps1": 0.0, "eps2": 0.0}


def _parse_set(entries: list[str]) -> dict:
    out = {}
    for item in entries:
        if "=" not in item:
            raise UsageError(f"--set expects key=value, got {item!r}")
        key, raw = item.split("=", 1)
        try:
            out[key] = json.loads(raw)
        except json.JSONDecodeError:
            out[key] = raw
    return out


def _merge_params(defaults: dict, config_path: str | None,
                  overrides: dict) -> dict:
    params = dict(defaults)
    if config_path:
        try:
            with open(config_path, "r", encoding="utf-8") as f:
                file_params = json.load(f)
        except OSError as exc:
            raise OSError(f"cannot read config {config_path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise UsageError(f"config {config_path} is not valid JSON: {exc}")
        if not isinstance(file_params, dict):
            raise UsageError("config file must hold a JSON object")
        for key, val in file_params.items():
            if key not in params:
                raise UsageError(f"unknown config field {key!r}")
            params[key] = val
    for key, val in overrides.items():
        if key not in params:
            raise UsageError(f"unknown field {key!r}")
        params[key] = val
    return params


def _write_csv(path: str, header: list[str], rows: list[list]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(_fmt(v) for v in row) + "\n")


def _cmd_sweep(args) -> int:
    if args.figure_id not in FIGURES:
        raise UsageError(f"unknown figure_id {args.figure_id!r}; "
                         f"choose from {', '.join(sorted(FIGURES))}")
    fn, defaults = FIGURES[args.figure_id]
    params = _merge_params(defaults, args.config, _parse_set(args.set))
    header, rows = fn(params)
    out = args.out or f"{args.figure_id}.csv"
    _write_csv(out, header, rows)
    print(f"wrote {out}: {len(rows)} rows")
    return EXIT_OK


def _cmd_validate(args) -> int:
    if args.suite not in validate.SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; "
                         f"choose from {', '.join(sorted(validate.SUITES))}")
    results = validate.run_suite(args.suite)
    for r in results:
        print(r.line())
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_VALIDATION if failed else EXIT_OK


def _cmd_query(args) -> int:
    params = _merge_params(QUERY_DEFAULTS, None, _parse_set(args.set))
    link = LinkConfig.from_gains(params["mu1"], params["mu2"])
    frame = FrameConfig(int(params["n"]), params["tau"])
    err = TimingError(params["eps1"], params["eps2"])
    fields = dataclasses.asdict(throughput_report(link, frame))
    if frame.tau > 0.0:
        fields.update(dataclasses.asdict(timing.loss_breakdown(link, frame, err)))
    else:
        # sensitivity slopes need tau in (0, 1); the loss itself is still defined
        r_e = timing.throughput_with_error(link, frame, err)
        base = fields["anoma_matrix"]
        fields.update({"exact_throughput_with_error": r_e,
                       "delta": base - r_e,
                       "delta_lin_sync": math.nan, "delta_lin_coord": math.nan,
                       "c1": math.nan, "c2": math.nan,
                       "gamma": (base - r_e) / base})
    point = " ".join(f"{k}={_fmt(v)}" for k, v in params.items())
    values = " ".join(f"{k}={_fmt(v)}" for k, v in fields.items())
    print(f"{point} {values}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="anoma",
        description="Two-user asynchronous uplink throughput toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="write one figure's data as CSV")
    p_sweep.add_argument("figure_id")
    p_sweep.add_argument("--config", help="JSON file with sweep parameters")
    p_sweep.add_argument("--set", action="append", default=[],
                         metavar="KEY=VALUE", help="override one parameter")
    p_sweep.add_argument("--out", help="output CSV path (default <figure>.csv)")
    p_sweep.set_defaults(fn=_cmd_sweep)

    p_val = sub.add_parser("validate", help="run a validation suite")
    p_val.add_argument("suite")
    p_val.set_defaults(fn=_cmd_validate)

    p_query = sub.add_parser("query", help="report all figures for one point")
    p_query.add_argument("--set", action="append", default=[],
                         metavar="KEY=VALUE", help="set a point parameter")
    p_query.set_defaults(fn=_cmd_query)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (UsageError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
