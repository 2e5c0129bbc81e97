"""Command-line front end.

Subcommands: gamma-star, pcg-sweep, prcg-sweep, prcg-admit, best-response,
validate. Scenario-driven commands read a JSON document (see scenario.py)
and emit CSV with units encoded in the header names (_w Watts, _bps bit/s,
_s seconds, _db decibels, _frac and _ratio dimensionless, _count integers).

Exit codes: 0 success, 2 malformed config or domain error, 3 infeasible
scenario under --strict, 4 validation failure.

Sweep points are evaluated concurrently; QOSGAME_THREADS bounds the worker
count. Output row order is the deterministic axis order regardless of
completion order, and identical scenario + seed gives byte-identical CSV.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import IO, Optional

from . import selfcheck
from .delay import AverageDelaySpec, OutageDelaySpec
from .dynamics import run_best_response, write_trajectory_csv
from .efficiency import EfficiencyModel, gamma_star, psr
from .errors import ConfigError, QosGameError
from .powergame import ClassSpec, RadioEnv, pcg_sir_targets, utility_loss_sweep
from .rategame import (
    PrcgUser,
    SystemParams,
    network_capacity,
    omega_star,
    phi_star,
    prcg_equilibrium,
    total_goodput,
    user_size,
)
from .scenario import Scenario, load_scenario

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_VALIDATION = 4


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


def _max_workers() -> int:
    raw = os.environ.get("QOSGAME_THREADS", "")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ConfigError("QOSGAME_THREADS", f"expected an integer, got {raw!r}")
    return min(8, os.cpu_count() or 1)


def _fmt(x: Optional[float]) -> str:
    return "" if x is None else f"{x:.12g}"


def _open_out(args, scenario: Optional[Scenario] = None):
    path = args.out or (scenario.out if scenario is not None else None)
    if path:
        return open(path, "w", encoding="utf-8", newline=""), True
    return sys.stdout, False


def _write_rows(stream: IO[str], header: list[str], rows: list[list[str]]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)


def _load(args) -> Scenario:
    if not args.config:
        raise ConfigError("--config", "missing (required for this command)")
    return load_scenario(args.config)


def _model(scenario: Scenario) -> EfficiencyModel:
    return EfficiencyModel(packet_bits=scenario.system.packet_bits)


def _cmd_gamma_star(args) -> int:
    model = EfficiencyModel(packet_bits=args.packet_bits)
    g = gamma_star(model)
    print(f"gamma_star_lin={g:.12g}")
    print(f"gamma_star_db={linear_to_db(g):.12g}")
    print(f"f_star={psr(model, g):.12g}")
    return EXIT_OK


def _cmd_pcg_sweep(args) -> int:
    scenario = _load(args)
    if scenario.pcg_classes is None:
        raise ConfigError("pcg_classes", "pcg-sweep needs a power-game scenario")
    if len(scenario.pcg_classes) != 2:
        raise ConfigError(
            "pcg_classes", f"pcg-sweep needs exactly 2 classes, got {len(scenario.pcg_classes)}"
        )
    if scenario.sweep is None or scenario.sweep.variable != "split_a":
        raise ConfigError("sweep.variable", "pcg-sweep needs a 'split_a' sweep axis")

    model = _model(scenario)
    cls_a, cls_b = scenario.pcg_classes
    spec_a = OutageDelaySpec(cls_a.max_transmissions, cls_a.confidence)
    spec_b = OutageDelaySpec(cls_b.max_transmissions, cls_b.confidence)
    total_load = cls_a.load + cls_b.load
    splits = scenario.sweep.values()
    for s in splits:
        if not 0.0 <= s <= 1.0:
            raise ConfigError("sweep", f"split_a values must lie in [0, 1], got {s:g}")

    with ThreadPoolExecutor(max_workers=_max_workers()) as pool:
        per_receiver = list(
            pool.map(
                lambda rec: utility_loss_sweep(rec, total_load, splits, spec_a, spec_b, model),
                scenario.receivers,
            )
        )

    rows = []
    any_infeasible = False
    for i, split in enumerate(splits):
        for receiver, points in zip(scenario.receivers, per_receiver):
            p = points[i]
            any_infeasible |= not p.feasible
            rows.append(
                [
                    _fmt(split),
                    receiver.value,
                    _fmt(p.utility_ratio_a),
                    _fmt(p.utility_ratio_b),
                    "true" if p.feasible else "false",
                ]
            )

    stream, close = _open_out(args, scenario)
    try:
        _write_rows(stream, ["split_a_frac", "receiver", "u_a_ratio", "u_b_ratio", "feasible"], rows)
    finally:
        if close:
            stream.close()
    if args.strict and any_infeasible:
        print("strict mode: infeasible sweep points present", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


def _sweep_arrival_rates(scenario: Scenario) -> list[float]:
    values = scenario.sweep.values()
    if scenario.sweep.variable == "source_rate_bps":
        m = scenario.system.packet_bits
        return [v / m for v in values]
    return values


def _cmd_prcg_sweep(args) -> int:
    scenario = _load(args)
    if scenario.prcg_users is None:
        raise ConfigError("prcg_users", "prcg-sweep needs a rate-game scenario")
    if scenario.system.bandwidth is None:
        raise ConfigError("system.bandwidth_hz", "missing (required for rate-game commands)")
    if scenario.sweep is None or scenario.sweep.variable not in (
        "source_rate_bps",
        "arrival_rate_pps",
    ):
        raise ConfigError(
            "sweep.variable", "prcg-sweep needs a 'source_rate_bps' or 'arrival_rate_pps' axis"
        )

    model = _model(scenario)
    params = SystemParams(
        bandwidth=scenario.system.bandwidth,
        noise_power=scenario.system.noise_power,
        model=model,
    )
    m = scenario.system.packet_bits
    g_star = gamma_star(model)
    f_star = psr(model, g_star)
    lambdas = _sweep_arrival_rates(scenario)
    delay_bounds = [u.delay_bound for u in scenario.prcg_users]
    points = [(lam, d) for lam in lambdas for d in delay_bounds]

    def eval_point(point):
        lam, d = point
        user = PrcgUser(qos=AverageDelaySpec(arrival_rate=lam, delay_bound=d))
        omega = omega_star(user, model)
        size = phi_star(omega, params.bandwidth, g_star)
        cap = network_capacity(user, params)
        return [
            _fmt(lam * m),
            _fmt(d),
            _fmt(omega),
            _fmt(size),
            str(cap),
            _fmt(total_goodput(cap, omega, f_star)),
        ]

    with ThreadPoolExecutor(max_workers=_max_workers()) as pool:
        rows = list(pool.map(eval_point, points))

    stream, close = _open_out(args, scenario)
    try:
        _write_rows(
            stream,
            [
                "source_rate_bps",
                "delay_bound_s",
                "omega_star_bps",
                "phi_star_frac",
                "capacity_count",
                "total_goodput_bps",
            ],
            rows,
        )
    finally:
        if close:
            stream.close()
    return EXIT_OK


def _cmd_prcg_admit(args) -> int:
    scenario = _load(args)
    if scenario.prcg_users is None:
        raise ConfigError("prcg_users", "prcg-admit needs a rate-game scenario")
    if scenario.system.bandwidth is None:
        raise ConfigError("system.bandwidth_hz", "missing (required for rate-game commands)")

    model = _model(scenario)
    params = SystemParams(
        bandwidth=scenario.system.bandwidth,
        noise_power=scenario.system.noise_power,
        model=model,
    )
    users = [
        PrcgUser(
            qos=AverageDelaySpec(arrival_rate=u.arrival_rate, delay_bound=u.delay_bound),
            gain=u.gain,
            max_power=u.max_power if u.max_power is not None else scenario.system.max_power,
        )
        for u in scenario.prcg_users
    ]

    sizes = [user_size(u, params) for u in users]
    total = sum(sizes)
    admissible = total < 1.0
    eq = prcg_equilibrium(users, params) if admissible else None

    rows = []
    for i, u in enumerate(users):
        if eq is not None:
            extra = [
                _fmt(eq.rates[i]),
                _fmt(eq.powers[i]),
                _fmt(eq.utilities[i]),
                "true" if eq.power_capped[i] else "false",
            ]
        else:
            extra = [_fmt(omega_star(u, model)), "", "", ""]
        rows.append(
            [
                str(i),
                _fmt(u.qos.arrival_rate),
                _fmt(u.qos.delay_bound),
                extra[0],
                _fmt(sizes[i]),
                extra[1],
                extra[2],
                extra[3],
            ]
        )

    stream, close = _open_out(args, scenario)
    try:
        _write_rows(
            stream,
            [
                "user",
                "arrival_rate_pps",
                "delay_bound_s",
                "omega_star_bps",
                "phi_star_frac",
                "power_w",
                "utility_bits_per_joule",
                "power_capped",
            ],
            rows,
        )
    finally:
        if close:
            stream.close()

    summary = {
        "admissible": admissible,
        "total_size": total,
        "n_users": len(users),
        "sir_target_lin": gamma_star(model),
    }
    print(json.dumps(summary, sort_keys=True))
    if args.strict and not admissible:
        return EXIT_INFEASIBLE
    return EXIT_OK


def _cmd_best_response(args) -> int:
    scenario = _load(args)
    if scenario.pcg_classes is None:
        raise ConfigError("pcg_classes", "best-response needs a power-game scenario")
    if scenario.system.processing_gain is None:
        raise ConfigError("system.processing_gain", "missing (required for best-response)")

    model = _model(scenario)
    n = scenario.system.processing_gain
    targets = []
    gains = []
    specs = [
        ClassSpec(
            load=c.load,
            requirement=OutageDelaySpec(c.max_transmissions, c.confidence),
            rate=scenario.system.rate,
            name=c.name,
        )
        for c in scenario.pcg_classes
    ]
    class_targets = pcg_sir_targets(specs, model)
    for cfg, target in zip(scenario.pcg_classes, class_targets):
        count = cfg.count if cfg.count is not None else round(cfg.load * n)
        if count < 1:
            raise ConfigError(
                "pcg_classes", f"class {cfg.name or '?'} maps to zero finite-K users"
            )
        targets.extend([target.sir_target] * count)
        gains.extend([cfg.gain] * count)

    env = RadioEnv(
        noise_power=scenario.system.noise_power,
        gains=gains,
        processing_gain=n,
        max_power=scenario.system.max_power,
        packet_bits=scenario.system.packet_bits,
    )
    run = run_best_response(
        env,
        targets,
        tol=args.tol,
        max_iter=args.max_iter,
        initial=args.initial,
        model=model,
        rate=scenario.system.rate,
    )

    if args.out or scenario.out:
        stream, close = _open_out(args, scenario)
        try:
            write_trajectory_csv(run, stream)
        finally:
            if close:
                stream.close()

    summary = {
        "converged": run.converged,
        "iterations": run.iterations,
        "feasible": run.outcome.feasible,
        "reason": run.outcome.reason,
        "n_users": len(targets),
        "max_power_w": env.max_power if math.isfinite(env.max_power) else None,
        "final_power_w": [round(p, 12) for p in run.outcome.powers.tolist()],
    }
    print(json.dumps(summary, sort_keys=True))
    if args.strict and not run.outcome.feasible:
        return EXIT_INFEASIBLE
    return EXIT_OK


def _cmd_validate(args) -> int:
    results = selfcheck.run_checks(seed=args.seed, scale=args.scale)
    report = selfcheck.format_report(results, args.seed, args.scale)
    sys.stdout.write(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(report)
    return EXIT_OK if all(r.passed for r in results) else EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qosgame",
        description="Delay-constrained power/rate control games: equilibria, "
        "admission, capacity, goodput, and validation oracles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gamma-star", help="efficiency-optimal SIR for a packet size")
    p.add_argument("--packet-bits", type=int, required=True, metavar="M")
    p.set_defaults(func=_cmd_gamma_star)

    for name, func, needs_strict in (
        ("pcg-sweep", _cmd_pcg_sweep, True),
        ("prcg-sweep", _cmd_prcg_sweep, True),
        ("prcg-admit", _cmd_prcg_admit, True),
    ):
        p = sub.add_parser(name, help=f"run {name} over a scenario config")
        p.add_argument("--config", required=True, metavar="PATH")
        p.add_argument("--out", metavar="PATH", default=None)
        p.add_argument("--seed", type=int, default=None)
        if needs_strict:
            p.add_argument("--strict", action="store_true")
        p.set_defaults(func=func)

    p = sub.add_parser("best-response", help="iterate power best responses to the equilibrium")
    p.add_argument("--config", required=True, metavar="PATH")
    p.add_argument("--out", metavar="PATH", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--strict", action="store_true")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int, default=1000)
    p.add_argument("--initial", choices=["zero", "pmax"], default="zero")
    p.set_defaults(func=_cmd_best_response)

    p = sub.add_parser("validate", help="run the Monte Carlo / best-response oracle suite")
    p.add_argument("--seed", type=int, default=selfcheck.DEFAULT_SEED)
    p.add_argument("--scale", choices=["small", "full"], default="small")
    p.add_argument("--out", metavar="PATH", default=None)
    p.set_defaults(func=_cmd_validate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (QosGameError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
