"""Command-line front end: scenario configuration, simulation runs, condition
checks, equilibrium enumeration, contour grids, network generation, and
Monte-Carlo basin sweeps.

Configuration is an INI file with sections [network], [params], [initial],
[schedule], [stop], [output]; every value can also come from a bundled
scenario preset (example3, example4, example5) and the master ``--seed``
overrides all component seeds.  Exit codes for ``check``: 0 holds, 2 fails,
3 not applicable; other commands exit 0 on success and 1 on invalid input.
"""
from __future__ import annotations

import argparse
import configparser
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import analysis, dynamics, genesis, netcore, oracle

N_MAX_ENUMERATION = oracle.DEFAULT_N_MAX
_Z95 = 1.959963984540054


class ConfigError(ValueError):
    pass


# --- scenario assembly ---------------------------------------------------------


@dataclass
class Scenario:
    net: netcore.TwoLayerNetwork
    params: netcore.AgentParams
    z0: netcore.PopulationState
    schedule: dynamics.ActivationSchedule
    stop: dynamics.StopCriterion
    partition: tuple | None
    initial_kind: str
    initial_seed: int
    outdir: str | None


_PRESETS = {
    # Bundled demonstration scenarios; networks are generated, so the target
    # is the limit classification, not a specific trajectory.
    "example3": {
        "network": {"source": "generate", "kind": "condition_rescaled", "theorem": "thm3",
                    "n": "30", "split": "15 15", "seed": "33001"},
        "params": {"lambda": "0.8", "beta": "0.6", "epsilon": "+1", "alpha": "0"},
        "initial": {"kind": "polarized", "seed": "33002"},
        "schedule": {"kind": "uniform_random", "seed": "33003"},
        "stop": {"max_steps": "18000"},
    },
    "example4": {
        "network": {"source": "generate", "kind": "random_symmetric", "n": "30",
                    "seed": "44001"},
        "params": {"lambda": "0.5", "beta": "0.8", "epsilon": "-1", "alpha": "0"},
        "initial": {"kind": "positive_opinions", "seed": "44002"},
        "schedule": {"kind": "uniform_random", "seed": "44003"},
        "stop": {"max_steps": "18000"},
    },
    "example5": {
        "network": {"source": "generate", "kind": "complete_bipartite", "n": "30",
                    "split": "15 15", "seed": "55001"},
        "params": {"lambda": "0.7", "beta": "0.6", "epsilon": "-1", "alpha": "0"},
        "initial": {"kind": "polarized", "seed": "55002"},
        "schedule": {"kind": "uniform_random", "seed": "55003"},
        "stop": {"max_steps": "18000"},
    },
}


def _read_config(path: str | None, preset: str | None) -> configparser.ConfigParser:
    cfg = configparser.ConfigParser()
    if preset is not None:
        if preset not in _PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; expected one of {sorted(_PRESETS)}")
        cfg.read_dict(_PRESETS[preset])
    if path is not None:
        if not os.path.exists(path):
            raise ConfigError(f"config file not found: {path}")
        cfg.read(path)
    if preset is None and path is None:
        raise ConfigError("either --config or --reproduce is required")
    return cfg


def _parse_vector(text: str, n: int, name: str) -> np.ndarray:
    parts = [p for p in text.replace(",", " ").split() if p]
    values = [float(p) for p in parts]
    if len(values) == 1:
        return np.full(n, values[0])
    if len(values) != n:
        raise ConfigError(f"{name} needs 1 or {n} values, got {len(values)}")
    return np.array(values)


def _parse_params(cfg: configparser.ConfigParser, n: int) -> netcore.AgentParams:
    section = cfg["params"] if cfg.has_section("params") else {}
    try:
        lam = _parse_vector(section.get("lambda", "0.5"), n, "lambda")
        beta = _parse_vector(section.get("beta", "0.5"), n, "beta")
        eps = _parse_vector(section.get("epsilon", "+1"), n, "epsilon").astype(int)
        alpha = float(section.get("alpha", "0"))
        return netcore.AgentParams(lam=lam, beta=beta, eps=eps, alpha=alpha)
    except ValueError as exc:
        raise ConfigError(f"invalid [params]: {exc}") from exc


def _parse_split(cfg_net, n: int) -> tuple | None:
    text = cfg_net.get("split", "").strip()
    if not text:
        return None
    sizes = [int(p) for p in text.split()]
    if len(sizes) != 2 or sizes[0] < 1 or sizes[1] < 1 or sum(sizes) != n:
        raise ConfigError(f"split must name two positive camp sizes summing to n={n}")
    return tuple(range(sizes[0])), tuple(range(sizes[0], n))


def _derived_seeds(master: int | None) -> dict | None:
    if master is None:
        return None
    rng = np.random.default_rng(np.random.SeedSequence(master))
    return {
        "network": int(rng.integers(2 ** 63)),
        "initial": int(rng.integers(2 ** 63)),
        "schedule": int(rng.integers(2 ** 63)),
    }


def _build_network(
    cfg: configparser.ConfigParser,
    params_hint: netcore.AgentParams | None,
    seeds: dict | None,
) -> tuple[netcore.TwoLayerNetwork, int, tuple | None]:
    if not cfg.has_section("network"):
        raise ConfigError("missing [network] section")
    section = cfg["network"]
    source = section.get("source", "generate")
    if source == "file":
        path = section.get("path", "")
        if not path:
            raise ConfigError("[network] source=file needs path=")
        try:
            net = netcore.load_network(path)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot load network {path}: {exc}") from exc
        return net, net.n, _parse_split(section, net.n)
    if source != "generate":
        raise ConfigError(f"[network] source must be file or generate, got {source!r}")
    try:
        n = section.getint("n")
    except (TypeError, ValueError):
        raise ConfigError("[network] n= must be an integer")
    if n is None or n < 2:
        raise ConfigError("[network] n= must be at least 2")
    seed = seeds["network"] if seeds else section.getint("seed", fallback=0)
    kind = section.get("kind", "random_symmetric")
    zero_diagonal = section.getboolean("zero_diagonal", fallback=True)
    split = _parse_split(section, n)
    try:
        if kind == "random_symmetric":
            graph = genesis.random_symmetric_stochastic(n, seed, zero_diagonal)
        elif kind == "complete_bipartite":
            if split is None:
                raise ConfigError("complete_bipartite needs split=")
            graph = genesis.complete_bipartite(split, seed,
                                               uniform=section.getboolean("uniform", fallback=False))
        elif kind == "condition_rescaled":
            if split is None:
                raise ConfigError("condition_rescaled needs split=")
            theorem = section.get("theorem", "")
            if params_hint is None:
                raise ConfigError("condition_rescaled needs [params]")
            graph = genesis.condition_rescaled(theorem, split, params_hint, n, seed)
        else:
            raise ConfigError(f"unknown network kind {kind!r}")
    except genesis.InfeasibleConditionError as exc:
        raise ConfigError(str(exc)) from exc
    opinion_layer = section.get("opinion_layer", "same")
    if opinion_layer == "same":
        net = netcore.TwoLayerNetwork.single_layer(graph)
    elif opinion_layer == "random_symmetric":
        w = genesis.random_symmetric_stochastic(n, seed + 1, zero_diagonal)
        net = netcore.TwoLayerNetwork(A=graph, W=w)
    else:
        raise ConfigError("[network] opinion_layer must be same or random_symmetric")
    return net, n, split


def _build_scenario(args) -> Scenario:
    cfg = _read_config(getattr(args, "config", None), getattr(args, "reproduce", None))
    seeds = _derived_seeds(getattr(args, "seed", None))
    pre_n = cfg.getint("network", "n", fallback=None)
    params_hint = _parse_params(cfg, pre_n) if pre_n else None
    net, n, split = _build_network(cfg, params_hint, seeds)
    params = params_hint if params_hint is not None and params_hint.n == n else _parse_params(cfg, n)

    init = cfg["initial"] if cfg.has_section("initial") else {}
    initial_kind = init.get("kind", "random")
    initial_seed = seeds["initial"] if seeds else int(init.get("seed", "1"))
    partition = split
    try:
        z0 = genesis.initial_state(initial_kind, n, initial_seed,
                                   partition if initial_kind != "random" else None)
    except ValueError as exc:
        raise ConfigError(f"invalid [initial]: {exc}") from exc

    sched = cfg["schedule"] if cfg.has_section("schedule") else {}
    sched_kind = sched.get("kind", "uniform_random")
    sched_seed = seeds["schedule"] if seeds else int(sched.get("seed", "2"))
    if sched_kind == "round_robin":
        schedule = dynamics.ActivationSchedule.round_robin(n)
    elif sched_kind == "uniform_random":
        schedule = dynamics.ActivationSchedule.uniform_random(n, sched_seed)
    else:
        raise ConfigError(f"unknown schedule kind {sched_kind!r}")

    stop_cfg = cfg["stop"] if cfg.has_section("stop") else {}
    max_steps = int(stop_cfg.get("max_steps", str(600 * n)))
    opinion_tol = float(stop_cfg.get("opinion_tol", str(dynamics.DEFAULT_OPINION_TOL)))
    window_text = stop_cfg.get("window", "").strip()
    window = int(window_text) if window_text else None
    try:
        stop = dynamics.StopCriterion(max_steps=max_steps, opinion_tol=opinion_tol, window=window)
    except ValueError as exc:
        raise ConfigError(f"invalid [stop]: {exc}") from exc

    outdir = getattr(args, "out", None) or (
        cfg.get("output", "dir", fallback=None) if cfg.has_section("output") else None
    )
    return Scenario(
        net=net, params=params, z0=z0, schedule=schedule, stop=stop,
        partition=partition, initial_kind=initial_kind, initial_seed=initial_seed,
        outdir=outdir,
    )


# --- output helpers -------------------------------------------------------------


def _write_json(path: str, payload) -> None:
    netcore._atomic_write_text(path, json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _classification_dict(cls: netcore.Classification) -> dict:
    out = {"kind": cls.kind, "label": cls.label()}
    if cls.sign is not None:
        out["sign"] = cls.sign
    if cls.partition is not None:
        out["partition"] = [[i + 1 for i in side] for side in cls.partition]
    return out


def _emit(payload, as_json: bool, human: str) -> None:
    if as_json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(human)


# --- commands --------------------------------------------------------------------


def cmd_simulate(args) -> int:
    scenario = _build_scenario(args)
    trace = dynamics.simulate(
        scenario.z0, scenario.net, scenario.params, scenario.schedule, scenario.stop
    )
    final = trace.final()
    classification = netcore.classify_state(final)
    nash = analysis.is_nash(final, scenario.net, scenario.params)
    result = {
        "classification": _classification_dict(classification),
        "converged": trace.converged,
        "reason": trace.reason,
        "steps": trace.steps,
        "nash": {"holds": nash.holds, "worst_slack": nash.worst()},
        "fixed_point_gap": trace.fixed_point_gap,
        "schedule": trace.schedule_kind,
        "realized_cover": trace.realized_cover,
    }
    if scenario.outdir:
        os.makedirs(scenario.outdir, exist_ok=True)
        dynamics.write_trace_jsonl(trace, os.path.join(scenario.outdir, "trace.jsonl"))
        dynamics.write_trace_csv(trace, os.path.join(scenario.outdir, "trace.csv"))
        if scenario.params.homogeneous() and scenario.params.eps[0] == -1:
            lines = ["t,value"]
            for t, state in enumerate(trace.states):
                value = analysis.potential(state, scenario.net, scenario.params).value
                lines.append(f"{t},{value:.17g}")
            netcore._atomic_write_text(
                os.path.join(scenario.outdir, "potential.csv"), "\n".join(lines) + "\n"
            )
            result["potential_series"] = "potential.csv"
        _write_json(os.path.join(scenario.outdir, "result.json"), result)
    _emit(result, args.json,
          f"{classification.label()} after {trace.steps} steps "
          f"({'converged' if trace.converged else trace.reason})")
    return 0


def cmd_check(args) -> int:
    scenario = _build_scenario(args)
    theorem = args.theorem
    if theorem not in analysis.CHECKERS:
        raise ConfigError(f"unknown theorem id {theorem!r}; expected one of "
                          f"{sorted(analysis.CHECKERS)}")
    if theorem == "thm5":
        report = analysis.check_thm5(scenario.net, scenario.params)
    elif theorem == "thm6":
        if scenario.partition is None:
            raise ConfigError("thm6 needs [network] split= to name the partition")
        report = analysis.check_thm6(scenario.partition, scenario.net, scenario.params)
    else:
        report = analysis.CHECKERS[theorem](scenario.z0, scenario.net, scenario.params)
    print(report.to_json())
    if scenario.outdir:
        os.makedirs(scenario.outdir, exist_ok=True)
        _write_json(os.path.join(scenario.outdir, f"check_{theorem}.json"), report.to_dict())
    if not report.applicable:
        return 3
    return 0 if report.holds else 2


def cmd_enumerate(args) -> int:
    scenario = _build_scenario(args)
    if scenario.net.n > N_MAX_ENUMERATION:
        print(f"error: enumeration supports at most n_max={N_MAX_ENUMERATION} agents, "
              f"got n={scenario.net.n}", file=sys.stderr)
        return 1
    candidates = oracle.enumerate_equilibria(scenario.net, scenario.params)
    text = oracle.equilibria_to_json(candidates)
    print(text)
    if scenario.outdir:
        os.makedirs(scenario.outdir, exist_ok=True)
        netcore._atomic_write_text(
            os.path.join(scenario.outdir, "equilibria.json"), text + "\n"
        )
    return 0


def cmd_contour(args) -> int:
    if args.resolution < 2:
        print("error: resolution must be at least 2", file=sys.stderr)
        return 1
    if args.function not in analysis.CONTOUR_FUNCTIONS:
        print(f"error: unknown contour function {args.function!r}; expected one of "
              f"{analysis.CONTOUR_FUNCTIONS}", file=sys.stderr)
        return 1
    grid = analysis.interior_grid(args.resolution)
    lines = analysis.contour_csv_lines(args.function, grid, grid)
    try:
        netcore._atomic_write_text(args.out, "\n".join(lines) + "\n")
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return 1
    _emit({"function": args.function, "resolution": args.resolution, "path": args.out},
          args.json, f"wrote {args.function} grid ({args.resolution}x{args.resolution}) to {args.out}")
    return 0


def cmd_generate(args) -> int:
    scenario = _build_scenario(args)
    out = args.out or "network.txt"
    if os.path.isdir(out):
        out = os.path.join(out, "network.txt")
    netcore.save_network(scenario.net, out)
    report = netcore.validate_network(scenario.net)
    _emit(
        {"path": out, "n": scenario.net.n, "valid": report.valid,
         "symmetric": [layer.symmetric for layer in report.layers]},
        args.json, f"wrote network (n={scenario.net.n}) to {out}",
    )
    return 0


def _wilson(successes: int, samples: int) -> tuple:
    if samples == 0:
        return (0.0, 1.0)
    p = successes / samples
    z2 = _Z95 * _Z95
    denom = 1.0 + z2 / samples
    centre = (p + z2 / (2 * samples)) / denom
    half = _Z95 * math.sqrt(p * (1 - p) / samples + z2 / (4 * samples ** 2)) / denom
    return (max(0.0, centre - half), min(1.0, centre + half))


def cmd_montecarlo(args) -> int:
    if args.samples < 1:
        print("error: samples must be at least 1", file=sys.stderr)
        return 1
    scenario = _build_scenario(args)
    n = scenario.net.n
    counts: dict = {}
    preserved = 0
    polarized_runs = 0
    for k in range(args.samples):
        sub = np.random.SeedSequence([scenario.initial_seed, k]).generate_state(2)
        z0 = genesis.initial_state(
            scenario.initial_kind, n, int(sub[0]),
            scenario.partition if scenario.initial_kind != "random" else None,
        )
        if scenario.schedule.kind == "uniform_random":
            schedule = dynamics.ActivationSchedule.uniform_random(n, int(sub[1]))
        else:
            schedule = scenario.schedule
        trace = dynamics.simulate(z0, scenario.net, scenario.params, schedule, scenario.stop)
        label = netcore.classify_state(trace.final()).label() if trace.converged else "non-converged"
        counts[label] = counts.get(label, 0) + 1
        if label == "polarized":
            polarized_runs += 1
            start = netcore.classify_state(z0)
            end = netcore.classify_state(trace.final())
            if start.partition == end.partition:
                preserved += 1
    fractions = {
        label: {
            "count": count,
            "fraction": count / args.samples,
            "ci95": list(_wilson(count, args.samples)),
        }
        for label, count in sorted(counts.items())
    }
    payload = {"samples": args.samples, "fractions": fractions}
    if polarized_runs:
        payload["polarized_partition_preserved"] = preserved / polarized_runs
    if scenario.outdir:
        os.makedirs(scenario.outdir, exist_ok=True)
        _write_json(os.path.join(scenario.outdir, "montecarlo.json"), payload)
    _emit(payload, args.json,
          "; ".join(f"{label}: {entry['count']}/{args.samples}"
                    for label, entry in fractions.items()))
    return 0


# --- entry point -------------------------------------------------------------------


def _add_common(parser: argparse.ArgumentParser, with_scenario: bool = True) -> None:
    if with_scenario:
        parser.add_argument("--config", help="INI scenario file")
        parser.add_argument("--reproduce", help="bundled scenario preset (example3|example4|example5)")
    parser.add_argument("--seed", type=int, help="master seed overriding all component seeds")
    parser.add_argument("--out", help="output directory or file")
    parser.add_argument("--json", action="store_true", help="machine-readable stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coevnet",
        description="Coevolving actions and opinions on two-layer networks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one scenario and export the trace")
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("check", help="evaluate a named condition checker")
    _add_common(p)
    p.add_argument("--theorem", required=True,
                   help="one of thm2, thm3, thm5, thm6, thm7, eq22")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("enumerate", help="exhaustively enumerate equilibria (small n)")
    _add_common(p)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("contour", help="write a (beta, lambda) contour grid as CSV")
    p.add_argument("--function", required=True,
                   help=f"one of {', '.join(analysis.CONTOUR_FUNCTIONS)}")
    p.add_argument("--resolution", type=int, default=200)
    p.add_argument("--out", required=True, help="CSV output path")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_contour)

    p = sub.add_parser("generate", help="generate a network file from the config")
    _add_common(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("montecarlo", help="basin-of-attraction sweep over seeded runs")
    _add_common(p)
    p.add_argument("--samples", type=int, required=True)
    p.set_defaults(func=cmd_montecarlo)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
