"""Command-line front end.

Subcommands: `traj` (trajectory run, optionally a TD/displacement grid),
`lyap` (Lyapunov spectrum), `scan` (parameter sweep with visited profiles and
largest exponents), `validate` (Monte-Carlo check of the infinite-batch
limit), `export-game` (write a builtin or loaded game definition).

Every CSV starts with a `#`-prefixed JSON line holding the fully resolved
configuration; re-running from that line reproduces the file bitwise. Floats
are written with their shortest round-trip representation. Trajectory and
validation outputs carry a single-line JSON sidecar at `<out>.meta.json`.

Exit codes: 0 success, 2 configuration error, 3 runtime error (boundary,
non-ergodic, numeric).
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .dynamics import bifurcation_scan, iterate, lyapunov_spectrum
from .environments import BUILTIN_NAMES, resolve_game, save_game
from .errors import (
    BoundaryError,
    DimensionError,
    GameFormatError,
    NonErgodicError,
    NumericError,
    ParameterError,
    PartialSpectrumError,
)
from .game import Game, uniform_profile, validate_profile
from .learners import LearnerParams, step, td_error, truncated_td_error
from .sampler import sample_batch_td

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

_CONFIG_ERRORS = (ParameterError, DimensionError, GameFormatError)
_RUNTIME_ERRORS = (BoundaryError, NonErgodicError, NumericError, PartialSpectrumError)

VALIDATE_REPS = 5


def _fmt(value) -> str:
    return repr(float(value))


@dataclass
class RunConfig:
    """Fully resolved run configuration; serialized into every output header."""

    command: str
    game: str
    learner: str = "q"
    alpha: object = 0.1
    beta: object = 1.0
    gamma: object = 0.0
    x0: object = "uniform"
    steps: int = 1000
    epsilon: float = 1e-6
    transient: int = 0
    record: int = 1000
    axis: object = None
    values: object = None
    seed: int = 0
    jobs: int = 1
    grid: object = None

    def header(self) -> str:
        return "# " + json.dumps(asdict(self), sort_keys=True)

    def resolve(self):
        game = resolve_game(self.game)
        params = LearnerParams(
            kind=self.learner,
            alpha=np.asarray(self.alpha, dtype=float),
            beta=np.asarray(self.beta, dtype=float),
            gamma=np.asarray(self.gamma, dtype=float),
        )
        if params.n_agents == 1 and game.n_agents > 1:
            params = LearnerParams.homogeneous(
                self.learner, game.n_agents, float(params.alpha[0]),
                float(params.beta[0]), float(params.gamma[0]),
            )
        if params.n_agents != game.n_agents:
            raise ParameterError(
                f"learner parameters cover {params.n_agents} agents, game has {game.n_agents}"
            )
        if self.x0 == "uniform":
            x0 = uniform_profile(game)
        else:
            flat = np.asarray(self.x0, dtype=float)
            expected = game.n_agents * game.n_states * game.n_actions
            if flat.size != expected:
                raise ParameterError(
                    f"x0 has {flat.size} entries, expected {expected} "
                    "(agent-major, then state, then action)"
                )
            x0 = validate_profile(
                game, flat.reshape(game.n_agents, game.n_states, game.n_actions)
            )
        return game, params, x0


def _profile_columns(game: Game) -> list[str]:
    return [
        f"X_{i}_{s}_{a}"
        for i in range(game.n_agents)
        for s in range(game.n_states)
        for a in range(game.n_actions)
    ]


def _write_lines(path, lines) -> None:
    Path(path).write_text("\n".join(lines) + "\n")


def _write_sidecar(out, payload: dict) -> None:
    Path(f"{out}.meta.json").write_text(json.dumps(payload, sort_keys=True) + "\n")


def run_traj(cfg: RunConfig, out) -> None:
    game, params, x0 = cfg.resolve()
    if cfg.grid is not None:
        _run_grid(cfg, game, params, out)
        return
    traj = iterate(game, x0, params, max_steps=cfg.steps, epsilon=cfg.epsilon)
    cols = ["t"] + _profile_columns(game) + [f"reward_{i}" for i in range(game.n_agents)]
    lines = [cfg.header(), ",".join(cols)]
    for t in range(traj.points.shape[0]):
        row = [str(t)]
        row += [_fmt(v) for v in traj.points[t].ravel()]
        row += [_fmt(v) for v in traj.performance[t]]
        lines.append(",".join(row))
    _write_lines(out, lines)
    _write_sidecar(out, {"converged_at": traj.converged_at, "epsilon": traj.epsilon})


def _run_grid(cfg: RunConfig, game: Game, params: LearnerParams, out) -> None:
    """Sample TD errors and one-step displacements on a behavior grid.

    Supported for two-action games: each (agent, state) pair contributes one
    free coordinate (the first action's probability), gridded at cell centers
    so every sampled profile is strictly interior.
    """
    if game.n_actions != 2:
        raise ParameterError("grid mode is only defined for two-action games")
    n_points = int(cfg.grid)
    if n_points < 2:
        raise ParameterError(f"grid must have at least 2 points, got {n_points}")
    centers = (np.arange(n_points) + 0.5) / n_points
    pairs = [(i, s) for i in range(game.n_agents) for s in range(game.n_states)]
    prof_cols = _profile_columns(game)
    cols = prof_cols + [f"d{c}" for c in prof_cols] + [f"TD_{c[2:]}" for c in prof_cols]
    lines = [cfg.header(), ",".join(cols)]
    for combo in itertools.product(centers, repeat=len(pairs)):
        x = np.empty((game.n_agents, game.n_states, game.n_actions))
        for (i, s), p in zip(pairs, combo):
            x[i, s, 0] = p
            x[i, s, 1] = 1.0 - p
        td = td_error(game, x, params)
        dx = step(game, x, params) - x
        row = [_fmt(v) for v in x.ravel()]
        row += [_fmt(v) for v in dx.ravel()]
        row += [_fmt(v) for v in td.ravel()]
        lines.append(",".join(row))
    _write_lines(out, lines)


def run_lyap(cfg: RunConfig, out) -> None:
    game, params, x0 = cfg.resolve()
    result = lyapunov_spectrum(game, x0, params, steps=cfg.steps, transient=cfg.transient)
    lines = [cfg.header(), "k,exponent"]
    for k, lam in enumerate(result.exponents):
        lines.append(f"{k},{_fmt(lam)}")
    _write_lines(out, lines)
    _write_sidecar(
        out,
        {
            "largest": float(result.exponents[0]),
            "steps_used": result.steps_used,
            "transient_skipped": result.transient_skipped,
        },
    )


def _sanitize(text: str) -> str:
    return text.replace(",", ";").replace("\n", " ")


def run_scan(cfg: RunConfig, out) -> None:
    game, params, x0 = cfg.resolve()
    if cfg.axis is None or cfg.values is None:
        raise ParameterError("scan requires --axis and --values")
    blocks = bifurcation_scan(
        game,
        x0,
        params,
        axis=cfg.axis,
        values=[float(v) for v in cfg.values],
        record_steps=cfg.record,
        transient=cfg.transient,
        jobs=cfg.jobs,
    )
    prof_cols = _profile_columns(game)
    lines = [cfg.header(), ",".join(["param_value", "t"] + prof_cols + ["lyap_max", "error"])]
    n_cols = len(prof_cols)
    for block in blocks:
        if block.error is not None:
            lines.append(
                ",".join([_fmt(block.param_value), ""] + [""] * n_cols + ["", _sanitize(block.error)])
            )
            continue
        for t in range(block.profiles.shape[0]):
            row = [_fmt(block.param_value), str(t)]
            row += [_fmt(v) for v in block.profiles[t].ravel()]
            row += [_fmt(block.lyap_max), ""]
            lines.append(",".join(row))
    _write_lines(out, lines)


def run_validate(cfg: RunConfig, out) -> None:
    game, params, x0 = cfg.resolve()
    if cfg.values is None:
        raise ParameterError("validate requires --values with the batch sizes")
    batch_sizes = [int(v) for v in cfg.values]
    exact = truncated_td_error(game, x0, params)
    deviations = []
    for size in batch_sizes:
        devs = []
        for rep in range(VALIDATE_REPS):
            est = sample_batch_td(game, x0, params, size, seed=cfg.seed + rep)
            devs.append(float(np.abs(est.sampled_td - exact)[est.visited].max()))
        deviations.append(float(np.mean(devs)))
    lines = [cfg.header(), "K,max_abs_deviation"]
    for size, dev in zip(batch_sizes, deviations):
        lines.append(f"{size},{_fmt(dev)}")
    _write_lines(out, lines)
    if len(batch_sizes) >= 2 and all(d > 0.0 for d in deviations):
        slope = float(
            np.polyfit(np.log(np.asarray(batch_sizes, float)), np.log(deviations), 1)[0]
        )
    else:
        slope = None
    _write_sidecar(out, {"slope": slope, "reps": VALIDATE_REPS, "seed": cfg.seed})


def run_export_game(cfg: RunConfig, out) -> None:
    save_game(resolve_game(cfg.game), out)


_COMMANDS = {
    "traj": run_traj,
    "lyap": run_lyap,
    "scan": run_scan,
    "validate": run_validate,
    "export-game": run_export_game,
}


def run_from_config(config: dict, out) -> None:
    """Re-run a command from a parsed header configuration (bitwise stable)."""
    cfg = RunConfig(**config)
    _COMMANDS[cfg.command](cfg, out)


def _parse_multi(text: str):
    parts = [p for p in text.split(",") if p]
    vals = [float(p) for p in parts]
    return vals[0] if len(vals) == 1 else vals


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tdlim",
        description="Deterministic-limit TD learning dynamics on stochastic games",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--game", required=True,
                       help=f"builtin name ({', '.join(BUILTIN_NAMES)}) or JSON path")
        p.add_argument("--out", required=True, help="output file path")
        if name == "export-game":
            continue
        p.add_argument("--learner", choices=["q", "sarsa", "ac"], default="q")
        p.add_argument("--alpha", default="0.1", help="scalar or comma-separated per-agent list")
        p.add_argument("--beta", default="1.0", help="scalar or comma-separated per-agent list")
        p.add_argument("--gamma", default="0.0", help="scalar or comma-separated per-agent list")
        p.add_argument("--x0", default="uniform",
                       help='"uniform" or flat comma-separated profile (agent-major)')
        p.add_argument("--steps", type=int, default=1000)
        p.add_argument("--epsilon", type=float, default=1e-6)
        p.add_argument("--transient", type=int, default=0)
        p.add_argument("--record", type=int, default=1000)
        p.add_argument("--axis", choices=["alpha", "beta", "gamma"])
        p.add_argument("--values", help="comma-separated parameter values / batch sizes")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--jobs", type=int, default=1)
        if name == "traj":
            p.add_argument("--grid", type=int, help="emit a TD/displacement grid instead of a run")
    return parser


def _config_from_args(args) -> RunConfig:
    if args.command == "export-game":
        return RunConfig(command=args.command, game=args.game)
    x0 = args.x0 if args.x0 == "uniform" else [float(v) for v in args.x0.split(",") if v]
    values = None
    if args.values is not None:
        values = [float(v) for v in args.values.split(",") if v]
    return RunConfig(
        command=args.command,
        game=args.game,
        learner=args.learner,
        alpha=_parse_multi(args.alpha),
        beta=_parse_multi(args.beta),
        gamma=_parse_multi(args.gamma),
        x0=x0,
        steps=args.steps,
        epsilon=args.epsilon,
        transient=args.transient,
        record=args.record,
        axis=args.axis,
        values=values,
        seed=args.seed,
        jobs=args.jobs,
        grid=getattr(args, "grid", None),
    )


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config_from_args(args)
        _COMMANDS[args.command](cfg, args.out)
    except _RUNTIME_ERRORS as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except _CONFIG_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
