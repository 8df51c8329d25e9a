"""Script entry points: render figures from tdlim CSV files."""

from __future__ import annotations

import argparse
import sys

from .figures import DEFAULT_EMBEDDING, FigureSpec, parse_embedding
from .io import MissingColumnError


def _run(spec: FigureSpec, out) -> int:
    try:
        written = spec.render(out)
    except (MissingColumnError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for path in written:
        print(f"wrote {path}")
    return 0


def main_phase(argv=None) -> int:
    parser = argparse.ArgumentParser(
        description="Per-state phase-space sections from trajectory CSVs"
    )
    parser.add_argument("trajectories", nargs="+", help="tdlim traj CSV files")
    parser.add_argument("--arrows", help="tdlim traj --grid CSV for the arrow field")
    parser.add_argument("--out", required=True,
                        help="image path; no extension writes both .png and .svg")
    args = parser.parse_args(argv)
    spec = FigureSpec(kind="phase", inputs=args.trajectories, arrows=args.arrows)
    return _run(spec, args.out)


def main_reward(argv=None) -> int:
    parser = argparse.ArgumentParser(description="Reward trajectories from traj CSVs")
    parser.add_argument("trajectories", nargs="+")
    parser.add_argument("--out", required=True)
    args = parser.parse_args(argv)
    return _run(FigureSpec(kind="reward", inputs=args.trajectories), args.out)


def main_bifurcation(argv=None) -> int:
    parser = argparse.ArgumentParser(
        description="Bifurcation diagrams with Lyapunov panels from scan CSVs"
    )
    parser.add_argument("scans", nargs="+", help="tdlim scan CSV files (learners overlay)")
    parser.add_argument("--embedding", default=None,
                        help='vertical-axis embedding, e.g. "8:X_1_1_0,4:X_0_1_0,2:X_1_0_0,1:X_0_0_0"')
    parser.add_argument("--components", action="store_true",
                        help="one panel row per profile component instead of the embedding")
    parser.add_argument("--out", required=True)
    args = parser.parse_args(argv)
    embedding = parse_embedding(args.embedding) if args.embedding else DEFAULT_EMBEDDING
    spec = FigureSpec(
        kind="bifurcation", inputs=args.scans, embedding=embedding, components=args.components
    )
    return _run(spec, args.out)
