import json
import math

import pytest


def header_line(**config):
    base = {
        "command": "traj", "game": "matching_pennies", "learner": "q",
        "alpha": 0.1, "beta": 5.0, "gamma": 0.1, "x0": "uniform",
        "steps": 10, "epsilon": 1e-6, "transient": 0, "record": 10,
        "axis": None, "values": None, "seed": 0, "jobs": 1, "grid": None,
    }
    base.update(config)
    return "# " + json.dumps(base, sort_keys=True)


PROFILE_COLUMNS = [
    "X_0_0_0", "X_0_0_1", "X_0_1_0", "X_0_1_1",
    "X_1_0_0", "X_1_0_1", "X_1_1_0", "X_1_1_1",
]


def write_traj_csv(path, n_steps=10, learner="q", converged_at=None):
    """A synthetic spiral toward the uniform profile, in tdlim traj format."""
    lines = [header_line(learner=learner, steps=n_steps)]
    lines.append(",".join(["t"] + PROFILE_COLUMNS + ["reward_0", "reward_1"]))
    for t in range(n_steps + 1):
        shrink = 0.4 * math.exp(-0.3 * t)
        p1 = 0.5 + shrink * math.cos(0.7 * t)
        p2 = 0.5 + shrink * math.sin(0.7 * t)
        row = [str(t)]
        for p in (p1, p2, p2, p1):
            row += [repr(p), repr(1.0 - p)]
        row += [repr(0.5 + shrink), repr(0.5 - shrink)]
        lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n")
    if converged_at is not None:
        meta = {"converged_at": converged_at, "epsilon": 1e-6}
        (path.parent / (path.name + ".meta.json")).write_text(json.dumps(meta))
    return path


def write_grid_csv(path, points=4):
    """A synthetic displacement grid pointing toward the uniform profile."""
    cols = PROFILE_COLUMNS + [f"d{c}" for c in PROFILE_COLUMNS] + \
        [f"TD_{c[2:]}" for c in PROFILE_COLUMNS]
    lines = [header_line(grid=points), ",".join(cols)]
    centers = [(k + 0.5) / points for k in range(points)]
    for a in centers:
        for b in centers:
            for c in centers:
                for d in centers:
                    xs = []
                    for p in (a, b, c, d):
                        xs += [p, 1.0 - p]
                    dxs = []
                    for p in (a, b, c, d):
                        dxs += [0.1 * (0.5 - p), -0.1 * (0.5 - p)]
                    tds = [0.0] * 8
                    lines.append(",".join(repr(v) for v in xs + dxs + tds))
    path.write_text("\n".join(lines) + "\n")
    return path


def write_scan_csv(path, learner="q", values=(0.1, 0.5, 0.9), record=5, with_error=False):
    cols = ["param_value", "t"] + PROFILE_COLUMNS + ["lyap_max", "error"]
    lines = [header_line(command="scan", learner=learner, axis="gamma",
                         values=list(values)), ",".join(cols)]
    for v in values:
        lam = v - 0.5
        for t in range(record):
            p = 0.5 + 0.3 * math.sin(2.0 * t + 10.0 * v)
            row = [repr(float(v)), str(t)]
            for q in (p, 1 - p, 1 - p, p):
                row += [repr(q), repr(1.0 - q)]
            row += [repr(lam), ""]
            lines.append(",".join(row))
    if with_error:
        lines.append(",".join([repr(1.5), ""] + [""] * 8 + ["", "ParameterError: alpha out of range"]))
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture
def traj_csv(tmp_path):
    return write_traj_csv(tmp_path / "traj.csv", converged_at=9)


@pytest.fixture
def grid_csv(tmp_path):
    return write_grid_csv(tmp_path / "grid.csv")


@pytest.fixture
def scan_csv(tmp_path):
    return write_scan_csv(tmp_path / "scan.csv")
