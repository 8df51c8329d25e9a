"""Figure builders for tdlim CSV outputs.

Three figure kinds mirror the benchmark presentation style:

  phase        per-state behavior-space sections with trajectories over an
               optional displacement arrow field,
  reward       stationary-average reward versus time,
  bifurcation  visited behavior points per parameter value (embedded to one
               axis, or one panel per profile component) above the largest
               Lyapunov exponents.

All numbers come from the CSVs; nothing is recomputed. Saved images embed a
checksum of every input file in their metadata.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import TableFile, input_metadata, read_table

# Default bifurcation embedding: binary-weighted first-action probabilities
# (agent 2 state 2 heaviest), spreading the 16 behavior-space corners over
# distinct integer levels.
DEFAULT_EMBEDDING = (
    (8.0, "X_1_1_0"),
    (4.0, "X_0_1_0"),
    (2.0, "X_1_0_0"),
    (1.0, "X_0_0_0"),
)

_LINESTYLES = ("solid", "dashed", "dashdot", "dotted")
_MARKERS = ("+", "x", ".", "1")


def _save(fig, out, tables) -> list[Path]:
    """Write the figure as PNG and/or SVG with input checksums in metadata."""
    out = Path(out)
    metadata = input_metadata(tables)
    targets = []
    if out.suffix.lower() in (".png", ".svg"):
        targets.append(out)
    else:
        targets = [out.with_suffix(".png"), out.with_suffix(".svg")]
    written = []
    for target in targets:
        if target.suffix == ".svg":
            fig.savefig(target, format="svg", metadata={"Source": metadata["tdlim-inputs"]})
        else:
            fig.savefig(target, format="png", metadata=metadata)
        written.append(target)
    plt.close(fig)
    return written


def _states_of(table: TableFile) -> list[int]:
    states = sorted({int(c.split("_")[2]) for c in table.profile_columns()})
    return states


def plot_phase(traj_csvs, out, arrows_csv=None, grid_round=6) -> list[Path]:
    """Per-state phase sections of (agent 1, agent 2) first-action probabilities.

    Trajectories get a cross at the initial profile and a circle at the final
    one when the run converged (per the sidecar). When a grid CSV is given,
    its one-step displacements are averaged over the other state's grid
    points and drawn as an arrow field colored by magnitude.
    """
    tables = [read_table(p) for p in traj_csvs]
    arrows = read_table(arrows_csv) if arrows_csv else None
    states = _states_of(tables[0])
    if not states:
        tables[0].require("X_0_0_0")
    for table in tables:
        table.require(*(f"X_{i}_{s}_0" for i in (0, 1) for s in states))

    fig, axes = plt.subplots(1, len(states), figsize=(4.2 * len(states), 4.2), squeeze=False)
    for k, s in enumerate(states):
        ax = axes[0][k]
        if arrows is not None:
            _draw_arrow_field(ax, arrows, s, grid_round)
        for idx, table in enumerate(tables):
            xs, ys = table[f"X_0_{s}_0"], table[f"X_1_{s}_0"]
            style = _LINESTYLES[idx % len(_LINESTYLES)]
            (line,) = ax.plot(xs, ys, linestyle=style, linewidth=1.2, label=table.label)
            ax.plot(xs[0], ys[0], marker="x", markersize=9, color=line.get_color())
            meta = table.sidecar()
            if meta and meta.get("converged_at") is not None:
                ax.plot(xs[-1], ys[-1], marker="o", markersize=9, fillstyle="none",
                        color=line.get_color())
        ax.set_xlim(-0.02, 1.02)
        ax.set_ylim(-0.02, 1.02)
        ax.set_xlabel(f"X_0_{s}_0")
        ax.set_ylabel(f"X_1_{s}_0")
        ax.set_title(f"state {s + 1}")
    axes[0][0].legend(loc="upper left", fontsize=8)
    fig.tight_layout()
    return _save(fig, out, tables + ([arrows] if arrows else []))


def _draw_arrow_field(ax, arrows: TableFile, state: int, grid_round: int) -> None:
    xc, yc = f"X_0_{state}_0", f"X_1_{state}_0"
    arrows.require(xc, yc, f"dX_0_{state}_0", f"dX_1_{state}_0")
    xs = np.round(arrows[xc], grid_round)
    ys = np.round(arrows[yc], grid_round)
    # average the displacement over all grid points of the other coordinates
    cells: dict = {}
    for x, y, du, dv in zip(xs, ys, arrows[f"dX_0_{state}_0"], arrows[f"dX_1_{state}_0"]):
        acc = cells.setdefault((x, y), [0.0, 0.0, 0])
        acc[0] += du
        acc[1] += dv
        acc[2] += 1
    pts = np.array(sorted(cells))
    vecs = np.array([[cells[tuple(p)][0] / cells[tuple(p)][2],
                      cells[tuple(p)][1] / cells[tuple(p)][2]] for p in pts])
    magnitude = np.hypot(vecs[:, 0], vecs[:, 1])
    ax.quiver(
        pts[:, 0], pts[:, 1], vecs[:, 0], vecs[:, 1], magnitude,
        cmap="viridis", angles="xy", width=0.004, alpha=0.85,
    )


def plot_reward(traj_csvs, out) -> list[Path]:
    """Average reward per time step; bold line for agent 1, thin for agent 2."""
    tables = [read_table(p) for p in traj_csvs]
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    for idx, table in enumerate(tables):
        table.require("t", "reward_0")
        style = _LINESTYLES[idx % len(_LINESTYLES)]
        agents = [c for c in table.columns if c.startswith("reward_")]
        for agent, column in enumerate(agents):
            (line,) = ax.plot(
                table["t"], table[column], linestyle=style,
                linewidth=1.8 if agent == 0 else 0.8,
                label=f"{table.label} agent {agent + 1}" if agent < 2 else None,
            )
    ax.set_xlabel("time step")
    ax.set_ylabel("average reward")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return _save(fig, out, tables)


def parse_embedding(spec: str):
    """Parse "8:X_1_1_0,4:X_0_1_0,..." into (coefficient, column) pairs."""
    pairs = []
    for chunk in spec.split(","):
        coef, column = chunk.split(":")
        pairs.append((float(coef), column.strip()))
    return tuple(pairs)


def _embed(table: TableFile, embedding) -> np.ndarray:
    out = np.zeros_like(table["param_value"])
    for coef, column in embedding:
        out = out + coef * table[column]
    return out


def plot_bifurcation(scan_csvs, out, embedding=DEFAULT_EMBEDDING, components=False) -> list[Path]:
    """Visited behavior points per parameter value with Lyapunov panel below.

    One column of panels per distinct learner in the inputs; several files
    with the same learner (e.g. two initial conditions) overlay with distinct
    markers. With `components=True` each first-action probability gets its
    own row of panels instead of the one-axis embedding.
    """
    tables = [read_table(p) for p in scan_csvs]
    for table in tables:
        table.require("param_value", "lyap_max")
    learners = []
    for table in tables:
        if table.label not in learners:
            learners.append(table.label)
    by_learner = {lab: [t for t in tables if t.label == lab] for lab in learners}

    if components:
        component_cols = [c for c in tables[0].profile_columns() if c.endswith("_0")]
        n_rows = len(component_cols) + 1
    else:
        component_cols = None
        n_rows = 2
    fig, axes = plt.subplots(
        n_rows, len(learners),
        figsize=(3.6 * len(learners), 2.2 * n_rows),
        squeeze=False, sharex=True,
    )

    lyap_axes = axes[-1]
    for col, learner in enumerate(learners):
        for idx, table in enumerate(by_learner[learner]):
            ok = ~np.isnan(table["lyap_max"])
            marker = _MARKERS[idx % len(_MARKERS)]
            if components:
                for row, column in enumerate(component_cols):
                    axes[row][col].plot(
                        table["param_value"][ok], table[column][ok],
                        marker=marker, linestyle="none", markersize=2,
                    )
                    axes[row][col].set_ylabel(column, fontsize=7)
            else:
                axes[0][col].plot(
                    table["param_value"][ok], _embed(table, embedding)[ok],
                    marker=marker, linestyle="none", markersize=2,
                )
                axes[0][col].set_ylabel("embedded profile", fontsize=8)
            values, seen = [], set()
            for v, lam in zip(table["param_value"][ok], table["lyap_max"][ok]):
                if v not in seen:
                    seen.add(v)
                    values.append((v, lam))
            values = np.array(values) if values else np.empty((0, 2))
            if values.size:
                lyap_axes[col].plot(values[:, 0], values[:, 1], marker=marker, markersize=4)
        lyap_axes[col].axhline(0.0, color="gray", linewidth=0.6)
        lyap_axes[col].set_ylabel("largest exponent", fontsize=8)
        lyap_axes[col].set_xlabel(tables[0].config.get("axis", "parameter"))
        axes[0][col].set_title(learner)
    fig.tight_layout()
    return _save(fig, out, tables)


@dataclass
class FigureSpec:
    """Declarative figure description: inputs, kind, and presentation knobs."""

    kind: str  # phase | reward | bifurcation
    inputs: list
    arrows: object = None
    embedding: tuple = DEFAULT_EMBEDDING
    components: bool = False
    state_sections: list = field(default_factory=list)

    def validate(self) -> None:
        if self.kind not in ("phase", "reward", "bifurcation"):
            raise ValueError(f"unknown figure kind {self.kind!r}")
        tables = [read_table(p) for p in self.inputs]
        if self.kind == "phase":
            states = self.state_sections or _states_of(tables[0])
            for table in tables:
                table.require(*(f"X_{i}_{s}_0" for i in (0, 1) for s in states))
        elif self.kind == "reward":
            for table in tables:
                table.require("t", "reward_0")
        else:
            for table in tables:
                table.require("param_value", "lyap_max", *(c for _, c in self.embedding))

    def render(self, out) -> list[Path]:
        self.validate()
        if self.kind == "phase":
            return plot_phase(self.inputs, out, arrows_csv=self.arrows)
        if self.kind == "reward":
            return plot_reward(self.inputs, out)
        return plot_bifurcation(
            self.inputs, out, embedding=self.embedding, components=self.components
        )
