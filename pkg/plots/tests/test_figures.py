import json

import pytest
from PIL import Image

from tdlim_plots import FigureSpec, file_checksum, parse_embedding
from tdlim_plots.cli import main_bifurcation, main_phase, main_reward
from tdlim_plots.io import MissingColumnError
from conftest import write_scan_csv, write_traj_csv


def png_inputs(path):
    return json.loads(Image.open(path).info["tdlim-inputs"])


def test_phase_figure_both_formats_with_checksums(tmp_path, traj_csv, grid_csv):
    out = tmp_path / "phase"
    code = main_phase([str(traj_csv), "--arrows", str(grid_csv), "--out", str(out)])
    assert code == 0
    png, svg = out.with_suffix(".png"), out.with_suffix(".svg")
    assert png.exists() and svg.exists()
    recorded = png_inputs(png)
    assert recorded[traj_csv.name] == file_checksum(traj_csv)
    assert recorded[grid_csv.name] == file_checksum(grid_csv)
    assert file_checksum(traj_csv) in svg.read_text()


def test_phase_multiple_initial_conditions(tmp_path):
    a = write_traj_csv(tmp_path / "a.csv", converged_at=9)
    b = write_traj_csv(tmp_path / "b.csv")  # no sidecar: no convergence circle
    out = tmp_path / "two.png"
    assert main_phase([str(a), str(b), "--out", str(out)]) == 0
    assert out.exists() and not (tmp_path / "two.svg").exists()


def test_phase_single_point_trajectory(tmp_path):
    single = write_traj_csv(tmp_path / "single.csv", n_steps=0)
    out = tmp_path / "single.png"
    assert main_phase([str(single), "--out", str(out)]) == 0
    assert out.exists()


def test_phase_missing_columns_fails_descriptively(tmp_path, scan_csv, capsys):
    # a scan CSV has no reward/trajectory layout mismatch, but phase needs X columns
    bad = tmp_path / "bad.csv"
    bad.write_text('# {"learner": "q"}\nt,foo\n0,1\n')
    code = main_phase([str(bad), "--out", str(tmp_path / "x.png")])
    assert code == 2
    assert "X_0_0_0" in capsys.readouterr().err


def test_reward_figure(tmp_path, traj_csv):
    out = tmp_path / "reward"
    assert main_reward([str(traj_csv), "--out", str(out)]) == 0
    assert out.with_suffix(".png").exists() and out.with_suffix(".svg").exists()
    assert png_inputs(out.with_suffix(".png"))[traj_csv.name] == file_checksum(traj_csv)


def test_bifurcation_three_learners(tmp_path):
    paths = [
        write_scan_csv(tmp_path / f"{kind}.csv", learner=kind)
        for kind in ("q", "sarsa", "ac")
    ]
    out = tmp_path / "bif.png"
    assert main_bifurcation([str(p) for p in paths] + ["--out", str(out)]) == 0
    assert out.exists()
    assert len(png_inputs(out)) == 3


def test_bifurcation_single_value_scan(tmp_path):
    path = write_scan_csv(tmp_path / "one.csv", values=(0.5,))
    out = tmp_path / "one.png"
    assert main_bifurcation([str(path), "--out", str(out)]) == 0
    assert out.exists()


def test_bifurcation_components_mode_two_initial_conditions(tmp_path):
    a = write_scan_csv(tmp_path / "ic1.csv", learner="sarsa")
    b = write_scan_csv(tmp_path / "ic2.csv", learner="sarsa")
    out = tmp_path / "components.png"
    code = main_bifurcation([str(a), str(b), "--components", "--out", str(out)])
    assert code == 0
    assert out.exists()


def test_bifurcation_skips_error_rows(tmp_path):
    path = write_scan_csv(tmp_path / "err.csv", with_error=True)
    out = tmp_path / "err.png"
    assert main_bifurcation([str(path), "--out", str(out)]) == 0


def test_custom_embedding_parse_and_validate(tmp_path, scan_csv):
    embedding = parse_embedding("2:X_0_0_0,1:X_1_0_0")
    assert embedding == ((2.0, "X_0_0_0"), (1.0, "X_1_0_0"))
    spec = FigureSpec(kind="bifurcation", inputs=[scan_csv],
                      embedding=parse_embedding("1:not_a_column"))
    with pytest.raises(MissingColumnError):
        spec.validate()


def test_figure_spec_rejects_unknown_kind(scan_csv):
    with pytest.raises(ValueError, match="kind"):
        FigureSpec(kind="santa", inputs=[scan_csv]).validate()
