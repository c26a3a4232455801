import json

import numpy as np
import pytest
import yaml

from vorticity_waves.cli import build_parser, main, resolve_config
from vorticity_waves.cli import storage
from vorticity_waves.cli.validation import select_checks
from vorticity_waves.errors import ConfigError
from vorticity_waves.model.parameters import A_CRIT, exact_solution
from vorticity_waves.models.schemas import EventKind, WaveClass
from vorticity_waves.solver.branch import Branch


def _read(path):
    return json.loads(path.read_text(encoding="utf-8"))


def test_exact_command_writes_solution_and_profile(tmp_path):
    assert main(["exact", "--a", "0.1", "--n", "32", "--out", str(tmp_path)]) == 0
    solution = storage.load_solution(tmp_path / "solution.json", recompute=False)
    assert solution.N == 32
    assert solution.wave_class == WaveClass.REGULAR
    assert np.allclose(solution.trace.coeffs, exact_solution(0.1, 32).coeffs)
    assert _read(tmp_path / "solution.json")["class"] == "regular"
    rows = storage.read_csv(tmp_path / "profile.csv")
    assert set(rows[0]) == {"alpha", "x", "y", "x_alpha"}
    assert float(rows[0]["alpha"]) == 0.0


def test_solve_from_laminar_start(tmp_path):
    assert main(["solve", "--g", "0.2", "--a", "0.05", "--n", "16", "--out", str(tmp_path)]) == 0
    solution = storage.load_solution(tmp_path / "solution.json")
    assert solution.wave_class == WaveClass.LAMINAR
    assert solution.residual_norm < 1e-11


def test_solve_from_initial_file(tmp_path):
    start = tmp_path / "start"
    assert main(["exact", "--a", "0.05", "--n", "32", "--out", str(start)]) == 0
    out = tmp_path / "solved"
    assert main(["solve", "--initial", str(start / "solution.json"), "--out", str(out)]) == 0
    solution = storage.load_solution(out / "solution.json")
    assert solution.a == 0.05
    assert solution.residual_norm < 1e-11
    assert np.max(np.abs(solution.trace.coeffs - exact_solution(0.05, 32).coeffs)) < 1e-10


@pytest.mark.slow
def test_continue_command_writes_branch(tmp_path):
    argv = ["continue", "--a-start", "0.05", "--a-end", "0.052", "--n", "32", "--out", str(tmp_path)]
    assert main(argv) == 0
    branch = storage.load_branch(tmp_path / "branch.json")
    assert branch.status == "complete"
    assert branch.points[-1].a == pytest.approx(0.052, abs=1e-12)
    rows = storage.read_csv(tmp_path / "branch_summary.csv")
    assert len(rows) == len(branch.points)
    assert rows[0]["class"] == "regular"


@pytest.mark.slow
def test_events_command_refines_breaking(tmp_path, exact_point):
    branch = Branch(points=[exact_point(0.16), exact_point(0.18)], path={"G": 0.0, "l": 0.0})
    storage.save_branch(branch, tmp_path / "branch.json")
    out = tmp_path / "events"
    assert main(["events", "--branch", str(tmp_path / "branch.json"), "--kind", "breaking", "--out", str(out)]) == 0
    located = _read(out / "events.json")["events"]
    assert located[0]["kind"] == "breaking"
    assert abs(located[0]["value"] - A_CRIT) < 1e-6
    assert (out / "event_breaking.json").exists()


def test_validate_selected_group(tmp_path):
    assert main(["validate", "--only", "hilbert", "--out", str(tmp_path)]) == 0
    report = _read(tmp_path / "validation.json")
    assert report["status"] == "pass"
    assert [check["name"] for check in report["checks"]] == ["hilbert_cosines", "hilbert_square"]


def test_validate_perturbed_check_fails(tmp_path):
    argv = ["validate", "--only", "hilbert", "--perturb", "hilbert_square", "--out", str(tmp_path)]
    assert main(argv) == 1
    report = _read(tmp_path / "validation.json")
    assert report["status"] == "fail"
    assert report["failed"] == ["hilbert_square"]


def test_unknown_check_is_a_configuration_error(tmp_path):
    assert main(["validate", "--only", "no_such_check", "--out", str(tmp_path)]) == 3
    error = _read(tmp_path / "error.json")
    assert error["status"] == "error"
    assert error["reason"] == "config"


def test_critlayer_needs_vertical_tangent(tmp_path):
    assert main(["exact", "--a", "0.0", "--n", "4", "--out", str(tmp_path)]) == 0
    out = tmp_path / "crit"
    assert main(["critlayer", "--solution", str(tmp_path / "solution.json"), "--out", str(out)]) == 4
    assert _read(out / "error.json")["reason"] == "no_vertical_tangent"


def test_critlayer_window_on_still_water(tmp_path):
    # Uniform shear: u = 0 relative to the wave one unit below the surface
    assert main(["exact", "--a", "0.0", "--n", "4", "--out", str(tmp_path)]) == 0
    out = tmp_path / "crit"
    argv = ["critlayer", "--solution", str(tmp_path / "solution.json"), "--alpha", "1.0",
            "--columns", "20", "--rows", "40", "--out", str(out)]
    assert main(argv) == 0
    report = _read(out / "critreport.json")["report"]
    assert report["side"] == "none"
    assert report["window_half_width"] == pytest.approx(0.05)
    contour = storage.read_csv(out / "contour.csv")
    assert len(contour) == 20
    assert all(abs(float(row["beta"]) + 1.0) < 1e-12 for row in contour)
    assert len(storage.read_csv(out / "field.csv")) == 800


def test_resolve_config_layers_yaml_and_flags(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text(yaml.safe_dump({"n": 48, "G": 0.3, "options": {"newton_tol": 1e-10}}), encoding="utf-8")
    args = build_parser().parse_args(["solve", "--config", str(path), "--a", "0.1", "--max-newton-iters", "7"])
    cfg = resolve_config(args)
    assert cfg.command == "solve"
    assert cfg.n == 48
    assert cfg.G == 0.3
    assert cfg.a == 0.1
    assert cfg.options.newton_tol == 1e-10
    assert cfg.options.max_newton_iters == 7


def test_resolve_config_gravity_sweep():
    args = build_parser().parse_args(["continue", "--g", "0.1", "0.2", "--a-end", "touch"])
    cfg = resolve_config(args)
    assert cfg.G == 0.1
    assert cfg.G_values == [0.1, 0.2]
    assert cfg.a_end == "touch"


def test_resolve_config_rejects_unknown_keys(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text("amplitude: 3\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        resolve_config(build_parser().parse_args(["exact", "--config", str(path)]))


def test_a_end_must_be_number_or_touch():
    with pytest.raises(ConfigError):
        build_parser().parse_args(["continue", "--a-end", "top"])


@pytest.mark.parametrize("argv", [["exact", "--a", "notanumber"], ["frobnicate"], ["validate", "--bogus-flag"]])
def test_malformed_flags_are_configuration_errors(tmp_path, monkeypatch, argv):
    monkeypatch.chdir(tmp_path)
    assert main(argv) == 3
    assert _read(tmp_path / "runs" / "error.json")["reason"] == "config"


def test_unknown_log_level_is_a_configuration_error(tmp_path):
    assert main(["validate", "--only", "hilbert", "--log-level", "bogus", "--out", str(tmp_path)]) == 3
    assert _read(tmp_path / "error.json")["reason"] == "config"


def test_branch_round_trip_keeps_events(tmp_path, exact_point):
    branch = Branch(points=[exact_point(0.05, 8), exact_point(0.06, 8)], path={"G": 0.0, "l": 0.0})
    branch.add_event(EventKind.BREAKING, 0.055, exact_point(0.055, 8))
    storage.save_branch(branch, tmp_path / "branch.json")
    loaded = storage.load_branch(tmp_path / "branch.json")
    assert loaded.parameters.tolist() == [0.05, 0.06]
    assert loaded.events_of(EventKind.BREAKING)[0].value == 0.055
    assert loaded.status == "complete"
    assert np.array_equal(loaded.points[1].trace.coeffs, branch.points[1].trace.coeffs)


def test_load_solution_rejects_bad_files(tmp_path):
    (tmp_path / "broken.json").write_text("{", encoding="utf-8")
    with pytest.raises(ConfigError):
        storage.load_solution(tmp_path / "broken.json")
    with pytest.raises(ConfigError):
        storage.load_solution(tmp_path / "missing.json")
    storage.write_json({"coeffs": [1.0]}, tmp_path / "partial.json")
    with pytest.raises(ConfigError):
        storage.load_solution(tmp_path / "partial.json")


def test_default_suite_skips_full_branches():
    names = [check.name for check in select_checks([])]
    assert "laminar_kernel" in names
    assert not any(name.startswith("touching_branch") for name in names)
    assert [check.name for check in select_checks(["branch"])] == [
        "touching_branch_positive",
        "touching_branch_negative",
    ]
