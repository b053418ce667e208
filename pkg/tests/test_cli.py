import csv
import io
import json
import math
from pathlib import Path

import pytest

from ptscatter.cli import EXIT_INVALID, EXIT_NUMERICAL, EXIT_OK, main
from ptscatter.config import ConfigError, parse_config
from ptscatter.report import format_real, parse_real, to_csv, to_json

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
K_STAR = 1.2189261271020364
G_STAR = 2.3577813849333245


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return path


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_compose_report(capsys):
    code, out, _ = run(capsys, "compose", "--config", CONFIGS / "stack_compose.json")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["command"] == "compose"
    rec = doc["records"][0]
    assert len(rec["factors"]) == 3
    assert abs(complex(rec["det"]["re"], rec["det"]["im"]) - 1) <= 1e-12


def test_geometry_report(capsys):
    code, out, _ = run(capsys, "geometry", "--config", CONFIGS / "grating_geometry.json")
    assert code == EXIT_OK
    rec = json.loads(out)["records"][0]
    assert rec["lorentz_check"]["passes"] is True
    assert rec["mobius"]["label"] == "Parabolic"


def test_spectrum_csv_columns(capsys):
    code, out, _ = run(capsys, "spectrum", "--config", CONFIGS / "free_spectrum.json")
    assert code == EXIT_OK
    table = rows(out)
    assert list(table[0])[:3] == ["k", "t_re", "t_im"]
    assert all(parse_real(r["t_re"]) == 1 and parse_real(r["r_left_re"]) == 0 for r in table)


def test_singular_grid_point_is_divergent(capsys, tmp_path):
    cfg = write(tmp_path, {
        "potential": {"segments": [{"x0": 0, "x1": 1, "u": [1, G_STAR]}]},
        "k_range": {"k_min": K_STAR, "k_max": K_STAR + 1, "n": 2},
    })
    code, out, _ = run(capsys, "spectrum", "--config", cfg)
    assert code == EXIT_OK
    first = rows(out)[0]
    assert first["t_re"] == "divergent"
    assert math.isinf(parse_real(first["t_re"]))


def test_singularities_report(capsys):
    code, out, _ = run(capsys, "singularities", "--config", CONFIGS / "gain_slab_singularities.json")
    assert code == EXIT_OK
    (row,) = rows(out)
    assert row["kind"] == "SpectralSingularity"
    assert parse_real(row["k_re"]) == pytest.approx(K_STAR, abs=1e-9)


def test_boundstates_report(capsys):
    code, out, _ = run(capsys, "boundstates", "--config", CONFIGS / "well_boundstates.json")
    assert code == EXIT_OK
    (row,) = rows(out)
    assert parse_real(row["k_im"]) == pytest.approx(1.3472240583664297, abs=1e-9)


def test_tolerance_override_changes_verdict(capsys):
    cfg = CONFIGS / "grating_invisibility.json"
    _, out, _ = run(capsys, "invisibility", "--config", cfg)
    at_one = {r["k"]: r for r in rows(out)}["1"]
    assert at_one["label"] == "LeftReflectionless"
    _, out, _ = run(capsys, "invisibility", "--config", cfg, "--tol-unit", "1e-2")
    assert {r["k"]: r for r in rows(out)}["1"]["label"] == "LeftInvisible"


def test_out_file(capsys, tmp_path):
    target = tmp_path / "report.json"
    code, out, _ = run(capsys, "symmetry", "--config", CONFIGS / "dimer_symmetry.json", "--format", "json",
                       "--out", target)
    assert code == EXIT_OK and out == ""
    assert json.loads(target.read_text())["records"][0]["profile_pt_symmetric"] is True


def test_output_path_is_relative_to_config(capsys, tmp_path):
    cfg = write(tmp_path, {
        "potential": {"family": {"name": "slab", "u": 1, "d": 1}},
        "k": 1,
        "output": {"path": "out.csv"},
    })
    assert run(capsys, "symmetry", "--config", cfg)[0] == EXIT_OK
    assert (tmp_path / "out.csv").read_text().startswith("k,")


@pytest.mark.parametrize(
    "doc, fragment",
    [
        ({"potential": {"family": {"name": "slab", "u": 1, "d": 1}}, "k": 1, "colour": 1}, "colour: unknown key"),
        ({"potential": {}, "k": 1}, "exactly one potential source"),
        ({"potential": {"family": {"name": "slab", "u": 1, "d": -1}}, "k": 1}, "potential.family.slab.d"),
        ({"potential": {"family": {"name": "prism", "u": 1}}, "k": 1}, "potential.family"),
        ({"potential": {"segments": [{"x0": 0, "x1": 1, "u": [1, 2, 3]}]}, "k": 1}, "potential.segments.0.u"),
        ({"potential": {"segments": [{"x0": 0, "x1": 1, "u": 1}, {"x0": 2, "x1": 3, "u": 1}]}, "k": 1},
         "contiguous"),
        ({"potential": {"family": {"name": "slab", "u": 1, "d": 1}}}, "k"),
        ('{"potential": {\n  "segments": [}', "line 2"),
    ],
)
def test_invalid_configs_exit_2(capsys, tmp_path, doc, fragment):
    code, _, err = run(capsys, "symmetry", "--config", write(tmp_path, doc))
    assert code == EXIT_INVALID
    assert fragment in err


def test_compose_needs_segments(capsys):
    code, _, err = run(capsys, "compose", "--config", CONFIGS / "slab_spectrum.json")
    assert code == EXIT_INVALID and "segments" in err


def test_bad_arguments_exit_2(capsys):
    assert run(capsys, "spectrum")[0] == EXIT_INVALID
    assert run(capsys, "spectrum", "--config", CONFIGS / "free_spectrum.json", "--tol-unit", "-1")[0] == EXIT_INVALID
    assert run(capsys, "--version")[0] == EXIT_OK


def test_numerical_failure_exit_3(capsys, tmp_path):
    cfg = write(tmp_path, {"potential": {"segments": [{"x0": 0, "x1": 1, "u": [1, G_STAR]}]}, "k": K_STAR})
    code, _, err = run(capsys, "symmetry", "--config", cfg)
    assert code == EXIT_NUMERICAL
    assert "numerical failure" in err


def test_parse_config_sample_file_relative(tmp_path):
    (tmp_path / "u.csv").write_text("0,1,0\n1,1,0\n")
    cfg = parse_config('{"potential": {"sample_file": "u.csv"}, "k": 1}', base_dir=tmp_path)
    assert cfg.build_potential().support == (0.0, 1.0)
    with pytest.raises(ConfigError):
        parse_config('{"potential": {"sample_file": "nope.csv"}, "k": 1}', base_dir=tmp_path).build_potential()


def test_private_base_dir_is_not_a_config_key():
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config('{"potential": {"family": {"name": "slab", "u": 1, "d": 1}}, "k": 1, "_base_dir": "/"}')


@pytest.mark.parametrize("x", [0.1, 1 / 3, -2.5e-300, 1e308, 5e-324])
def test_real_formatting_round_trips(x):
    assert parse_real(format_real(x)) == x


def test_report_tokens():
    assert format_real(-0.0) == "0"
    assert format_real(math.inf) == "divergent"
    assert to_json({"a": complex(1, -0.0), "b": [True, None]}) == (
        '{\n  "a": {\n    "re": 1,\n    "im": 0\n  },\n  "b": [true, null]\n}\n'
    )
    assert to_csv([{"z": 1j, "m": [[1, 2]]}]) == "z_re,z_im,m_0_0,m_0_1\n0,1,1,2\n"
