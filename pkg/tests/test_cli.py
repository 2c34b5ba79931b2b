import json

import pytest

from cli import run
from meander_core import ClosedMeander, count_components


def invoke(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_sturm_check(capsys):
    code, out, _ = invoke(capsys, "sturm", "check", "1,4,3,2,5")
    assert code == 0
    result = json.loads(out)
    assert result["sturm"] is True
    assert result["morse"] == [0, 1, 2, 1, 0]


def test_sturm_check_rejects_bad_permutation(capsys):
    code, out, err = invoke(capsys, "sturm", "check", "1,1,2")
    assert code == 2
    assert out == ""
    assert err.startswith("Error:")


def test_sturm_enumerate(capsys):
    code, out, err = invoke(capsys, "sturm", "enumerate", "--n", "5")
    assert code == 0
    result = json.loads(out)
    assert result["count"] == 2
    assert [r["perm"] for r in result["permutations"]] == sorted(r["perm"] for r in result["permutations"])
    assert "STURM PERMUTATIONS" in err


def test_sturm_enumerate_csv(capsys):
    code, out, _ = invoke(capsys, "sturm", "enumerate", "--n", "5", "-f", "csv")
    assert code == 0
    assert out.splitlines()[0] == "perm,morse,canonical"
    assert len(out.splitlines()) == 3


def test_missing_subcommand_is_usage_error(capsys):
    code, _, err = invoke(capsys)
    assert code == 2
    assert "Error:" in err
    code, _, _ = invoke(capsys, "kasner")
    assert code == 2


def test_format_not_available(capsys):
    code, _, err = invoke(capsys, "seaweed", "components", "2,4", "-f", "svg")
    assert code == 2
    assert "--format svg" in err


def test_seaweed_components(capsys):
    code, out, _ = invoke(capsys, "seaweed", "components", "2,4")
    assert code == 0
    result = json.loads(out)
    assert result == {"composition": "2,4|6", "n": 6, "components": 2, "formula": 2}


def test_seaweed_billiard(capsys):
    code, out, _ = invoke(capsys, "seaweed", "billiard", "2|2")
    assert code == 0
    result = json.loads(out)
    assert result["components"] == result["meander_components"] == 2


def test_meander_close_round_trip(capsys):
    code, out, _ = invoke(capsys, "meander", "close", "1,4,3,2,5")
    assert code == 0
    data = json.loads(out)
    m = ClosedMeander.from_dict(data)
    assert m.n == 4
    assert count_components(m) == data["components"] == 1

    code, out, _ = invoke(capsys, "meander", "components", json.dumps(m.to_dict()))
    assert code == 0
    assert json.loads(out) == {"n": 4, "components": 1}


def test_meander_from_file(capsys, tmp_path):
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"n": 4, "upper": [[1, 2], [3, 4]], "lower": [[1, 4], [2, 3]]}))
    code, out, _ = invoke(capsys, "meander", "double", str(path))
    assert code == 0
    assert json.loads(out)["n"] == 8

    code, _, err = invoke(capsys, "meander", "components", str(tmp_path / "missing.json"))
    assert code == 2
    assert "not found" in err


def test_tl_trace(capsys):
    code, out, _ = invoke(capsys, "tl", "trace", "N=4: 2 1 3")
    assert code == 0
    assert json.loads(out)["trace_exponent"] == 1


def test_kasner_iterate_csv(capsys):
    code, out, _ = invoke(capsys, "kasner", "iterate", "--theta", "0", "--n", "1", "--d", "2")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "step,theta_deg,corner"
    step, theta, corner = lines[2].split(",")
    assert step == "1"
    assert float(theta) == pytest.approx(180.0)
    assert corner == "1"


def test_kasner_multivalued_is_runtime_error(capsys):
    code, out, err = invoke(capsys, "kasner", "iterate", "--theta", "60", "--d", "2.4")
    assert code == 1
    assert out == ""
    assert "Error:" in err


def test_kasner_ifs(capsys):
    code, out, _ = invoke(capsys, "kasner", "ifs", "--arcs", "0:360", "--d", "2.0")
    assert code == 0
    assert json.loads(out)["measure_deg"] == pytest.approx(360.0)


def test_kasner_stats(capsys):
    code, out, _ = invoke(capsys, "kasner", "stats", "--samples", "2000", "--d", "2.0", "--seed", "1")
    assert code == 0
    result = json.loads(out)
    assert result["fraction"] == 0.0
    assert result["seed"] == 1


def test_sturm_orbit(capsys):
    code, out, _ = invoke(capsys, "sturm", "orbit", "2,1,3")
    assert code == 0
    result = json.loads(out)
    assert result["orbit"] == ["1,3,2", "2,1,3"]
    assert result["canonical"] == "1,3,2"


def test_sturm_enumerate_nine_canonical(capsys):
    code, out, _ = invoke(capsys, "sturm", "enumerate", "--n", "9", "--canonical")
    assert code == 0
    assert json.loads(out)["count"] == 18


def test_tl_eval(capsys):
    code, out, _ = invoke(capsys, "tl", "eval", "N=3: 1 1")
    assert code == 0
    result = json.loads(out)
    assert result["N"] == 3
    assert result["loop_exponent"] == 1


def test_tl_meander(capsys):
    code, out, _ = invoke(capsys, "tl", "meander", "N=4: 2 2")
    assert code == 0
    result = json.loads(out)
    assert result["interior_loops"] == 1
    assert result["n"] == 8


def test_shoot_sigma(capsys):
    code, out, _ = invoke(capsys, "shoot", "sigma", "--grid", "512")
    assert code == 0
    result = json.loads(out)
    assert result["sigma"] == "1,4,3,2,5"
    assert result["sturm"] is True
    assert len(result["equilibria"]) == 5


def test_shoot_curve(capsys):
    code, out, _ = invoke(capsys, "shoot", "curve", "--grid", "16")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "a,v1,w1,escaped"
    assert len(lines) == 17


def test_bianchi_integrate_backward(capsys):
    code, out, _ = invoke(capsys, "bianchi", "integrate", "--state", "0,0,0,1,0", "--tspan", "2")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "t,N1,N2,N3,Sp,Sm,Omega,q,I_partial,J_partial"
    assert float(lines[-1].split(",")[0]) == pytest.approx(-2.0)


def test_bianchi_integrals_direction(capsys):
    code, out, _ = invoke(capsys, "bianchi", "integrals", "--state", "0,0,0,1,0", "--tspan", "2")
    assert code == 0
    result = json.loads(out)
    assert result["type"] == "I" and result["direction"] == "backward"
    assert result["t_end"] == pytest.approx(-2.0)
    assert result["I"] == 0.0 and result["J"] == 0.0
    assert result["kasner_epochs_deg"] == [pytest.approx(0.0)]

    code, out, _ = invoke(capsys, "bianchi", "integrals", "--state", "0,0,0,1,0", "--tspan", "2",
                          "--forward")
    assert code == 0
    result = json.loads(out)
    assert result["direction"] == "forward"
    assert result["t_end"] == pytest.approx(2.0)

    code, _, _ = invoke(capsys, "bianchi", "integrals", "--state", "0,0,0,1,0", "--forward", "--backward")
    assert code == 2


def test_kasner_ifs_coverage(capsys):
    code, out, _ = invoke(capsys, "kasner", "ifs", "--arcs", "10:11", "--d", "2.4", "--coverage")
    assert code == 0
    assert json.loads(out)["coverage_steps"] == 11


def test_kasner_iterate_flags_last_point_in_stable_arc(capsys):
    code, out, _ = invoke(capsys, "kasner", "iterate", "--theta", "0", "--n", "1", "--d", "1.5",
                          "-f", "json")
    assert code == 0
    assert json.loads(out)["flag"] == "stable-arc"


def test_output_file(capsys, tmp_path):
    target = tmp_path / "check.json"
    code, out, err = invoke(capsys, "sturm", "check", "1,4,3,2,5", "-o", str(target))
    assert code == 0
    assert out == ""
    assert json.loads(target.read_text())["sturm"] is True
    assert str(target) in err


def test_config_overrides_svg_size(capsys, tmp_path):
    cfg = tmp_path / "settings.env"
    cfg.write_text("STURMKIT_SVG_WIDTH=320\nsvg_height=200\n")
    code, out, _ = invoke(capsys, "meander", "svg", "1,2,3", "-c", str(cfg))
    assert code == 0
    assert 'width="320"' in out and 'height="200"' in out


def test_config_unknown_key(capsys, tmp_path):
    cfg = tmp_path / "settings.env"
    cfg.write_text("colour=red\n")
    code, _, err = invoke(capsys, "sturm", "check", "1,2,3", "-c", str(cfg))
    assert code == 2
    assert "colour" in err


@pytest.mark.parametrize("argv", [
    ("sturm", "enumerate", "--n", "7", "--method", "arches"),
    ("meander", "svg", "1,4,3,2,5"),
    ("seaweed", "billiard", "1,2|3", "-f", "svg"),
    ("kasner", "iterate", "--theta", "100", "--n", "15", "-f", "svg"),
])
def test_output_is_byte_identical_across_runs(capsys, argv):
    _, first, _ = invoke(capsys, *argv)
    _, second, _ = invoke(capsys, *argv)
    assert first and first == second
