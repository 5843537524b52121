import json

import pytest

from padic_hecke import cli


def config(**changes):
    raw = json.loads(cli.default_config_text())
    raw.update(changes)
    return raw


def write(tmp_path, raw, name="run.json"):
    path = tmp_path / name
    path.write_text(json.dumps(raw))
    return str(path)


def run(tmp_path, argv, capsys):
    code = cli.main(argv + ["--out", str(tmp_path / "reports")])
    return code, capsys.readouterr()


def report(tmp_path, name):
    return json.loads((tmp_path / "reports" / f"{name}.json").read_text())


def test_default_config_is_valid():
    cfg = cli.parse_config(cli.default_config_text())
    cli.validate(cfg)
    assert cfg.prime == 7 and cfg.f == (3, 0) and cfg.c == (5, 0)


@pytest.mark.parametrize("changes,rule", [
    ({"c": [7, 0]}, "coprime(c, p)"),
    ({"c": [2, 1], "prime": 5}, "coprime(c, p)"),
    ({"c": [6, 0]}, "coprime(c, f)"),
    ({"f": [7, 0]}, "coprime(f, p)"),
    ({"prime": 9}, "prime"),
    ({"discriminant": -15}, "class-number-one"),
    ({"prime": 2}, "unramified-p"),
    ({"schema_version": 2}, "schema-version"),
    ({"c": [0, 0]}, "nonzero-ideals"),
    ({"c": 5}, "explicit-generators"),
    ({"characters": [{"alpha": 2, "finite": [{"prime": [3, 0], "order": 4, "exponent": 1}]}]}, "low-weight"),
    ({"characters": [{"alpha": 3, "finite": []}]}, "well-defined-character"),
    ({"characters": [{"alpha": 3, "finite": [{"prime": [3, 2], "order": 4, "exponent": 3}]}]},
     "conductor-divides-p-f"),
])
def test_validation_rules(tmp_path, capsys, changes, rule):
    code, out = run(tmp_path, ["charvar", "--config", write(tmp_path, config(**changes))], capsys)
    assert code == 2
    diag = json.loads(out.err)
    assert diag["rule"] == rule
    assert not (tmp_path / "reports").exists()


def test_missing_field(tmp_path, capsys):
    raw = config()
    del raw["f"]
    code, out = run(tmp_path, ["charvar", "--config", write(tmp_path, raw)], capsys)
    assert code == 2 and json.loads(out.err)["rule"] == "explicit-generators"


def test_low_weight_flag(tmp_path, capsys):
    raw = config(characters=[{"alpha": 2, "finite": [{"prime": [3, 0], "order": 4, "exponent": 1}]}])
    code, _ = run(tmp_path, ["charvar", "--experimental-low-weight", "--config", write(tmp_path, raw)], capsys)
    assert code == 0


def test_reports_are_reproducible(tmp_path, capsys):
    path = write(tmp_path, config())
    texts = []
    for _ in range(2):
        code, _ = run(tmp_path, ["local-factor", "--config", path], capsys)
        assert code == 0
        r = report(tmp_path, "local-factor")
        r.pop("timestamp")
        texts.append(json.dumps(r, sort_keys=True))
    assert texts[0] == texts[1]
    assert not [p for p in (tmp_path / "reports").iterdir() if p.name.startswith(".")]


def test_verify_interpolation_report(tmp_path, capsys):
    code, out = run(tmp_path, ["verify-interpolation"], capsys)
    assert code == 0 and out.out.startswith("PASS")
    r = report(tmp_path, "verify-interpolation")
    assert r["schema"] == cli.SCHEMA and r["passed"]
    first = r["results"]["rows"][0]["report"]
    assert first["prime"] == 7 and first["c"] == "(5 + 0*w)"
    assert first["discrepancy"] < 1e-6
    assert {"local", "c_factor", "euler", "L_f", "omega"} <= set(first["factors"])
    assert "j_hat_digest" in first["lhs_items"]


def test_flags_override_config(tmp_path, capsys):
    code, _ = run(tmp_path, ["charvar", "--precision-padic", "12", "--precision-bits", "120", "--tol", "1e-8"],
                  capsys)
    assert code == 0
    c = report(tmp_path, "charvar")["config"]
    assert (c["padic_precision"], c["complex_bits"], c["tol"]) == (12, 120, 1e-8)


def test_fourier_and_charvar(tmp_path, capsys):
    for cmd in ("fourier", "charvar"):
        code, _ = run(tmp_path, [cmd], capsys)
        assert code == 0
    rows = report(tmp_path, "charvar")["results"]["rows"]
    assert [r["sigma_analytic"] for r in rows] == [r["expected"] for r in rows]
    assert rows[-1]["sigma_analytic"] is False


def test_congruence_inert_only_refines(tmp_path, capsys):
    code, _ = run(tmp_path, ["congruence"], capsys)
    assert code == 0
    res = report(tmp_path, "congruence")["results"]
    assert res["refinement"][0]["exact_fourier"]
    assert "not asserted" in res["congruence"]


def test_failing_check_exits_one(tmp_path, capsys, monkeypatch):
    monkeypatch.setitem(cli.COMMANDS, "charvar", (lambda cfg: ({"forced": True}, False), "x"))
    code, out = run(tmp_path, ["charvar"], capsys)
    assert code == 1 and out.out.startswith("FAIL")
    assert report(tmp_path, "charvar")["passed"] is False


def test_selftest_dispatch(tmp_path, capsys, monkeypatch):
    from padic_hecke import acceptance

    def fake(selection=None, echo=print):
        r = acceptance.CriterionResult(2, "demo", True, 0.1, 1.0, {})
        echo(r.line())
        return [r]

    monkeypatch.setattr(acceptance, "run_all", fake)
    code, out = run(tmp_path, ["selftest"], capsys)
    assert code == 0
    assert "criterion 2" in out.err
    rows = report(tmp_path, "selftest")["results"]["criteria"]
    assert rows and "seconds" not in rows[0]
