import json

import pytest

from conewitness.cli import main, parse_assignments, CliError
from conewitness.fileformat import FormatError, dumps, loads
from conewitness.corpus import builtin


@pytest.fixture
def files(tmp_path):
    def export(name, companion=None):
        path = tmp_path / f"{name}-{companion or 'main'}.json"
        args = ["corpus", "export", name, "-o", str(path)]
        if companion:
            args += ["--companion", companion]
        assert main(args) == 0
        return str(path)

    return export


def test_round_trip_is_identity():
    for name in ["qubit-pom", "fig1-instance", "toy-bit"]:
        e = builtin(name)
        text = dumps(e.source, e.meter)
        p, m, _ = loads(text)
        assert (p, m) == (e.source, e.meter)
        assert dumps(p, m) == text


@pytest.mark.parametrize(
    "doc",
    [
        {"format": "gptfrag/1", "ambient_dimension": 1, "unit": ["1/0"], "sources": [], "meters": []},
        {"format": "gptfrag/1", "ambient_dimension": 1, "unit": [0.5],
         "sources": [{"setting": "0", "outcomes": {"0": ["1"]}}], "meters": [{"setting": "0", "outcomes": {"0": ["1"]}}]},
        {"format": "gptfrag/2"},
        {"format": "gptfrag/1", "ambient_dimension": 1, "unit": ["1"], "extra": 1},
    ],
)
def test_malformed_files(doc):
    with pytest.raises(FormatError):
        loads(json.dumps(doc))


def test_analyze(files, capsys):
    assert main(["analyze", files("classical-bit"), "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    s = doc["fragments"][0]["summary"]
    assert (s["state_span_dimension"], s["effect_span_dimension"]) == (2, 2)


def test_analyze_pom_dims(capsys):
    assert main(["analyze", "builtin:qubit-pom", "--format", "json"]) == 0
    s = json.loads(capsys.readouterr().out)["fragments"][0]["summary"]
    assert (s["state_span_dimension"], s["effect_span_dimension"]) == (3, 3)


def test_malformed_rational_exit_code(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"format": "gptfrag/1", "ambient_dimension": 1, "unit": ["1/0"],
                                "sources": [], "meters": []}))
    assert main(["analyze", str(path)]) == 2
    assert "zero denominator" in capsys.readouterr().err


def test_embed_exit_codes(files, tmp_path, capsys):
    assert main(["embed", files("classical-bit")]) == 0
    cert = tmp_path / "cert.json"
    assert main(["embed", files("gbit-square"), "--certificate", str(cert)]) == 10
    assert cert.exists()
    assert main(["verify", str(cert)]) == 0
    assert main(["embed", str(tmp_path / "missing.json")]) == 2


def test_embedding_file_verifies(tmp_path, capsys):
    emb = tmp_path / "emb.json"
    assert main(["embed", "builtin:qubit-stabilizer", "--embedding", str(emb)]) == 0
    assert main(["verify", str(emb)]) == 0
    doc = json.loads(emb.read_text())
    doc["verdict"]["kappa"][0][0] = "7"
    emb.write_text(json.dumps(doc))
    capsys.readouterr()
    assert main(["verify", str(emb)]) == 1
    assert "kappa(u) = 1_n" in capsys.readouterr().out


def test_tampered_report(tmp_path):
    rep = tmp_path / "r.json"
    assert main(["embed", "builtin:gbit-square", "--report", str(rep)]) == 10
    assert main(["verify", str(rep)]) == 0
    doc = json.loads(rep.read_text())
    doc["verdicts"][0]["certificate"][0] = "1000"
    rep.write_text(json.dumps(doc))
    assert main(["verify", str(rep)]) == 1


def test_cone_equiv(files, tmp_path):
    pom = files("qubit-pom")
    fc, noisy = tmp_path / "fc.json", tmp_path / "noisy.json"
    assert main(["transform", "flag-convexify", pom, "-o", str(fc)]) == 0
    assert main(["transform", "noise", "--beta", "default=1/2", pom, "-o", str(noisy)]) == 0
    assert main(["cone-equiv", pom, pom]) == 0
    assert main(["cone-equiv", pom, str(fc)]) == 0
    assert main(["cone-equiv", pom, str(noisy)]) == 10


def test_transform_outputs(files, tmp_path):
    pom = files("qubit-pom")
    fc, ineff = tmp_path / "fc.json", tmp_path / "ineff.json"
    assert main(["transform", "flag-convexify", pom, "--mu", "00=1/2,default=1/6", "-o", str(fc)]) == 0
    p, m, lineage = loads(fc.read_text())
    assert len(p.settings) == len(m.settings) == 1
    assert len(p.outcome_labels) == 4 and len(m.outcome_labels) == 4
    assert lineage[-1].startswith("flag-convexify")
    assert main(["transform", "inefficiency", "--alpha", "default=1/2", pom, "-o", str(ineff)]) == 0
    _, m, _ = loads(ineff.read_text())
    assert all("*" in m.outcomes(y) for y in m.settings)


def test_transform_errors(files):
    pom = files("qubit-pom")
    assert main(["transform", "flag-convexify", pom, "--mu", "00=1"]) == 2
    assert main(["transform", "noise", pom, "--beta", "+|D=1/2"]) == 2
    assert main(["transform", "noise", pom, "--beta", "default=0.5"]) == 2
    assert main(["transform", "inefficiency", pom, "--alpha", "default=1"]) == 2


def test_parse_assignments():
    assert parse_assignments("a=1/2,default=1/4") == ({"a": 1 / 2}, 1 / 4)
    with pytest.raises(CliError):
        parse_assignments("a")
    with pytest.raises(CliError):
        parse_assignments("a=1,a=2")


@pytest.mark.parametrize("demo", ["no-settings", "no-free-choice", "inefficient-detectors", "single-source"])
def test_demos(demo, capsys):
    assert main(["demo", demo, "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    f = doc["findings"]
    assert f["verdict_preserved"] and f["cone_equivalent_to_original"]
    assert set(f["verdicts"].values()) == {"not-embeddable"}
    if demo != "inefficient-detectors":
        assert f["final_source_settings"] == f["final_meter_settings"] == 1


def test_demo_extreme_inefficiency_and_classical_control(capsys):
    assert main(["demo", "inefficient-detectors", "--alpha", "999/1000", "--format", "json"]) == 0
    assert set(json.loads(capsys.readouterr().out)["findings"]["verdicts"].values()) == {"not-embeddable"}
    assert main(["demo", "no-settings", "--corpus", "classical-bit", "--format", "json"]) == 0
    assert set(json.loads(capsys.readouterr().out)["findings"]["verdicts"].values()) == {"embeddable"}


def test_unknown_demo_and_entry():
    assert main(["demo", "teleport"]) == 2
    assert main(["embed", "builtin:nothing"]) == 2
    assert main(["corpus", "export", "fig2-pair", "--companion", "nope"]) == 2


def test_corpus_list(capsys):
    assert main(["corpus", "list"]) == 0
    assert "qubit-pom" in capsys.readouterr().out.split()


def test_vertex_cap_env(monkeypatch, capsys):
    monkeypatch.setenv("CONEWITNESS_VERTEX_CAP", "1")
    assert main(["analyze", "builtin:qubit-stabilizer", "--format", "json"]) == 0
    s = json.loads(capsys.readouterr().out)["fragments"][0]["summary"]
    assert s["state_polytope_vertices"].startswith("skipped")
    monkeypatch.setenv("CONEWITNESS_VERTEX_CAP", "many")
    assert main(["analyze", "builtin:qubit-stabilizer"]) == 2


def test_timing_is_opt_in(capsys):
    assert main(["embed", "builtin:classical-bit", "--format", "json", "--timing"]) == 0
    assert "timing" in json.loads(capsys.readouterr().out)
