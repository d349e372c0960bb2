import json
import subprocess
import sys

import pytest
from jsonschema import Draft202012Validator
from referencing import Registry, Resource

from fanlim import io as fio
from fanlim.cli import main
from fanlim.presheaves import line_bundle, line_bundle_inclusion

from importlib import resources


def schema(name):
    text = resources.files("fanlim.schemas").joinpath(name).read_text()
    return json.loads(text)


def registry():
    resources_ = [Resource.from_contents(schema(n))
                  for n in ("fan.json", "presheaf.json", "map.json",
                            "reports.json")]
    return Registry().with_resources(
        (r.id(), r) for r in resources_)


def make_validator(s):
    return Draft202012Validator(s, registry=registry())


def validate_report(kind, payload):
    make_validator({"$ref": f"urn:fanlim:reports#/$defs/{kind}"}).validate(
        payload)


P1 = {"rank": 1, "rays": [[1], [-1]], "max_cones": [[0], [1]]}


@pytest.fixture
def p1_file(tmp_path):
    path = tmp_path / "p1.fan"
    path.write_text(json.dumps(P1))
    return str(path)


def run_cli(args):
    import io as _io
    from contextlib import redirect_stdout, redirect_stderr
    out, err = _io.StringIO(), _io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(args)
    return code, out.getvalue(), err.getvalue()


def test_fan_roundtrip(p2):
    data = fio.fan_to_json(p2)
    make_validator(schema("fan.json")).validate(data)
    fan = fio.fan_from_json(data)
    assert fan.rays == p2.rays
    assert fan.cones == p2.cones


def test_presheaf_roundtrip(p1):
    o = line_bundle(p1, (2, -1))
    data = fio.presheaf_to_json(o)
    make_validator(schema("presheaf.json")).validate(data)
    back = fio.presheaf_from_json(data)
    for key in o.poset.elements:
        assert back.complex(key).summands == o.complex(key).summands
    assert back.structure == o.structure


def test_map_roundtrip(p1):
    f = line_bundle_inclusion(p1, (0, 0), (1, 0))
    data = fio.map_to_json(f)
    make_validator(schema("map.json")).validate(data)
    back = fio.map_from_json(data)
    assert back.comps == f.comps


def test_cli_fan_check(p1_file):
    code, out, _ = run_cli(["fan-check", p1_file])
    assert code == 0
    payload = json.loads(out)
    validate_report("fan_check", payload)
    assert payload["complete"] is True


def test_cli_fan_check_rejects_bad_fan(tmp_path):
    bad = tmp_path / "bad.fan"
    bad.write_text(json.dumps({"rank": 2, "rays": [[2, 0], [0, 1]],
                               "max_cones": [[0, 1]]}))
    code, out, err = run_cli(["fan-check", str(bad)])
    assert code == 2
    assert "NonPrimitiveRay" in err


def test_cli_rsigma(p1_file):
    code, out, _ = run_cli(["rsigma", p1_file])
    assert code == 0
    payload = json.loads(out)
    validate_report("rsigma", payload)
    assert sorted(map(tuple, payload)) == [(0, 0), (0, 1), (1, 0)]
    code, out, _ = run_cli(["--format", "tsv", "rsigma", p1_file])
    assert code == 0
    assert out.splitlines() == ["0\t0", "0\t1", "1\t0"]


def test_cli_cohomology(p1_file):
    code, out, _ = run_cli(
        ["cohomology", p1_file, "--bundle", "-1,-1", "--window", "auto"])
    assert code == 0
    payload = json.loads(out)
    validate_report("table", payload)
    assert payload["entries"] == [{"m": [0], "degree": -1, "h": 1, "dim": 1}]
    assert payload["total"] == {"-1": 1}


def test_cli_cohomology_tsv_window(p1_file):
    code, out, _ = run_cli(
        ["--format", "tsv", "cohomology", p1_file, "--bundle", "1,0",
         "--window", "-4:4"])
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "m1\tdegree\tdim"
    assert lines[1:] == ["-1\t0\t1", "0\t0\t1"]


def test_cli_holim_and_sheaf_check(tmp_path, p1):
    o = line_bundle(p1, (1, 1))
    pre = tmp_path / "o.json"
    pre.write_text(json.dumps(fio.presheaf_to_json(o)))
    code, out, _ = run_cli(["holim", str(pre), "--window", "auto"])
    assert code == 0
    validate_report("table", json.loads(out))

    code, out, _ = run_cli(["sheaf-check", str(pre)])
    assert code == 0
    payload = json.loads(out)
    validate_report("sheaf_check", payload)
    assert payload["passed"] is True


def test_cli_sheaf_check_failure(tmp_path, p1):
    from fanlim.presheaves import free_presheaf, sphere_pattern
    f = free_presheaf(p1, frozenset(), sphere_pattern(p1))
    pre = tmp_path / "free.json"
    pre.write_text(json.dumps(fio.presheaf_to_json(f)))
    code, out, _ = run_cli(["sheaf-check", str(pre)])
    assert code == 1
    payload = json.loads(out)
    validate_report("sheaf_check", payload)
    assert payload["passed"] is False


def test_cli_colocal_check(tmp_path, p1):
    o = line_bundle(p1, (0, 0))
    pre = tmp_path / "o.json"
    pre.write_text(json.dumps(fio.presheaf_to_json(o)))
    code, out, _ = run_cli(["colocal-check", str(pre), "--conewise"])
    assert code == 1  # a line bundle is not colocally acyclic
    payload = json.loads(out)
    validate_report("colocal_check", payload)
    assert payload["acyclic"] is False
    assert all(entry["acyclic"] is False for entry in payload["conewise"])


def test_cli_generator_report(tmp_path, p1):
    f = line_bundle_inclusion(p1, (-1, 0), (0, 0))
    mp = tmp_path / "incl.json"
    mp.write_text(json.dumps(fio.map_to_json(f)))
    code, out, _ = run_cli(["generator-report", str(mp)])
    assert code == 0
    payload = json.loads(out)
    validate_report("generator_report", payload)
    assert payload == {"objectwise_qiso": False, "colocal": False,
                       "r_sigma": [[0, 0], [0, 1], [1, 0]]}


def test_cli_missing_file():
    code, _, err = run_cli(["fan-check", "/nonexistent.fan"])
    assert code == 2


def test_cli_determinism_and_jobs(p1_file):
    runs = []
    for jobs in ("1", "2"):
        code, out, _ = run_cli(["--jobs", jobs, "cohomology", p1_file,
                                "--bundle", "3,1", "--window", "auto"])
        assert code == 0
        runs.append(out)
    assert runs[0] == runs[1]


def test_cli_entrypoint_subprocess(p1_file):
    proc = subprocess.run(
        [sys.executable, "-m", "fanlim.cli", "rsigma", p1_file],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout) == [[0, 0], [0, 1], [1, 0]]
