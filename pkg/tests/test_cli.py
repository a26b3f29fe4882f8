import json

import pytest

from tamecycles.cli import build_parser, main


def write(tmp_path, document, name="model.json"):
    path = tmp_path / name
    path.write_text(json.dumps(document))
    return str(path)


def test_cohomology_of_the_pseudocircle(tmp_path, capsys):
    path = write(tmp_path, {"ell": 3, "preset": {"kind": "pseudocircle", "k": 2}})
    assert main(["cohomology", path]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["command"] == "cohomology"
    sections = report["checks"][0]
    assert sections["name"] == "global sections"
    assert sections["details"]["table"] == {"0": 1, "1": 1}


def test_output_is_deterministic(tmp_path, capsys):
    path = write(tmp_path, {"ell": 2, "preset": {"kind": "pseudodisk", "k": 2}})
    main(["cohomology", path])
    first = capsys.readouterr().out
    main(["cohomology", path])
    assert capsys.readouterr().out == first


def test_out_and_timing(tmp_path, capsys):
    path = write(tmp_path, {"ell": 3, "preset": {"kind": "pseudocircle", "k": 2}})
    out = tmp_path / "report.json"
    assert main(["cohomology", path, "--out", str(out), "--timing"]) == 0
    assert capsys.readouterr().out == ""
    assert "cohomology" in json.loads(out.read_text())["timing"]


def test_nearby_of_a_wrap(tmp_path, capsys):
    path = write(tmp_path, {"ell": 3, "preset": {"kind": "wrap", "k": 2, "n": 2}})
    assert main(["nearby", path, "--sheaf", "constant"]) == 0
    checks = {check["name"]: check for check in json.loads(capsys.readouterr().out)["checks"]}
    stable = checks["stabilized at 0"]["details"]
    assert stable["table"] == {"0": 2}
    assert stable["order"] == 2
    assert checks["fixed points identity"]["verdict"] == "PASS"


def test_vanishing_with_levels(tmp_path, capsys):
    path = write(tmp_path, {"ell": 3, "preset": {"kind": "identity", "k": 2}})
    assert main(["vanishing", path, "--levels", "1,3"]) == 0
    checks = {check["name"]: check for check in json.loads(capsys.readouterr().out)["checks"]}
    assert checks["stabilized at 0"]["details"]["table"] == {}
    assert checks["localization on every level"]["verdict"] == "PASS"


def test_compare_mi(tmp_path, capsys):
    path = write(tmp_path, {"ell": 3, "preset": {"kind": "wrap", "k": 2, "n": 2}})
    assert main(["compare-mi", path, "--window", "0,3"]) == 0
    check = json.loads(capsys.readouterr().out)["checks"][0]
    assert check["verdict"] == "PASS"
    assert check["details"]["window"] == [0, 3]


@pytest.mark.parametrize(
    "document",
    [
        {"ell": 3, "space": {"elements": ["a", "b"], "covers": [["a", "b"], ["b", "a"]]}},
        {"ell": 6, "preset": {"kind": "pseudocircle", "k": 2}},
    ],
)
def test_bad_input_exits_with_two(tmp_path, capsys, document):
    path = write(tmp_path, document)
    assert main(["cohomology", path]) == 2
    assert capsys.readouterr().err.startswith("error:")


def test_missing_structure_map(tmp_path):
    path = write(tmp_path, {"ell": 3, "preset": {"kind": "pseudocircle", "k": 2}})
    assert main(["nearby", path]) == 2


def test_missing_file(tmp_path):
    assert main(["cohomology", str(tmp_path / "absent.json")]) == 2


def test_verify_list(capsys):
    assert main(["verify", "--list"]) == 0
    lines = capsys.readouterr().out.splitlines()
    names = [line.split("\t")[0] for line in lines]
    assert "purity" in names
    assert names == sorted(names)


def test_verify(capsys):
    assert main(["verify", "purity", "--cases", "2", "--seed", "5"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["summary"]["FAIL"] == 0
    assert main(["verify", "no-such-suite"]) == 2
    assert main(["verify"]) == 2


def test_argument_errors():
    parser = build_parser()
    with pytest.raises(SystemExit):
        parser.parse_args(["nearby", "model.json", "--levels", "1,x"])
    with pytest.raises(SystemExit):
        parser.parse_args(["compare-mi", "model.json", "--window", "3,1"])
    args = parser.parse_args(["vanishing", "model.json", "--levels", "1,2"])
    assert args.levels == [1, 2]
    assert args.sheaf == "file"
