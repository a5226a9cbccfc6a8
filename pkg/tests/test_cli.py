import json
import subprocess
import sys
from fractions import Fraction as Q

import pytest

from spectres import cli
from spectres.algebra import Algebra
from spectres.joint import COUNTEREXAMPLE_X, COUNTEREXAMPLE_Y
from spectres.serialize import (SchemaError, parse_blockset, parse_resolution, parse_value,
                                render_resolution)
from spectres.spectral import DiscreteSpectralResolution

U = Algebra.unit_interval()
UNIT = {"kind": "unit-interval-mv"}


def atoms_doc(n, atoms, algebra=UNIT):
    return {"n": n, "algebra": algebra,
            "atoms": [{"point": [str(c) for c in p], "value": v} for p, v in atoms]}


X_DOC = atoms_doc(1, [(p, str(v)) for p, v in COUNTEREXAMPLE_X])
Y_DOC = atoms_doc(2, [(p, str(v)) for p, v in COUNTEREXAMPLE_Y])


@pytest.fixture
def run(tmp_path, capsys):
    def go(*args, **files):
        argv = list(args)
        for name, doc in files.items():
            path = tmp_path / f"{name}.json"
            path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
            argv = [str(path) if a == f"@{name}" else a for a in argv]
        status = cli.main(argv)
        out = capsys.readouterr()
        return status, (json.loads(out.out) if out.out else None), out.err
    return go


class TestValidate:
    def test_valid(self, run):
        status, out, _ = run("validate", "@f", f=Y_DOC)
        assert status == 0 and out["passed"] and out["violations"] == []

    def test_bad_total(self, run):
        doc = atoms_doc(1, [((0,), "1/2")])
        status, out, _ = run("validate", "@f", f=doc)
        assert status == 1 and out["violations"][0]["axiom"] == "total"
        assert out["violations"][0]["value"] == "1/2"

    def test_float_rejected_with_location(self, run):
        doc = atoms_doc(1, [((0,), "1")])
        doc["atoms"][0]["point"] = [0.5]
        status, out, err = run("validate", "@f", f=doc)
        assert status == 2 and out is None and "atoms[0].point[0]" in err

    def test_malformed_json(self, run):
        status, _, err = run("validate", "@f", f="{not json")
        assert status == 2 and "invalid JSON" in err

    def test_missing_file(self, run, tmp_path):
        status, _, _ = run("validate", str(tmp_path / "nope.json"))
        assert status == 2

    def test_unknown_algebra(self, run):
        status, _, err = run("validate", "@f", f=atoms_doc(1, [((0,), "1")], {"kind": "boolean"}))
        assert status == 2 and "algebra.kind" in err

    def test_table_form(self, run):
        doc = {"n": 1, "algebra": UNIT, "grid": [["0", "1", "2", "3"]],
               "values": [{"point": [str(t)], "value": v} for t, v in zip(range(4), ["0", "3/4", "1/2", "1"])]}
        status, out, _ = run("validate", "@f", f=doc)
        assert status == 1 and any(v["axiom"] == "monotone" for v in out["violations"])

    def test_usage_error(self, run):
        assert run("validate")[0] == 2
        assert run("frobnicate")[0] == 2


class TestVolume:
    def test_single_block(self, run):
        b = {"lo": ["1/2", "-1/2"], "hi": ["3", "3"]}
        status, out, _ = run("volume", "@f", "--block", "@b", f=Y_DOC, b=b)
        assert status == 0 and out["total"] == "4/5"
        assert out["blocks"][0]["method"] == "delta"

    def test_infinite_blocks(self, run):
        bs = {"blocks": [{"lo": ["-inf", "-inf"], "hi": ["1", "+inf"]},
                         {"lo": ["1", "-inf"], "hi": ["+inf", "+inf"]}]}
        status, out, _ = run("volume", "@f", "--block", "@b", f=Y_DOC, b=bs)
        assert status == 0 and out["total"] == "1"
        assert [r["volume"] for r in out["blocks"]] == ["1/5", "4/5"]

    def test_overlapping_blocks(self, run):
        bs = {"blocks": [{"lo": ["0"], "hi": ["2"]}, {"lo": ["1"], "hi": ["3"]}]}
        assert run("volume", "@f", "--block", "@b", f=X_DOC, b=bs)[0] == 2


class TestLift:
    F_DOC = atoms_doc(1, [((Q(-1, 2),), ["1", "1/2", "0"]), ((Q(1, 2),), ["0", "1/2", "1"])],
                      {"kind": "fuzzy-tribe", "size": 3})
    HOM = {"kind": "tribe-restriction", "omega": 5, "omega_prime": 3}

    def test_flags(self, run):
        status, out, _ = run("lift", "@f", "--hom", "@h", "--box", "-2:2", "--level", "1",
                             f=self.F_DOC, h=self.HOM)
        assert status == 0 and out["audit"]["passed"] and out["solves"] == 9
        T5, T3 = Algebra.fuzzy_tribe(5), Algebra.fuzzy_tribe(3)
        F = parse_resolution(self.F_DOC)
        for e in out["values"]:
            v = parse_value(e["value"], T5)
            t = tuple(Q(c) for c in e["point"])
            assert tuple(v[:3]) == F(t) and T3.is_effect(F(t))

    def test_request_document(self, run):
        req = {"resolution": self.F_DOC, "hom": self.HOM, "box": [[-1, 1]], "level": 2}
        status, out, _ = run("lift", "@r", r=req)
        assert status == 0 and out["level"] == 2 and len(out["values"]) == 9

    def test_snapping_warns(self, run):
        doc = atoms_doc(1, [((Q(1, 3),), "1")])
        status, out, err = run("lift", "@f", "--box", "-1:1", "--level", "1", f=doc)
        assert status == 0 and "snapped" in err
        assert out["snapped"] == [{"from": ["1/3"], "to": ["0"]}] and out["u0"] == "1"

    def test_missing_box(self, run):
        assert run("lift", "@f", f=self.F_DOC)[0] == 2

    def test_atom_outside_box(self, run):
        status, _, err = run("lift", "@f", "--hom", "@h", "--box", "0:1", f=self.F_DOC, h=self.HOM)
        assert status == 2 and "inside the box" in err

    def test_bad_box(self, run):
        assert run("lift", "@f", "--box", "a:b", f=self.F_DOC)[0] == 2


class TestJoint:
    def test_meet_with_observable(self, run):
        req = {"mode": "meet", "factors": [X_DOC, X_DOC]}
        status, out, _ = run("joint", "@j", j=req)
        assert status == 0 and out["passed"]
        x = parse_resolution(out["observable"])
        assert isinstance(x, DiscreteSpectralResolution) and x.total == 1
        assert dict(x.atoms) == {(0, 0): Q(1, 20), (1, 1): Q(3, 10), (2, 2): Q(13, 20)}

    def test_group_meet_counterexample(self, run):
        status, out, _ = run("joint", "@j", j={"mode": "group-meet", "factors": [X_DOC, Y_DOC]})
        assert status == 1 and not out["passed"] and "observable" not in out
        assert any(v["value"] == "-1/20" for v in out["violations"])

    def test_group_product_rejected(self, run):
        assert run("joint", "@j", j={"mode": "group-product", "factors": [X_DOC]})[0] == 2

    def test_two_dimensional_factor_in_meet_mode(self, run):
        assert run("joint", "@j", j={"mode": "meet", "factors": [Y_DOC]})[0] == 2


class TestMoments:
    def test_mean(self, run):
        status, out, _ = run("moments", "@f", f=X_DOC)
        assert status == 0 and out["mean"] == "8/5" and out["moment"] == "8/5"

    def test_second_moment(self, run):
        status, out, _ = run("moments", "@f", "-k", "2", f=atoms_doc(1, [((2,), "1")]))
        assert out["moment"] == "4"

    def test_two_dimensional(self, run):
        status, out, _ = run("moments", "@f", f=Y_DOC)
        assert out["marginals"] == ["7/5", "13/10"] and out["mixed_moment_11"] == "12/5"

    def test_tribe_state(self, run):
        doc = atoms_doc(1, [((0,), ["1", "0"]), ((1,), ["0", "1"])], {"kind": "fuzzy-tribe", "size": 2})
        status, out, _ = run("moments", "@f", "--state", "@s", f=doc, s={"weights": ["1/4", "3/4"]})
        assert status == 0 and out["mean"] == "3/4"

    def test_invalid_resolution(self, run):
        status, out, _ = run("moments", "@f", f=atoms_doc(1, [((0,), "1/2")]))
        assert status == 1 and not out["passed"] and out["violations"]

    def test_bad_state(self, run):
        assert run("moments", "@f", "--state", "@s", f=X_DOC, s={"weights": ["1/2"]})[0] == 2


class TestSearchAndCounterexample:
    def test_odot_search(self, run):
        status, out, _ = run("odot-search", "-n", "3", "--trials", "50", "--seed", "7")
        assert status == 0 and out["trials"] == 50
        assert all(w["reaudited"] for w in out["witnesses"])
        for w in out["witnesses"]:
            assert Q(w["value"]) < 0 and len(w["factors"]) == 3

    def test_odot_search_n2(self, run):
        status, out, _ = run("odot-search", "-n", "2", "--trials", "50")
        assert out["summary"] == "no violation in 50 trials" and out["failed_trials"] == 0

    def test_odot_search_rejects_small_n(self, run):
        assert run("odot-search", "-n", "1")[0] == 2

    def test_counterexample(self, run):
        status, out, _ = run("counterexample")
        assert status == 1 and out["volume"] == "-1/20" and out["violates_volume_condition"]
        assert len(out["vertices"]) == 8


def test_output_is_byte_deterministic(tmp_path, capsys):
    texts = []
    for _ in range(2):
        cli.main(["odot-search", "-n", "3", "--trials", "30", "--seed", "1"])
        texts.append(capsys.readouterr().out)
    assert texts[0] == texts[1]
    out = tmp_path / "c.json"
    cli.main(["counterexample", "--output", str(out)])
    assert capsys.readouterr().out == ""
    cli.main(["counterexample"])
    assert out.read_text() == capsys.readouterr().out


def test_rendered_resolutions_parse_back():
    F = DiscreteSpectralResolution(2, U, COUNTEREXAMPLE_Y)
    assert parse_resolution(json.loads(json.dumps(render_resolution(F)))) == F


def test_blockset_schema_errors():
    with pytest.raises(SchemaError) as exc:
        parse_blockset({"blocks": [{"lo": ["0"], "hi": [1.5]}]}, 1)
    assert "blocks[0].hi[0]" in str(exc.value)


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "spectres", "counterexample"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 1 and json.loads(proc.stdout)["volume"] == "-1/20"
