import json

import pytest
from click.testing import CliRunner

from syzkit.cli import main
from syzkit.exterior import Form
from syzkit.fourier import SemiflatPair


@pytest.fixture
def runner():
    return CliRunner()


class TestNilCommand:
    def test_k3_passes_and_writes_fixtures(self, runner, tmp_path):
        out = tmp_path / "nil"
        res = runner.invoke(main, ["nil", "--K", "3", "--out", str(out)])
        assert res.exit_code == 0, res.output
        report = json.loads((out / "nil-K3-report.json").read_text())
        assert report["schema"] == "syzkit-report-v1"
        assert report["passed"] is True
        for name in ("iib-K3.json", "iia-K3.json"):
            doc = json.loads((out / name).read_text())
            assert doc["schema"] == "syzkit-fixture-v1"

    def test_k2_trivial(self, runner):
        res = runner.invoke(main, ["nil", "--K", "2"])
        assert res.exit_code == 0, res.output

    def test_k1_usage_error(self, runner):
        res = runner.invoke(main, ["nil", "--K", "1"])
        assert res.exit_code != 0
        assert "at least 2" in res.output

    def test_reports_byte_identical(self, runner, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert runner.invoke(main, ["nil", "--K", "3", "--out", str(a)]).exit_code == 0
        assert runner.invoke(main, ["nil", "--K", "3", "--out", str(b)]).exit_code == 0
        for name in ("nil-K3-report.json", "iib-K3.json", "iia-K3.json"):
            assert (a / name).read_bytes() == (b / name).read_bytes()


class TestVerifyCommand:
    @pytest.fixture
    def fixtures(self, runner, tmp_path):
        out = tmp_path / "nil"
        assert runner.invoke(main, ["nil", "--K", "3", "--out", str(out)]).exit_code == 0
        return out

    def test_iib_fixture_passes(self, runner, fixtures):
        res = runner.invoke(
            main, ["verify", "--system", "iib", "--input", str(fixtures / "iib-K3.json")]
        )
        assert res.exit_code == 0, res.output

    def test_iia_fixture_passes(self, runner, fixtures):
        res = runner.invoke(
            main, ["verify", "--system", "iia", "--input", str(fixtures / "iia-K3.json")]
        )
        assert res.exit_code == 0, res.output

    def test_broken_fixture_fails_with_witness(self, runner, fixtures, tmp_path):
        doc = json.loads((fixtures / "iib-K3.json").read_text())
        # corrupt one volume-form factor so the volume form is no longer closed
        factor = doc["Omega_factors"][0]
        for term in factor["terms"]:
            term["coeff"]["vars"] = ["r12", "r13", "r23"]
            for t in term["coeff"]["terms"]:
                t["exp"] = [1, 0, 0]
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(doc))
        res = runner.invoke(main, ["verify", "--system", "iib", "--input", str(bad)])
        assert res.exit_code == 1
        assert "d-Omega-vanishes" in res.output

    def test_wrong_schema_rejected(self, runner, tmp_path):
        f = tmp_path / "x.json"
        f.write_text(json.dumps({"schema": "other"}))
        res = runner.invoke(main, ["verify", "--system", "iib", "--input", str(f)])
        assert res.exit_code != 0


class TestFmCommand:
    def test_forward_constant(self, runner, tmp_path):
        pair = SemiflatPair(3)
        src = tmp_path / "one.json"
        src.write_text(json.dumps(Form.scalar(pair.holo_frame, 1).to_json()))
        out = tmp_path / "out.json"
        res = runner.invoke(
            main,
            ["fm", "--input", str(src), "--direction", "fwd", "--n", "3", "--out", str(out)],
        )
        assert res.exit_code == 0, res.output
        got = Form.from_json(json.loads(out.read_text()), pair.frame_x)
        assert got == Form.monomial(pair.frame_x, ["dth1", "dth2", "dth3"], -1)
        assert "fiber legs [3]" in res.output

    def test_round_trip_sign(self, runner, tmp_path):
        pair = SemiflatPair(2)
        m = pair.holo_monomial([1], [2])
        src = tmp_path / "m.json"
        src.write_text(json.dumps(m.to_json()))
        mid = tmp_path / "mid.json"
        assert runner.invoke(
            main, ["fm", "--input", str(src), "--direction", "fwd", "--n", "2", "--out", str(mid)]
        ).exit_code == 0
        back = tmp_path / "back.json"
        assert runner.invoke(
            main, ["fm", "--input", str(mid), "--direction", "back", "--n", "2", "--out", str(back)]
        ).exit_code == 0
        got = Form.from_json(json.loads(back.read_text()), pair.holo_frame)
        assert got == m * pair.fm_roundtrip_sign()

    def test_fiber_dependent_input_rejected(self, runner, tmp_path):
        pair = SemiflatPair(2)
        bad = Form.scalar(pair.holo_frame, 1).to_json()
        bad["terms"] = [
            {
                "gens": [],
                "coeff": {"vars": ["th1"], "terms": [{"exp": [1], "re": [1, 1], "im": [0, 1]}]},
            }
        ]
        src = tmp_path / "bad.json"
        src.write_text(json.dumps(bad))
        res = runner.invoke(main, ["fm", "--input", str(src), "--direction", "fwd", "--n", "2"])
        assert res.exit_code != 0
        assert "non-base" in res.output

    def test_wrong_side_rejected(self, runner, tmp_path):
        pair = SemiflatPair(2)
        src = tmp_path / "x.json"
        src.write_text(json.dumps(Form.gen(pair.frame_x, "dth1").to_json()))
        res = runner.invoke(main, ["fm", "--input", str(src), "--direction", "fwd", "--n", "2"])
        assert res.exit_code != 0


class TestCohomologyCommand:
    def test_mirror_k3(self, runner):
        res = runner.invoke(
            main,
            ["cohomology", "--K", "3", "--which", "mirror", "--p", "1", "--q", "1", "--degree", "1"],
        )
        assert res.exit_code == 0, res.output
        assert "bc=19 ty=19" in res.output

    def test_degree_cap(self, runner):
        res = runner.invoke(
            main,
            ["cohomology", "--K", "3", "--which", "bc", "--p", "1", "--q", "1", "--degree", "99"],
        )
        assert res.exit_code != 0
        assert "cap" in res.output


class TestProptestCommand:
    def test_suite_runs(self, runner):
        res = runner.invoke(main, ["proptest", "--suite", "ring-axioms", "--trials", "20", "--seed", "3"])
        assert res.exit_code == 0, res.output

    def test_reports_byte_identical(self, runner, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for path in (a, b):
            res = runner.invoke(
                main,
                ["proptest", "--suite", "wedge", "--trials", "15", "--seed", "11", "--out", str(path)],
            )
            assert res.exit_code == 0, res.output
        assert a.read_bytes() == b.read_bytes()

    def test_seed_changes_report_config(self, runner, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        runner.invoke(main, ["proptest", "--suite", "wedge", "--trials", "15", "--seed", "1", "--out", str(a)])
        runner.invoke(main, ["proptest", "--suite", "wedge", "--trials", "15", "--seed", "2", "--out", str(b)])
        assert json.loads(a.read_text())["config"]["seed"] == 1
        assert json.loads(b.read_text())["config"]["seed"] == 2
