import json

import pytest

from cmctori.cli import main
from cmctori.jsonio import dumps, format_float


@pytest.fixture
def g1_file(tmp_path):
    p = tmp_path / "g1.json"
    p.write_text('{"genus": 1, "etas": [[0.5, 0.0]]}\n')
    return str(p)


@pytest.fixture
def g0_file(tmp_path):
    p = tmp_path / "g0.json"
    p.write_text('{"genus": 0, "etas": []}\n')
    return str(p)


class TestJsonIO:
    def test_float_formatting_roundtrip(self):
        for x in (0.1, 1.0 / 3.0, 2.5, -1.0, 4.0 * 2.0**-52):
            assert float(json.loads(format_float(x))) == x

    def test_deterministic_dumps(self):
        doc = {"b": [1.0, 2.5], "a": {"z": True, "y": None}}
        assert dumps(doc) == dumps(dict(reversed(doc.items())))

    def test_specials(self):
        assert format_float(float("nan")) == '"nan"'
        assert format_float(float("inf")) == '"inf"'


class TestCurveInfo:
    def test_genus_zero(self, g0_file, capsys):
        assert main(["curve-info", g0_file]) == 0
        out = capsys.readouterr().out
        doc = json.loads(out)
        assert doc["genus"] == 0
        assert doc["a_coefficients"] == [[1.0, 0.0]]
        assert doc["valid"] is True

    def test_genus_one_polynomial(self, g1_file, capsys):
        assert main(["curve-info", g1_file]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["a_coefficients"] == [[-1.0, 0.0], [2.5, -0.0], [-1.0, 0.0]]

    def test_invalid_root_exit_2(self, tmp_path, capsys):
        p = tmp_path / "bad.json"
        p.write_text('{"genus": 1, "etas": [[1.0, 0.0]]}\n')
        assert main(["curve-info", str(p)]) == 2

    def test_malformed_json_exit_2(self, tmp_path):
        p = tmp_path / "broken.json"
        p.write_text("{oops")
        assert main(["curve-info", str(p)]) == 2


class TestClassify:
    def test_regular_exit_0(self, g1_file, capsys):
        assert main(["classify", g1_file]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["in_R"] is True and doc["in_S"] is False
        assert doc["config"]["tol_S"] == 1e-8

    def test_genus0_residue_value(self, g0_file, capsys):
        assert main(["classify", g0_file]) == 0
        doc = json.loads(capsys.readouterr().out)
        re, im = doc["residue_sum"]
        assert abs(re) < 1e-12 and abs(im + 0.5) < 1e-12


class TestDeform:
    def test_alpha_off_circle_exit_2(self, g0_file):
        assert main(["deform", g0_file, "--alpha", "0.5,0.0"]) == 2

    def test_t_zero_exit_2(self, g0_file):
        assert main(["deform", g0_file, "--alpha", "1.0,0.0", "--t-seq", "0.1,0.0"]) == 2

    def test_genus0_ladder(self, g0_file, tmp_path, capsys):
        out = tmp_path / "fam.json"
        csv = tmp_path / "fam.csv"
        code = main(
            ["deform", g0_file, "--alpha", "1.0,0.0",
             "--t-seq", "0.2,0.1,0.05,0.025",
             "--out", str(out), "--csv", str(csv)]
        )
        assert code == 0
        doc = json.loads(out.read_text())
        assert abs(doc["target"][1] - 0.5) < 1e-12  # +i/2
        assert doc["limit_error"] < 1e-4
        header = csv.read_text().splitlines()[0]
        assert header.startswith("t,residue_re,residue_im")
        assert (tmp_path / "fam.json.meta.json").exists()


class TestSearch:
    def test_g0_immediate(self, tmp_path, capsys):
        out = tmp_path / "cert.json"
        assert main(["search", "--g", "0", "--seed", "1", "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert doc["residual"] < 1e-10
        assert doc["m1"] == [1, 0] and doc["m2"] == [0, 1]

    def test_deterministic_bytes(self, tmp_path):
        a = tmp_path / "a.json"
        b = tmp_path / "b.json"
        args = ["search", "--g", "1", "--Q", "8", "--seed", "11"]
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_certificate_revalidates_from_file(self, tmp_path):
        from cmctori.search import revalidate_certificate

        out = tmp_path / "cert.json"
        assert main(["search", "--g", "1", "--Q", "8", "--seed", "11",
                     "--out", str(out)]) == 0
        data = json.loads(out.read_text())
        cert = revalidate_certificate(data)
        assert cert.residual < 1e-8

    def test_not_found_exit_5(self, tmp_path, capsys):
        # Q = 1 at genus 3 from a fixed start: nothing certifiable nearby
        code = main(
            ["search", "--g", "3", "--Q", "1", "--seed", "0",
             "--etas", "0.5,0.0;-0.4,0.2;0.1,-0.55"]
        )
        assert code == 5


class TestVerify:
    def test_suite_filter(self, capsys):
        assert main(["verify", "--suite", "polyalg"]) == 0
        out = capsys.readouterr().out
        assert "polyalg.star_involution" in out
        assert "limits." not in out

    def test_corrupted_fixture_named_failure(self, tmp_path, capsys):
        p = tmp_path / "corrupt.json"
        p.write_text('{"genus": 1, "etas": [[0.99999999, 0.0]]}\n')
        code = main(["verify", "--suite", "file", "--curve", str(p)])
        out = capsys.readouterr().out
        assert code == 1
        assert "[FAIL] file.invariants" in out

    def test_good_curve_check(self, g1_file, capsys):
        assert main(["verify", "--suite", "file", "--curve", g1_file]) == 0
        assert "[PASS] file.invariants" in capsys.readouterr().out
