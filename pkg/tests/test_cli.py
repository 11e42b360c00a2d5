import json
import warnings

import numpy as np
import pytest
from numpy.testing import assert_allclose

from chebforge import ChebSeries, catalog
from chebforge.cli import main
from chebforge.errors import PrecisionWarning

from reference_values import EXA_A, SIN8_B


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return np.array([[float(v) for v in line.split(",")]
                     for line in text.strip().splitlines() if not line.startswith("n,")])


class TestExpandInverse:
    @pytest.mark.parametrize("method", ["pf", "recurrence", "truncate"])
    def test_worked_example(self, capsys, method):
        code, out, _ = run(capsys, "expand-inverse", "--monomial", "80,-24,-3,1",
                           "--n-max", "4", "--method", method)
        assert code == 0
        assert_allclose(rows(out)[:, 1], EXA_A, atol=5e-9)

    def test_verify(self, capsys):
        code, _, err = run(capsys, "expand-inverse", "--monomial", "80,-24,-3,1",
                           "--n-max", "30", "--verify")
        assert code == 0 and "verify:" in err

    def test_cheb_input_and_json(self, capsys, tmp_path):
        path = tmp_path / "b.json"
        path.write_text(ChebSeries([8.0, 1.0]).to_json())
        code, out, _ = run(capsys, "expand-inverse", "--input", str(path), "--n-max", "24", "--json")
        assert code == 0
        s = ChebSeries.from_json(out)
        x = np.linspace(-1, 1, 5)
        assert_allclose(s(x), 1 / (4 + x), rtol=1e-14)

    def test_shifted(self, capsys):
        code, out, _ = run(capsys, "expand-inverse", "--monomial", "1,1", "--shifted",
                           "--n-max", "30", "--json")
        s = ChebSeries.from_json(out)
        assert code == 0 and s.basis.value == "Tstar"
        assert s(0.5) == pytest.approx(1 / 1.5, rel=1e-14)

    def test_two_sources_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["expand-inverse", "--monomial", "1,1", "--cheb", "2,1"])
        assert info.value.code == 2

    def test_root_on_interval_exits_one(self, capsys):
        code, _, err = run(capsys, "expand-inverse", "--monomial", "0,1")
        assert code == 1 and "error" in err


class TestDivide:
    def test_round_trip(self, capsys, tmp_path):
        b = ChebSeries([6.0, 1.0, 0.5])
        q = ChebSeries([2.0, 0.3])
        from chebforge import product
        f = product(b, q).padded(9)
        (tmp_path / "f.json").write_text(f.to_json())
        code, out, _ = run(capsys, "divide", "--f", str(tmp_path / "f.json"),
                           "--b", "6,1,0.5", "--N", "8")
        assert code == 0
        got = rows(out)[:, 1]
        assert_allclose(got, np.r_[2.0, 0.3, np.zeros(7)], atol=1e-13)

    def test_n_below_degree(self):
        with pytest.raises(SystemExit) as info:
            main(["divide", "--f", "2", "--b", "4,1,1", "--N", "1"])
        assert info.value.code == 2

    def test_csv_input(self, capsys, tmp_path):
        path = tmp_path / "b.csv"
        path.write_text("n,b_n\n0,3\n1,1\n")
        code, out, _ = run(capsys, "divide", "--f", "2,0,0,0,0", "--b", str(path), "--N", "4")
        assert code == 0
        # unprimed b_0 = 3 is stored as 6, so B = 3 + x
        assert rows(out)[0, 1] == pytest.approx(2 / np.sqrt(8), rel=1e-6)


class TestFits:
    def test_fit_relerr_sin8(self, capsys):
        code, out, err = run(capsys, "fit-relerr", "--catalog", "sinc_pi2", "--k", "8",
                             "--N", "16", "--iters", "4", "--emit-monomial")
        assert code == 0 and "relerr_estimate" in err
        table = rows(out)
        for n, v in SIN8_B.items():
            assert table[n, 1] == pytest.approx(v, rel=1e-10 if abs(v) > 1e-8 else 1e-4)

    def test_precision_warning_toggle(self, capsys, monkeypatch):
        argv = ["fit-relerr", "--catalog", "sinc_pi2", "--k", "16", "--N", "32"]
        with pytest.warns(PrecisionWarning):
            assert main(argv) == 0
        monkeypatch.setenv("CHEB_FORGE_PRECISION_WARN", "0")
        with warnings.catch_warnings():
            warnings.simplefilter("error", PrecisionWarning)
            assert main(argv) == 0
        capsys.readouterr()

    def test_equilibrate(self, capsys):
        code, out, err = run(capsys, "equilibrate", "--catalog", "exp_shifted", "--k", "6",
                             "--N", "18")
        assert code == 0 and "max|R|" in err
        traj = [float(v) for v in err.split("max|R|")[1].splitlines()[0].split("->")]
        assert all(b <= a for a, b in zip(traj, traj[1:]))
        assert rows(out).shape == (7, 2)

    def test_bad_k(self):
        with pytest.raises(SystemExit) as info:
            main(["fit-relerr", "--catalog", "exp_std", "--k", "5", "--N", "4"])
        assert info.value.code == 2

    def test_both_targets(self):
        with pytest.raises(SystemExit) as info:
            main(["fit-relerr", "--catalog", "exp_std", "--f", "2,1", "--k", "1"])
        assert info.value.code == 2


class TestCatalogAndEval:
    def test_list(self, capsys):
        code, out, _ = run(capsys, "catalog", "--list")
        assert code == 0 and out.splitlines()[0].startswith("sinc_pi2,T,")

    def test_values(self, capsys):
        code, out, _ = run(capsys, "catalog", "--name", "exp_std", "--n-max", "10")
        assert code == 0
        assert np.array_equal(rows(out)[:, 1], catalog("exp_std", 10).coeffs)

    def test_unknown_name(self):
        with pytest.raises(SystemExit) as info:
            main(["catalog", "--name", "gamma"])
        assert info.value.code == 2

    def test_output_file(self, capsys, tmp_path):
        path = tmp_path / "out.csv"
        assert main(["catalog", "--name", "atan", "--n-max", "5", "-o", str(path)]) == 0
        assert capsys.readouterr().out == ""
        assert len(path.read_text().splitlines()) == 6

    def test_eval(self, capsys):
        code, out, _ = run(capsys, "eval", "--series", "2,1,0.5", "--x=-1,0,1")
        assert code == 0
        assert_allclose(rows(out)[:, 1], [0.5, 0.5, 2.5])

    def test_eval_outside_domain(self, capsys):
        code, _, err = run(capsys, "eval", "--series", "2,1", "--x", "1.5")
        assert code == 1 and "error" in err


class TestErrorCurve:
    def test_endpoints(self, capsys):
        code, out, _ = run(capsys, "error-curve", "--catalog", "exp_std", "--b", "2.5,1",
                           "--grid", "2", "--exact")
        table = rows(out)
        assert code == 0 and table.shape == (2, 2)
        assert_allclose(table[:, 1], np.exp([-1, 1]) / (1.25 + np.array([-1, 1])) - 1, rtol=1e-14)

    def test_constant_target_equal_to_b(self, capsys):
        code, out, _ = run(capsys, "error-curve", "--f", "4,0.5", "--b", "4,0.5", "--grid", "5")
        assert code == 0 and np.all(rows(out)[:, 1] == 0)

    def test_singular_point(self, capsys):
        code, _, err = run(capsys, "error-curve", "--f", "2", "--b", "0,1", "--x", "0")
        assert code == 1 and "error" in err


class TestDeterminism:
    def test_byte_identical_reruns(self, capsys):
        argv = ["fit-relerr", "--catalog", "j0_pi2", "--k", "10", "--emit-monomial"]
        first = run(capsys, *argv)[1]
        second = run(capsys, *argv)[1]
        assert first == second

    def test_json_document(self, capsys):
        code, out, _ = run(capsys, "catalog", "--name", "exp_shifted", "--n-max", "3", "--json")
        doc = json.loads(out)
        assert code == 0
        assert ChebSeries.from_json(out).basis.value == "Tstar"
        assert isinstance(doc, dict)
