import io
import json
import subprocess
import sys

import numpy as np
import pytest

import raodist as rd
from raodist.cli import dumps, main, parse_hyper
from raodist.oracle import GeodesicPath, path_length


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


class TestDist:
    def test_example(self):
        code, out, _ = run("dist", "--family", "gaussian", "--a", "2,0.5", "--b", "5,1")
        assert code == 0
        assert float(out) == pytest.approx(3.443183448602137, rel=1e-11)
        assert out == "3.4431834486\n"

    def test_json_full_precision(self):
        code, out, _ = run("dist", "--family", "gaussian", "--a", "2,0.5", "--b", "5,1", "--format", "json")
        doc = json.loads(out)
        assert code == 0
        assert doc == {"family": "gaussian", "a": [2.0, 0.5], "b": [5.0, 1.0], "distance": 3.443183448602137}
        assert '"distance": ' + format(3.443183448602137, ".17g") in out

    def test_csv(self):
        _, out, _ = run("dist", "--family", "poisson", "--a", "1", "--b", "4", "--format", "csv")
        assert out.splitlines() == ["distance", "2"]

    def test_domain_error(self):
        code, out, err = run("dist", "--family", "gaussian", "--a", "2,0", "--b", "5,1")
        assert code == 2
        assert out == ""
        assert "sigma must be positive" in err

    def test_negative_leading_coordinate(self):
        code, out, _ = run("dist", "--family", "laplace", "--a", "-1,1", "--b", "1,1")
        assert code == 0
        assert float(out) == pytest.approx(rd.halfplane_distance((-1, 1), (1, 1)), rel=1e-11)

    def test_hyperparameters(self):
        code, out, _ = run("dist", "--family", "binomial", "--hyper", "n=4", "--a", "0.25", "--b", "0.75")
        assert code == 0
        assert float(out) == pytest.approx(2.0943951023932, rel=1e-11)

    def test_simplex_full_vector(self):
        code, out, _ = run("dist", "--family", "categorical", "--a", "0.7,0.2,0.1", "--b", "0.1,0.3,0.6")
        assert code == 0
        assert float(out) == pytest.approx(1.431890810637962, rel=1e-11)

    def test_matrix_json(self):
        code, out, _ = run("dist", "--family", "wishart", "--hyper", "m=2,n=3",
                           "--a-json", "[[1,0],[0,1]]", "--b-json", "[[2,0],[0,0.5]]")
        assert code == 0
        assert float(out) == pytest.approx(1.2005661338529434, rel=1e-11)

    def test_mismatched_sizes(self):
        code, _, err = run("dist", "--family", "categorical", "--a", "0.5,0.5", "--b", "0.2,0.3,0.5")
        assert code == 2
        assert "different manifolds" in err

    @pytest.mark.parametrize("argv,needle", [
        (("dist", "--family", "nope", "--a", "1", "--b", "2"), "unknown"),
        (("dist", "--family", "poisson", "--a", "x", "--b", "2"), "comma-separated reals"),
        (("dist", "--family", "poisson", "--b", "2"), "--a is required"),
        (("dist", "--family", "poisson", "--a", "1", "--b", "2", "--hyper", "oops"), "key=value"),
        (("dist", "--family", "wishart", "--a-json", "[[1,0]", "--b", "1,0,1"), "not valid JSON"),
        (("frobnicate",), "invalid choice"),
    ])
    def test_usage_errors(self, argv, needle):
        code, _, err = run(*argv)
        assert code == 2
        assert needle in err


class TestFisher:
    def test_example(self):
        code, out, _ = run("fisher", "--family", "poisson", "--at", "2")
        assert code == 0
        assert out == "[[0.5]]\n"

    def test_json(self):
        _, out, _ = run("fisher", "--family", "gaussian", "--at", "0,1", "--format", "json")
        assert json.loads(out) == {"family": "gaussian", "at": [0.0, 1.0], "fisher": [[1.0, 0.0], [0.0, 2.0]]}

    def test_csv(self):
        _, out, _ = run("fisher", "--family", "gaussian", "--at", "0,2", "--format", "csv")
        assert out.splitlines() == ["mu,sigma", "0.25,0", "0,0.5"]


class TestGeodesic:
    ARGS = ("geodesic", "--family", "gaussian", "--a", "2,0.5", "--b", "5,1")

    def test_text_rows(self):
        code, out, _ = run(*self.ARGS, "--steps", "4")
        lines = out.splitlines()
        assert code == 0
        assert len(lines) == 5
        assert lines[0].split() == ["0", "2", "0.5"]
        assert lines[-1].split() == ["1", "5", "1"]

    def test_csv_header(self):
        _, out, _ = run(*self.ARGS, "--steps", "3", "--format", "csv")
        lines = out.splitlines()
        assert lines[0] == "t,coord1,coord2"
        assert len(lines) == 5

    def test_json_roundtrip(self):
        _, out, _ = run(*self.ARGS, "--steps", "500", "--format", "json")
        doc = json.loads(out)
        assert doc["steps"] == 500 and doc["coords"] == ["mu", "sigma"]
        assert len(doc["t"]) == len(doc["points"]) == 501
        path = GeodesicPath(rd.get_family(doc["family"]), np.array(doc["points"]))
        _, dist_out, _ = run("dist", "--family", "gaussian", "--a", "2,0.5", "--b", "5,1", "--format", "json")
        assert abs(path_length(path) - json.loads(dist_out)["distance"]) <= 1e-4

    def test_bad_steps(self):
        code, _, err = run(*self.ARGS, "--steps", "0")
        assert code == 2
        assert "steps" in err


class TestVerify:
    def test_quick_subset_passes(self):
        code, out, _ = run("verify", "--quick", "--families", "poisson,gaussian")
        assert code == 0
        assert out.splitlines()[-1] == "all checks passed"
        assert out.startswith("PASS  poisson")

    def test_failure_exit_code(self):
        code, out, _ = run("verify", "--quick", "--families", "poisson", "--tol", "1e-30")
        assert code == 1
        assert "FAIL" in out

    def test_json_deterministic(self):
        argv = ("verify", "--quick", "--families", "exponential,laplace", "--seed", "7", "--format", "json")
        a, b = run(*argv), run(*argv)
        assert a == b
        doc = json.loads(a[1])
        assert doc["seed"] == 7
        assert [e["family"] for e in doc["families"]] == ["exponential", "laplace"]

    def test_env_seed(self, monkeypatch):
        monkeypatch.setenv("RAODIST_SEED", "5")
        _, out, _ = run("verify", "--quick", "--families", "poisson", "--format", "json")
        assert json.loads(out)["seed"] == 5
        monkeypatch.setenv("RAODIST_SEED", "five")
        code, _, err = run("verify", "--quick", "--families", "poisson")
        assert code == 2 and "RAODIST_SEED" in err

    def test_unknown_family_in_subset(self):
        code, _, err = run("verify", "--families", "wishart")
        assert code == 2
        assert "wishart" in err

    def test_csv(self):
        _, out, _ = run("verify", "--quick", "--families", "gumbel", "--format", "csv")
        lines = out.splitlines()
        assert lines[0] == "family,fisher_max_rel_error,bvp_max_rel_error,pass"
        assert lines[1].startswith('"gumbel",') and lines[1].endswith(",true")


class TestTable:
    def test_covers_registry(self):
        _, out, _ = run("table", "--format", "json")
        rows = json.loads(out)["rows"]
        assert len(rows) == len(rd.family_names())
        by_family = {r["family"]: r for r in rows}
        assert by_family["gaussian"]["distance"] == pytest.approx(3.443183448602137, rel=1e-15)
        assert by_family["categorical(categories=3)"]["distance"] == pytest.approx(1.431890810637962, rel=1e-15)
        assert by_family["negative_multinomial(categories=3,x_n=1)"]["distance"] == pytest.approx(2.636638117471909, rel=1e-15)
        assert by_family["geometric"]["distance"] == pytest.approx(1.8458266904983307, rel=1e-15)

    def test_text_and_csv(self):
        code, out, _ = run("table")
        assert code == 0 and len(out.splitlines()) == len(rd.family_names())
        _, out, _ = run("table", "--format", "csv")
        assert out.splitlines()[0] == "family,a,b,distance"


class TestHelpers:
    def test_dumps(self):
        assert dumps({"x": 0.1, "n": 3, "bad": float("nan"), "ok": True}) == '{"x": 0.10000000000000001, "n": 3, "bad": null, "ok": true}'

    def test_parse_hyper(self):
        assert parse_hyper(["n=5", "beta=1.5,name=x"]) == {"n": 5, "beta": 1.5, "name": "x"}


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "raodist", "fisher", "--family", "binomial", "--at", "0.5"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout == "[[4]]\n"


def test_help_exits_zero():
    code, _, _ = run("--help")
    assert code == 0
