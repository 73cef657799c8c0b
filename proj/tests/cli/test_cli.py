"""End-to-end checks of the bsreduce binary: exit codes, report schema,
determinism and the verify verdicts on the sample problems."""

import json
import os
import subprocess
import sys
import tempfile
import unittest
from pathlib import Path

import jsonschema

BINARY = None
ROOT = Path(__file__).resolve().parents[2]
DATA = ROOT / "data" / "problems"
SCHEMAS = ROOT / "schemas"


def load_schema(name):
    schema = json.loads((SCHEMAS / name).read_text())
    return jsonschema.Draft202012Validator(schema)


PROBLEM_SCHEMA = load_schema("problem.schema.json")
REPORT_SCHEMA = load_schema("report.schema.json")


def run(*args, env=None):
    full_env = dict(os.environ)
    if env:
        full_env.update(env)
    proc = subprocess.run([BINARY, *map(str, args)], capture_output=True, text=True, env=full_env)
    return proc


def report(*args, **kw):
    proc = run(*args, **kw)
    data = json.loads(proc.stdout)
    REPORT_SCHEMA.validate(data)
    return proc.returncode, data


def write_problem(obj):
    fd, path = tempfile.mkstemp(suffix=".json")
    with os.fdopen(fd, "w") as f:
        f.write(obj if isinstance(obj, str) else json.dumps(obj))
    return path


VANILLA = {
    "dim": 1,
    "cov": [0.04],
    "rate": 0.05,
    "dividends": [0.0],
    "maturity": 1.0,
    "payoff": "max(S0 - 100, 0)",
    "spots": [100],
}


class SampleFiles(unittest.TestCase):
    def test_samples_match_problem_schema(self):
        for path in DATA.glob("*.json"):
            with self.subTest(path=path.name):
                PROBLEM_SCHEMA.validate(json.loads(path.read_text()))

    def test_reduce_reports(self):
        code, rep = report("reduce", DATA / "product3.json", "--no-meta")
        self.assertEqual(code, 0)
        kinds = [s["kind"] for s in rep["plan"]["steps"]]
        self.assertEqual(kinds, ["product", "product"])
        self.assertEqual(rep["plan"]["final_dim"], 1)

        code, rep = report("reduce", DATA / "rainbow.json", "--no-meta")
        self.assertEqual(code, 0)
        self.assertEqual([s["kind"] for s in rep["plan"]["steps"]], ["numeraire"])
        self.assertEqual(rep["plan"]["final"]["rate"], 0.0)

        code, rep = report("reduce", DATA / "irreducible.json", "--no-meta")
        self.assertEqual(code, 0)
        self.assertEqual(rep["plan"]["steps"], [])
        self.assertEqual(rep["plan"]["final_dim"], 3)

    def test_every_sample_verifies(self):
        for path in sorted(DATA.glob("*.json")):
            extra = ["--from-vols"] if "from_vols" in path.name else []
            with self.subTest(path=path.name):
                code, rep = report("verify", path, "--no-meta", "--paths", "100000", *extra)
                self.assertEqual(code, 0, rep)
                results = rep["results"] if "results" in rep else [rep]
                for r in results:
                    self.assertEqual(r["verdict"], "PASS")

    def test_zero_vol_delta_is_exactly_zero(self):
        code, rep = report("verify", DATA / "zero_vol.json", "--no-meta")
        self.assertEqual(code, 0)
        self.assertEqual(rep["delta"], 0.0)

    def test_basket_closed_against_mc(self):
        _, closed = report("price", DATA / "geometric_basket.json", "--no-meta", "--method=closed")
        _, mc = report("price", DATA / "geometric_basket.json", "--no-meta", "--method=mc",
                       "--paths=1000000", "--seed=7")
        self.assertEqual(closed["pattern"], "power_vanilla")
        self.assertLessEqual(abs(closed["price"] - mc["price"]), 3 * mc["std_error"])

    def test_vasicek_closed_and_fd(self):
        code, rep = report("price", DATA / "vasicek_fx.json", "--no-meta")
        self.assertEqual(code, 0)
        self.assertEqual(rep["pattern"], "vasicek_fx")
        self.assertEqual(run("price", DATA / "vasicek_fx.json", "--method=fd").returncode, 4)

    def test_fd_on_numeraire_reduced_problem(self):
        code, rep = report("price", DATA / "rainbow.json", "--no-meta", "--method=fd", "--grid=200")
        self.assertEqual(code, 0)
        self.assertGreater(rep["grid_error"], 0.0)


class Determinism(unittest.TestCase):
    def test_byte_identical_reports(self):
        args = ("price", DATA / "rainbow.json", "--no-meta", "--method=mc", "--paths=50000", "--seed=3")
        first = run(*args, env={"BSREDUCE_THREADS": "1"})
        second = run(*args, env={"BSREDUCE_THREADS": "3"})
        self.assertEqual(first.returncode, 0)
        self.assertEqual(first.stdout, second.stdout)

    def test_meta_present_by_default(self):
        _, rep = report("reduce", DATA / "zero_vol.json")
        self.assertEqual(rep["meta"]["tool"], "bsreduce")


class NegativeControl(unittest.TestCase):
    def test_forced_alpha_fails(self):
        code, rep = report("verify", DATA / "foreign_strike.json", "--no-meta", "--force-alpha", "1,2")
        self.assertEqual(code, 1)
        self.assertEqual(rep["verdict"], "FAIL")
        self.assertGreater(abs(rep["delta"]), rep["tolerance"])


class ExitCodes(unittest.TestCase):
    def expect(self, problem, code, *args, command="price"):
        path = write_problem(problem)
        try:
            proc = run(command, path, *args)
            self.assertEqual(proc.returncode, code, proc.stderr)
            self.assertEqual(proc.stdout, "")
            self.assertTrue(proc.stderr)
            return proc.stderr
        finally:
            os.unlink(path)

    def test_unknown_key_reports_pointer(self):
        err = self.expect(dict(VANILLA, colour="red"), 2)
        self.assertIn("/colour", err)

    def test_wrong_length_reports_pointer(self):
        err = self.expect(dict(VANILLA, dividends=[0.0, 0.0]), 2)
        self.assertIn("/dividends", err)

    def test_batch_pointer_includes_index(self):
        err = self.expect([VANILLA, dict(VANILLA, maturity=-1)], 2)
        self.assertIn("/1/maturity", err)

    def test_malformed_json_reports_line(self):
        err = self.expect('{"dim": 1,\n "cov": [0.04,]}', 2)
        self.assertIn("line 2", err)

    def test_not_psd(self):
        self.expect(dict(VANILLA, dim=2, cov=[0.04, 0.1, 0.1, 0.04], dividends=[0, 0], spots=[1, 1]), 2)

    def test_payoff_parse(self):
        err = self.expect(dict(VANILLA, payoff="max(S0,"), 3)
        self.assertIn("offset 7", err)
        self.expect(dict(VANILLA, payoff="S16"), 3)
        # A valid symbol beyond dim is a schema problem, not a parse error.
        self.assertIn("/payoff", self.expect(dict(VANILLA, payoff="S9"), 2))

    def test_no_closed_form(self):
        self.expect(json.loads((DATA / "rainbow.json").read_text()), 4)

    def test_numeric_failure(self):
        self.expect(dict(VANILLA, payoff="S0 / (S0 - S0)"), 5, "--method=mc", "--paths=1000")

    def test_missing_spots(self):
        problem = dict(VANILLA)
        del problem["spots"]
        self.expect(problem, 2)

    def test_unreadable_file(self):
        proc = run("reduce", "/nonexistent/problem.json")
        self.assertEqual(proc.returncode, 2)


class Csv(unittest.TestCase):
    def test_batch_csv(self):
        proc = run("price", DATA / "batch.json", "--csv")
        self.assertEqual(proc.returncode, 0)
        lines = proc.stdout.strip().split("\n")
        self.assertEqual(lines[0], "index,name,model,method,price,std_error,grid_error")
        self.assertEqual(len(lines), 5)
        self.assertTrue(lines[1].startswith('0,"foreign stock, dollar strike",gbm,closed,'))


if __name__ == "__main__":
    BINARY = sys.argv.pop(1)
    unittest.main(verbosity=2)
