import unittest
import os
import sys
import io
import json
import tempfile
from contextlib import redirect_stdout

import numpy as np

# add core/ to the python path
core_path = os.path.join(os.path.dirname(os.path.abspath(__file__)), '..', 'core')
sys.path.append(core_path)
from cli import ExitCode, exit_code_for, main
from linac.exception import NilpotentPartDetected, NotDicritical, SpecFormatError, SuspectWeights
from linac.poly import PolyMap
from linac.spec_io import load_linearizer

SAMPLES = os.path.join(os.path.dirname(os.path.abspath(__file__)), '..', 'samples')
SHEAR_PLUS = PolyMap(2, [{(1, 0): 1}, {(0, 1): 1, (3, 0): 1}])


def sample(name: str) -> str:
    return os.path.join(SAMPLES, f"{name}.json")


def run(*argv: str) -> tuple[int, str]:
    out = io.StringIO()
    with redirect_stdout(out):
        code = main(list(argv))
    return code, out.getvalue()


class TestExitCodes(unittest.TestCase):
    def test_mapping(self):
        test_cases = [
            (SpecFormatError("x"), ExitCode.INPUT_ERROR),
            (SuspectWeights("x"), ExitCode.WEIGHTS_ERROR),
            (NilpotentPartDetected("x"), ExitCode.WEIGHTS_ERROR),
            (NotDicritical("x"), ExitCode.NUMERICS_FAILURE),
            (RuntimeError("x"), None),
        ]
        for exc, expected in test_cases:
            with self.subTest(exc=type(exc).__name__):
                self.assertEqual(exit_code_for(exc), expected)


class TestCheckAndClassify(unittest.TestCase):
    def test_check(self):
        test_cases = [
            ("e1", ExitCode.OK, "PASS"),
            ("e1_shifted", ExitCode.OK, "PASS"),
            ("broken_grouplaw", ExitCode.CHECK_FAILED, "FAIL"),
            ("not_periodic", ExitCode.CHECK_FAILED, "FAIL"),
        ]
        for name, expected, verdict in test_cases:
            with self.subTest(spec=name):
                code, out = run("check", sample(name))
                self.assertEqual(code, expected)
                self.assertTrue(out.startswith(verdict), out)

    def test_check_json(self):
        code, out = run("check", sample("e1"), "--json")
        self.assertEqual(code, ExitCode.OK)
        report = json.loads(out)
        self.assertEqual(report["command"], "check")
        self.assertEqual(report["schema_version"], 1)
        self.assertTrue(report["validation"]["passed"])

    def test_classify(self):
        test_cases = [
            ("e1", ExitCode.OK, "Dicritical(Positive)"),
            ("negative_e1", ExitCode.OK, "Dicritical(Negative)"),
            ("hyperbolic", ExitCode.OK, "MixedSigns"),
            ("zero_weight", ExitCode.OK, "ZeroWeight"),
        ]
        for name, expected, text in test_cases:
            with self.subTest(spec=name):
                code, out = run("classify", sample(name))
                self.assertEqual(code, expected)
                self.assertIn(text, out)

    def test_classify_jordan(self):
        code, _ = run("classify", sample("jordan"))
        self.assertEqual(code, ExitCode.WEIGHTS_ERROR)

    def test_classify_report_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "report.json")
            code, _ = run("classify", sample("e1"), "--report", path)
            self.assertEqual(code, ExitCode.OK)
            with open(path, encoding="utf-8") as f:
                report = json.load(f)
        self.assertEqual(report["weights"]["weights"], [1, 2])
        self.assertEqual(report["classification"], {"tag": "Dicritical", "sign": "Positive"})


class TestInputErrors(unittest.TestCase):
    def test_truncated_file(self):
        with open(sample("e1"), encoding="utf-8") as f:
            text = f.read()
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "truncated.json")
            with open(path, "w", encoding="utf-8") as f:
                f.write(text[: len(text) // 2])
            code, _ = run("check", path)
        self.assertEqual(code, ExitCode.INPUT_ERROR)

    def test_missing_file(self):
        code, _ = run("check", os.path.join(SAMPLES, "does_not_exist.json"))
        self.assertEqual(code, ExitCode.INPUT_ERROR)

    def test_usage_error(self):
        code, _ = run("check", sample("e1"), "--no-such-flag")
        self.assertEqual(code, ExitCode.INPUT_ERROR)

    def test_symbolic_backend_on_vector_field(self):
        code, _ = run("linearize", sample("euler_cubic"), "--backend", "symbolic")
        self.assertEqual(code, ExitCode.INPUT_ERROR)


class TestLinearizeVerifyExtend(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def path(self, name: str) -> str:
        return os.path.join(self.tmp.name, name)

    def test_symbolic_linearizer_file(self):
        code, out = run("linearize", sample("e1"), "--out", self.path("f.json"))
        self.assertEqual(code, ExitCode.OK)
        self.assertIn("conjugacy max residual", out)
        f = load_linearizer(self.path("f.json"))
        self.assertLessEqual(f.polymap.max_coefficient_distance(SHEAR_PLUS), 1e-12)
        self.assertEqual(f.weights.weights, (1, 2))

        code, out = run("verify", sample("e1"), "--linearizer", self.path("f.json"))
        self.assertEqual(code, ExitCode.OK)
        self.assertTrue(out.startswith("PASS"), out)

    def test_linearizer_on_stdout(self):
        code, out = run("linearize", sample("inverse_cubic"))
        self.assertEqual(code, ExitCode.OK)
        document = json.loads(out)
        self.assertEqual(document["kind"], "polymap")
        self.assertEqual(document["weights"], [1, 2])

    def test_broken_action_is_not_linearized(self):
        code, _ = run("linearize", sample("broken_grouplaw"))
        self.assertEqual(code, ExitCode.CHECK_FAILED)

    def test_verify_rejects_wrong_linearizer(self):
        run("linearize", sample("inverse_cubic"), "--out", self.path("wrong.json"))
        code, out = run("verify", sample("e1"), "--linearizer", self.path("wrong.json"))
        self.assertEqual(code, ExitCode.CHECK_FAILED)
        self.assertTrue(out.startswith("FAIL"), out)

    def test_numeric_backend_report(self):
        code, _ = run("linearize", sample("euler_cubic"), "--samples", "10", "--out", self.path("f.json"),
                      "--report", self.path("report.json"))
        self.assertEqual(code, ExitCode.OK)
        with open(self.path("report.json"), encoding="utf-8") as f:
            report = json.load(f)
        self.assertEqual(report["provenance"]["backend"], "numeric")
        self.assertEqual(report["fit"]["max_degree"], 3)
        self.assertLessEqual(report["conjugacy"]["max_residual"], 1e-6)
        f = load_linearizer(self.path("f.json"))
        inverse_shear = PolyMap(2, [{(1, 0): 1}, {(0, 1): 1, (3, 0): -1}])
        self.assertLessEqual(f.polymap.max_coefficient_distance(inverse_shear), 1e-7)

    def test_extend(self):
        run("linearize", sample("e1"), "--out", self.path("f.json"))
        code, out = run("extend", sample("e1"), "--linearizer", self.path("f.json"),
                        "--points", sample("extend_points"))
        self.assertEqual(code, ExitCode.OK)
        records = json.loads(out)
        self.assertEqual(len(records), 3)
        first = records[0]
        self.assertEqual(first["y"], [[2.0, 0.0], [3.0, 0.0]])
        np.testing.assert_allclose(np.array(first["value"]), [[2, 0], [11, 0]], atol=1e-9)
        np.testing.assert_allclose(first["witness_z"], [0, 0.2], atol=1e-15)

    def test_extend_mixed_signs(self):
        run("linearize", sample("hyperbolic"), "--out", self.path("f.json"))
        code, _ = run("extend", sample("hyperbolic"), "--linearizer", self.path("f.json"),
                      "--points", sample("extend_points"))
        self.assertEqual(code, ExitCode.NUMERICS_FAILURE)

    def test_extend_classifies_the_action_not_the_file(self):
        # a dicritical linearizer file cannot make a mixed-sign action extendable
        run("linearize", sample("e1"), "--out", self.path("f.json"))
        code, out = run("extend", sample("hyperbolic"), "--linearizer", self.path("f.json"),
                        "--points", sample("extend_points"))
        self.assertEqual(code, ExitCode.NUMERICS_FAILURE)
        self.assertEqual(out, "")

    def test_extend_rejects_foreign_weights(self):
        run("linearize", sample("e1"), "--out", self.path("f.json"))
        code, _ = run("extend", sample("negative_e1"), "--linearizer", self.path("f.json"),
                      "--points", sample("extend_points"))
        self.assertEqual(code, ExitCode.INPUT_ERROR)

    def test_extend_point_beyond_schedule(self):
        run("linearize", sample("linear"), "--out", self.path("f.json"))
        with open(self.path("far.json"), "w", encoding="utf-8") as f:
            json.dump({"points": [[[1e150, 0], [0, 0]], [[2, 0], [3, 0]]]}, f)
        code, out = run("extend", sample("linear"), "--linearizer", self.path("f.json"),
                        "--points", self.path("far.json"))
        self.assertEqual(code, ExitCode.NUMERICS_FAILURE)
        records = json.loads(out)
        self.assertEqual(len(records), 1)
        np.testing.assert_allclose(np.array(records[0]["value"]), [[2, 0], [3, 0]], atol=1e-9)


class TestOrbit(unittest.TestCase):
    def test_csv(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "orbit.csv")
            code, _ = run("orbit", sample("e1"), "--x0", "0.5", "0.25", "--through", "1,0", "--per-leg", "4",
                          "--out", path)
            self.assertEqual(code, ExitCode.OK)
            with open(path, encoding="utf-8", newline="") as f:
                lines = f.read().split("\n")
        self.assertEqual(lines[0], "t,re(x1),im(x1),re(x2),im(x2)")
        self.assertEqual(len([line for line in lines if line]), 6)
        self.assertEqual([float(v) for v in lines[1].split(",")], [0.0, 0.5, 0.0, 0.25, 0.0])

    def test_wrong_dimension(self):
        code, _ = run("orbit", sample("e1"), "--x0", "0.5", "--through", "1")
        self.assertEqual(code, ExitCode.INPUT_ERROR)


if __name__ == '__main__':
    unittest.main()
