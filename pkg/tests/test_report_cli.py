"""
Tests for the report format, the artifact files and the command line.
"""

import io
import json
import os
import tempfile
import unittest
from contextlib import redirect_stderr, redirect_stdout
from fractions import Fraction

from weightlab.artifact import ArtifactFile, TREE_SUFFIX, read_points
from weightlab.cli import main, run
from weightlab.config import RunConfig
from weightlab.constant import CheckName, Provenance
from weightlab.errors import ArtifactError
from weightlab.measure import PiecewiseMeasure
from weightlab.report import (PLOTDATA_HEADER, VerificationReport, emit_plotdata, merge_reports, reports_from_dict,
                              reports_to_dict)


def _report(check, passed=True, **parameters):
    report = VerificationReport(check, parameters)
    report.add_constant("constant", Fraction(3, 2))
    report.add_constant("estimate", 0.25, Provenance.QUADRATURE, 1e-9)
    report.add_row(Fraction(3, 2), 13, passed, k=2, p=Fraction(2), depth=1)
    report.passed = passed
    return report


class TestVerificationReport(unittest.TestCase):

    def test_001_00_dict_round_trip(self):
        report = _report(CheckName.CONTMAX, k=2)
        report.note("depth clipped")
        data = json.loads(json.dumps(report.to_dict()))
        self.assertEqual(data["constants"]["constant"]["value"], "3/2")
        self.assertEqual(data["rows"][0]["p"], "2/1")
        back = VerificationReport.from_dict(data)
        self.assertEqual(back.check, CheckName.CONTMAX)
        self.assertEqual(back.constants["constant"].value, Fraction(3, 2))
        self.assertIs(back.constants["estimate"].provenance, Provenance.QUADRATURE)
        self.assertEqual(back.notes, ["depth clipped"])
        self.assertTrue(back.passed)

    def test_001_01_merge_order(self):
        reports = [_report(CheckName.SAWYER, k=4), _report(CheckName.CONTMAX, k=4), _report(CheckName.CONTMAX, k=2)]
        merged = merge_reports(reports)
        self.assertEqual([r.check for r in merged], [CheckName.CONTMAX, CheckName.CONTMAX, CheckName.SAWYER])
        self.assertEqual(merged[0].parameters["k"], 2)

    def test_001_02_suite_dict(self):
        data = reports_to_dict([_report(CheckName.CONTMAX), _report(CheckName.SAWYER, passed=False)])
        self.assertFalse(data["pass"])
        self.assertEqual(len(reports_from_dict(data)), 2)
        self.assertEqual(len(reports_from_dict(_report(CheckName.CONTMAX).to_dict())), 1)

    def test_001_03_plotdata(self):
        self.assertEqual(emit_plotdata([]), ",".join(PLOTDATA_HEADER) + "\n")
        lines = emit_plotdata([_report(CheckName.CONTMAX)]).splitlines()
        self.assertEqual(lines[1], "contmax,2,2/1,1,3/2,13,true")


class TestArtifactFile(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def test_002_00_write_read(self):
        artifact = ArtifactFile(os.path.join(self.tmp.name, "sub", "w.measure.json"))
        self.assertFalse(artifact.exists)
        artifact.write_json({"b": 1, "a": [1, 2]})
        self.assertTrue(artifact.exists)
        self.assertEqual(artifact.read_json(), {"a": [1, 2], "b": 1})
        self.assertEqual(artifact.filetype, ".json")
        self.assertEqual(len(artifact.hashSHA256), 64)
        self.assertTrue(artifact.read().startswith('{\n  "a"'))

    def test_002_01_sibling(self):
        artifact = ArtifactFile(os.path.join(self.tmp.name, "w.measure.json"))
        self.assertEqual(artifact.sibling(TREE_SUFFIX).filename, "w.tree.json")
        self.assertEqual(ArtifactFile("zeros.json").sibling(".csv").filename, "zeros.csv")

    def test_002_02_missing_and_invalid(self):
        missing = ArtifactFile(os.path.join(self.tmp.name, "missing.json"))
        with self.assertRaises(ArtifactError):
            missing.read()
        broken = ArtifactFile(os.path.join(self.tmp.name, "broken.json"))
        broken.write("{not json")
        with self.assertRaises(ArtifactError):
            broken.read_json()

    def test_002_03_read_points(self):
        path = os.path.join(self.tmp.name, "points.csv")
        ArtifactFile(path).write("x\n1/3\n\n0.25,ignored\n")
        self.assertEqual(read_points(path), ["1/3", "0.25"])
        ArtifactFile(path).write("1/3\nabc\n")
        with self.assertRaises(ArtifactError):
            read_points(path)


class TestCommandLine(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def path(self, name):
        return os.path.join(self.tmp.name, name)

    def run_main(self, *argv):
        stdout, stderr = io.StringIO(), io.StringIO()
        with redirect_stdout(stdout), redirect_stderr(stderr):
            code = main(list(argv))
        return code, stdout.getvalue(), stderr.getvalue()

    def test_003_00_build(self):
        out = self.path("w1.measure.json")
        code, _, _ = self.run_main("build", "--k", "1", "--depth", "1", "--out", out)
        self.assertEqual(code, 0)
        measure = PiecewiseMeasure.from_dict(ArtifactFile(out).read_json())
        self.assertEqual(measure.total_mass(), 1)
        tree = ArtifactFile(self.path("w1.tree.json")).read_json()
        self.assertEqual(len(tree["generations"]), 2)

    def test_003_01_build_over_cap(self):
        code, _, stderr = self.run_main("build", "--k", "6", "--depth", "3", "--out", self.path("w.measure.json"))
        self.assertEqual(code, 3)
        self.assertEqual(json.loads(stderr.strip().splitlines()[-1])["error"], "SizeLimit")

    def test_003_02_eval(self):
        measure = self.path("w1.measure.json")
        self.run_main("build", "--k", "1", "--depth", "0", "--out", measure)
        points = self.path("points.csv")
        ArtifactFile(points).write("x\n5/6\n2\n")
        code, stdout, _ = self.run_main("eval", "hilbert", "--measure", measure, "--points", points)
        self.assertEqual(code, 0)
        lines = stdout.splitlines()
        self.assertEqual(lines[0], "x,value,kind,error_bound")
        self.assertEqual(len(lines), 3)

        out = self.path("maximal.csv")
        code, _, _ = self.run_main("eval", "maximal", "--measure", measure, "--points", points, "--out", out)
        self.assertEqual(code, 0)
        rows = ArtifactFile(out).read_csv()
        self.assertEqual(rows[0]["value"], "6/5")

    def test_003_03_eval_maximal_linearizes_every_grid(self):
        measure = self.path("w1.measure.json")
        self.run_main("build", "--k", "1", "--depth", "0", "--out", measure)
        points = self.path("points.csv")
        ArtifactFile(points).write("1/2\n")
        maps = self.path("linearization.json")
        code, _, _ = self.run_main("eval", "maximal", "--measure", measure, "--points", points, "--grid", "full",
                                   "--out", self.path("maximal.csv"), "--linearize", "0", "1",
                                   "--linearize-out", maps)
        self.assertEqual(code, 0)
        data = ArtifactFile(maps).read_json()
        self.assertEqual([m["grid"]["kind"] for m in data], ["dyadic", "shifted"])
        for m in data:
            self.assertEqual(m["Q"], {"a": "0/1", "b": "1/1"})

    def test_003_04_eval_missing_measure(self):
        points = self.path("points.csv")
        ArtifactFile(points).write("1/2\n")
        code, _, _ = self.run_main("eval", "hilbert", "--measure", self.path("none.json"), "--points", points)
        self.assertEqual(code, 2)

    def test_003_05_verify_usage_error(self):
        code, _, stderr = self.run_main("verify", "gliding", "--epsilon", "1/4")
        self.assertEqual(code, 2)
        self.assertIn("epsilon out of range", json.loads(stderr.strip().splitlines()[-1])["message"])

    def test_003_06_cantor_zeros(self):
        out = self.path("zeros.json")
        code, _, _ = self.run_main("cantor", "zeros", "--rmax", "0", "--out", out)
        self.assertEqual(code, 0)
        zeros = ArtifactFile(out).read_json()
        self.assertEqual(len(zeros), 1)
        self.assertAlmostEqual(zeros[0]["est"], 0.5, places=8)

    def test_003_07_verify_and_report(self):
        report_path = self.path("report.json")
        plotdata = self.path("plot.csv")
        code, _, _ = self.run_main("verify", "theorem6", "--r", "1", "--T", "1", "--json", report_path,
                                   "--plotdata", plotdata)
        self.assertEqual(code, 0)
        data = ArtifactFile(report_path).read_json()
        self.assertTrue(data["pass"])
        self.assertEqual(data["reports"][0]["check"], "theorem6")

        code, stdout, _ = self.run_main("report", report_path)
        self.assertEqual(code, 0)
        self.assertEqual(stdout, ArtifactFile(plotdata).read())

    def test_003_08_run_config(self):
        report_path = self.path("run.json")
        config = RunConfig("verify", r=(1,), T=1, json_out=report_path, extra={"checks": ["theorem6"]})
        with redirect_stderr(io.StringIO()):
            self.assertEqual(run(config), 0)
        self.assertEqual(ArtifactFile(report_path).read_json()["config"]["T"], 1)

    def test_003_09_run_unknown_check(self):
        stderr = io.StringIO()
        with redirect_stderr(stderr):
            code = run(RunConfig("verify", extra={"checks": ["nosuch"]}))
        self.assertEqual(code, 2)
        self.assertEqual(json.loads(stderr.getvalue().strip().splitlines()[-1])["error"], "UsageError")


if __name__ == '__main__':
    unittest.main()
