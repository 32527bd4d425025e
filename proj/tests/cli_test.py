"""Behaviour of the command-line front end: outputs and exit codes."""
import csv
import io
import json
import os
import pathlib
import subprocess
import sys
import unittest

CLI = sys.argv.pop(1)
GOLDEN = pathlib.Path(sys.argv.pop(1))


def run(*args, env=None):
    e = dict(os.environ)
    e.pop("HEUNGAP_TOL", None)
    e.update(env or {})
    return subprocess.run([CLI, *args], capture_output=True, text=True, env=e)


def rows(out):
    return list(csv.DictReader(io.StringIO(out)))


class Symbolic(unittest.TestCase):
    def test_xi_l2(self):
        self.assertEqual(run("xi", "--l", "2,0,0,0").stdout.strip(), "E^2 + 3*E*z + 9*z^2 - (9/4)*g2")

    def test_qpoly(self):
        self.assertEqual(run("qpoly", "--l", "0,0,0,0").stdout.strip(), "E")
        self.assertEqual(run("qpoly", "--l", "1,0,0,0").stdout.strip(), "E^3 - (1/4)*g2*E + (1/4)*g3")

    def test_opA_l2(self):
        self.assertEqual(run("opA", "--l", "2").stdout.strip(),
                         "[1]*D^5 + [-15*z]*D^3 + [-(45/2)*w]*D^2 + [-45*z^2 + (27/4)*g2]*D")

    def test_wkb_golden(self):
        self.assertEqual(run("wkb", "--terms", "4").stdout, (GOLDEN / "wkb_terms.txt").read_text())


class Numeric(unittest.TestCase):
    def test_bands_lame_one(self):
        r = run("bands", "--l", "1,0,0,0", "--lattice", "1,1i", "--grid", "400", "--format", "json")
        self.assertEqual(r.returncode, 0)
        j = json.loads(r.stdout)
        e = sorted(-x[0] for x in j["lattice"]["e"])
        self.assertEqual(len(j["edges"]), 3)
        for a, b in zip(j["edges"], e):
            self.assertLess(abs(a - b), 1e-6)

    def test_bands_csv_columns(self):
        r = rows(run("bands", "--l", "0,0,0,0", "--grid", "50", "--format", "csv").stdout)
        self.assertEqual(list(r[0].keys()), ["E", "trace1", "trace3", "kind"])

    def test_zero_potential_single_edge(self):
        out = run("bands", "--l", "0,0,0,0", "--grid", "400").stdout.split()
        self.assertEqual(out[0], "edge")
        self.assertEqual(len(out), 2)
        self.assertLess(abs(float(out[1])), 1e-6)

    def test_three_way(self):
        r = run("monodromy", "--l", "2", "--E-min", "-6", "--E-max", "9", "--grid", "16", "--check-three-way")
        self.assertEqual(r.returncode, 0, r.stderr)
        r = run("monodromy", "--l", "1", "--E", "2.5", "--check-three-way", env={"HEUNGAP_TOL": "1e-14"})
        self.assertEqual(r.returncode, 3)
        self.assertIn("three-way", r.stderr)

    def test_monodromy_csv_columns(self):
        r = rows(run("monodromy", "--l", "1", "--E", "-3", "--format", "csv").stdout)
        self.assertEqual(list(r[0].keys()), ["E", "k", "re_mult", "im_mult", "method"])
        self.assertEqual(len(r), 6)

    def test_lame_count(self):
        r = rows(run("lame", "--l", "60", "--lattice", "1,1i", "--format", "csv").stdout)
        self.assertEqual(len(r), 121)
        self.assertEqual(list(r[0].keys()), ["l", "E", "family"])

    def test_density_monotone(self):
        r = rows(run("density", "--lattice", "1,1i", "--grid", "200", "--format", "csv").stdout)
        self.assertEqual(len(r), 200)
        n = [float(x["n"]) for x in r]
        self.assertTrue(all(b >= a for a, b in zip(n, n[1:])))

    def test_deterministic(self):
        a = run("monodromy", "--l", "2", "--E-min", "-3", "--E-max", "3", "--grid", "9", "--format", "csv").stdout
        b = run("monodromy", "--l", "2", "--E-min", "-3", "--E-max", "3", "--grid", "9", "--format", "csv").stdout
        self.assertEqual(a, b)


class ExitCodes(unittest.TestCase):
    def test_invalid_config(self):
        for args in (["qpoly", "--l", "1,0,0"], ["qpoly", "--l", "1", "--format", "xml"], ["bands", "--lattice", "1"],
                     ["lame", "--l", "2,1,0,0"], ["xi", "--delta", "0.5+0.5i"], ["nosuch"],
                     ["qpoly", "--config", "/nonexistent.json"]):
            self.assertEqual(run(*args).returncode, 2, args)
        self.assertEqual(run("qpoly", "--l", "1", env={"HEUNGAP_TOL": "-1"}).returncode, 2)

    def test_invariant_failure(self):
        # A delta that violates the M=1 condition has no product solution.
        r = run("xi", "--l", "0,0,0,0", "--delta", "0.3+0.2i", "--E", "0.3")
        self.assertEqual(r.returncode, 3)
        self.assertIn("nullity", r.stderr)


if __name__ == "__main__":
    unittest.main(verbosity=2)
