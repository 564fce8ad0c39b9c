import contextlib
import csv
import io
import os
import sys
import tempfile
from pathlib import Path
from unittest import mock

import numpy as np
from django.core.exceptions import ImproperlyConfigured
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from geometry.matcore import expm, fro
from geometry.matio import read_matrix, write_matrix
from symspace import settings as project_settings
from symspace.cli import cli_main

GENERIC = 0.01 * np.array([[0.5, -1.0, 2.0], [1.5, 0.2, -0.7], [-0.3, 0.8, 1.1]])


class PolarCommandTests(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)
        self.x = expm(GENERIC)
        write_matrix(self.dir / "x.txt", self.x)

    def tearDown(self):
        self.tmp.cleanup()

    def test_writes_factors_and_residual(self):
        out = io.StringIO()
        call_command(
            "polar",
            input=str(self.dir / "x.txt"),
            sigma="transpose-inverse",
            order=4,
            out=str(self.dir / "run"),
            stdout=out,
        )
        line = out.getvalue().strip()
        self.assertTrue(line.startswith("residual="))
        self.assertLessEqual(float(line.split("=", 1)[1]), 1e-6)

        p = read_matrix(self.dir / "run.p")
        k = read_matrix(self.dir / "run.k")
        self.assertLess(fro(p - p.T), 1e-12)
        self.assertLess(fro(k.T @ k - np.eye(3)), 1e-12)
        self.assertLess(fro(p @ k - self.x), 1e-6)

    def test_bad_sigma(self):
        with self.assertRaises(CommandError) as ctx:
            call_command(
                "polar", input=str(self.dir / "x.txt"), sigma="rotation", out=str(self.dir / "run"), stdout=io.StringIO()
            )
        self.assertEqual(ctx.exception.returncode, 1)

    def test_missing_input(self):
        with self.assertRaises(CommandError) as ctx:
            call_command(
                "polar",
                input=str(self.dir / "absent.txt"),
                sigma="transpose-inverse",
                out=str(self.dir / "run"),
                stdout=io.StringIO(),
            )
        self.assertEqual(ctx.exception.returncode, 1)


class VerifyCommandTests(SimpleTestCase):
    def test_single_suite(self):
        out = io.StringIO()
        call_command("verify", suite="matcore", seed=0, stdout=out)
        self.assertTrue(out.getvalue().startswith("PASS matcore"))

    def test_negative_seed(self):
        with self.assertRaises(CommandError) as ctx:
            call_command("verify", suite="matcore", seed=-1, stdout=io.StringIO())
        self.assertEqual(ctx.exception.returncode, 2)


class ComposeCommandTests(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def _rows(self, path):
        with open(path, newline="", encoding="utf-8") as fh:
            return list(csv.DictReader(fh))

    def test_scovel_on_harmonic(self):
        path = self.dir / "scovel.csv"
        out = io.StringIO()
        call_command("compose", scheme="scovel", problem="harmonic", rungs=3, out=str(path), stdout=out)
        self.assertIn("rows=3", out.getvalue())
        with open(path, encoding="utf-8") as fh:
            self.assertEqual(
                fh.readline().strip(), "scheme,level,h,global_error,symmetry_error,reversing_error,steps"
            )
        rows = self._rows(path)
        self.assertEqual(len(rows), 3)
        for row in rows:
            self.assertNotEqual(row["reversing_error"], "")

    def test_tm_on_linear_sym_has_no_reversing_column(self):
        path = self.dir / "tm.csv"
        call_command(
            "compose", scheme="tm", problem="linear-sym", levels=1, rungs=2, out=str(path), stdout=io.StringIO()
        )
        rows = self._rows(path)
        self.assertEqual(len(rows), 4)
        self.assertTrue(all(row["reversing_error"] == "" for row in rows))

    def test_bad_ladder(self):
        with self.assertRaises(CommandError) as ctx:
            call_command("compose", scheme="tm", rungs=0, out=str(self.dir / "x.csv"), stdout=io.StringIO())
        self.assertEqual(ctx.exception.returncode, 2)


class ExperimentCommandTests(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def test_config_error_is_usage_error(self):
        with self.assertRaises(CommandError) as ctx:
            call_command("experiment", "altdir", grid=2, out=str(self.dir / "x.csv"), stdout=io.StringIO())
        self.assertEqual(ctx.exception.returncode, 2)

    def test_small_altdir_run(self):
        path = self.dir / "altdir.csv"
        out = io.StringIO()
        call_command("experiment", "altdir", grid=16, h=0.05, levels=1, rungs=2, out=str(path), stdout=out)
        self.assertIn("[experiment] name=altdir n=16", out.getvalue())
        self.assertIn("rows=6", out.getvalue())
        lines = path.read_text(encoding="utf-8").splitlines()
        self.assertEqual(lines[0], "scheme,level,h,global_error,symmetry_error,status")
        self.assertEqual(len(lines), 7)


class CliTests(SimpleTestCase):
    def _run(self, argv):
        with contextlib.redirect_stderr(io.StringIO()), contextlib.redirect_stdout(io.StringIO()):
            return cli_main(argv)

    def test_usage_exit_codes(self):
        self.assertEqual(self._run([]), 2)
        self.assertEqual(self._run(["--help"]), 0)
        self.assertEqual(self._run(["bogus"]), 2)

    def test_bad_option_is_usage_error(self):
        self.assertEqual(self._run(["compose", "--bogus"]), 2)

    def test_missing_input_exits_one(self):
        with tempfile.TemporaryDirectory() as tmp:
            root = Path(tmp)
            argv = ["polar", "--input", str(root / "absent.txt"), "--sigma", "transpose-inverse", "--out", str(root / "o")]
            self.assertEqual(self._run(argv), 1)

    def test_missing_django_names_requirements(self):
        with mock.patch.dict(sys.modules, {"django.core.management": None}):
            with self.assertRaises(ImportError) as ctx:
                cli_main(["verify"])
        self.assertIn("requirements.txt", str(ctx.exception))


class SettingsTests(SimpleTestCase):
    def test_seed_from_environment(self):
        with mock.patch.dict(os.environ, {"SYMSPACE_SEED": " 42 "}):
            self.assertEqual(project_settings._env_seed(), 42)
        with mock.patch.dict(os.environ, {"SYMSPACE_SEED": ""}):
            self.assertEqual(project_settings._env_seed(), 0)

    def test_invalid_seed_is_improperly_configured(self):
        with mock.patch.dict(os.environ, {"SYMSPACE_SEED": "forty-two"}):
            with self.assertRaises(ImproperlyConfigured):
                project_settings._env_seed()
