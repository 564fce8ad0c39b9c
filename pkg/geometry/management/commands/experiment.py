# geometry/management/commands/experiment.py
from __future__ import annotations

import time

from django.core.management.base import BaseCommand, CommandError

from geometry.errors import SymspaceError
from geometry.experiments import EXPERIMENTS, STATUS_DIVERGED, ExperimentConfig, ResultRow, run_experiment, write_csv


class Command(BaseCommand):
    help = (
        "Reproduce an order-of-convergence experiment: 'altdir' (alternating directions + Thue-Morse) "
        "or 'stiff' (reaction-diffusion, base / Yoshida / positive-step symmetrization). Writes CSV rows "
        "scheme,level,h,global_error,symmetry_error,status."
    )

    def add_arguments(self, parser):
        parser.add_argument("experiment", choices=EXPERIMENTS)
        parser.add_argument("--grid", type=int, default=None, help="points per dimension")
        parser.add_argument("--L", type=float, default=None, help="half-width of the periodic box")
        parser.add_argument("--delta", type=float, default=None, help="grid spacing (stiff); sets the grid size")
        parser.add_argument("--h", type=float, default=None, help="fixed step of the forward-Euler rows (altdir)")
        parser.add_argument("--rungs", type=int, default=None)
        parser.add_argument("--levels", type=int, default=None)
        parser.add_argument("--tend", type=float, default=None)
        parser.add_argument("--out", required=True)

    def handle(self, *args, **options):
        started = time.monotonic()
        try:
            cfg = ExperimentConfig.from_settings(
                options["experiment"],
                n=options["grid"],
                L=options["L"],
                delta=options["delta"],
                h=options["h"],
                rungs=options["rungs"],
                levels=options["levels"],
                t_end=options["tend"],
                out=options["out"],
            )
        except SymspaceError as e:
            raise CommandError(f"[experiment] {e}", returncode=2) from e

        self.stdout.write(
            f"[experiment] name={cfg.experiment} n={cfg.n} L={cfg.L:g} rungs={cfg.rungs} "
            f"levels={cfg.levels} t_end={cfg.t_end:g} workers={cfg.workers}"
        )
        try:
            rows = run_experiment(cfg)
            path = write_csv(rows, cfg.out, ResultRow)
        except (SymspaceError, OSError) as e:
            raise CommandError(f"[experiment] {e}", returncode=1) from e

        for row in rows:
            if row.status == STATUS_DIVERGED:
                self.stdout.write(f"[experiment] scheme={row.scheme} level={row.level} h={row.h:.6g} status=diverged")
            elif options["verbosity"] > 1:
                self.stdout.write(
                    f"[experiment] scheme={row.scheme} level={row.level} h={row.h:.6g} "
                    f"global={row.global_error:.3e} symmetry={row.symmetry_error:.3e}"
                )
        elapsed = time.monotonic() - started
        self.stdout.write(f"[experiment] rows={len(rows)} out={path} elapsed_s={elapsed:.1f}")
