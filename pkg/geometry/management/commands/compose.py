# geometry/management/commands/compose.py
from __future__ import annotations

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from geometry.errors import SymspaceError
from geometry.experiments import COMPOSE_SCHEMES, ComposeRow, run_compose, write_csv
from geometry.problems import PROBLEMS


class Command(BaseCommand):
    help = (
        "Run a composition scheme over an h-ladder on one of the linear test problems and write "
        "scheme,level,h,global_error,symmetry_error,reversing_error,steps rows as CSV."
    )

    def add_arguments(self, parser):
        conf = settings.SYMSPACE["COMPOSE"]
        parser.add_argument("--scheme", choices=COMPOSE_SCHEMES, required=True)
        parser.add_argument("--levels", type=int, default=conf["LEVELS"])
        parser.add_argument("--problem", choices=tuple(PROBLEMS), default="harmonic")
        parser.add_argument("--hmax", type=float, default=conf["HMAX"])
        parser.add_argument("--rungs", type=int, default=conf["RUNGS"])
        parser.add_argument("--out", required=True)

    def handle(self, *args, **options):
        if options["levels"] < 0 or options["rungs"] < 1:
            raise CommandError("[compose] need --levels >= 0 and --rungs >= 1", returncode=2)
        try:
            rows = run_compose(
                options["problem"],
                options["scheme"],
                levels=options["levels"],
                hmax=options["hmax"],
                rungs=options["rungs"],
                t_end=settings.SYMSPACE["T_END"],
                workers=settings.SYMSPACE["WORKERS"],
            )
            path = write_csv(rows, options["out"], ComposeRow)
        except (SymspaceError, OSError) as e:
            raise CommandError(f"[compose] {e}", returncode=1) from e

        if options["verbosity"] > 1:
            for row in rows:
                self.stdout.write(
                    f"[compose] scheme={row.scheme} level={row.level} h={row.h:.6g} "
                    f"global={row.global_error:.3e} symmetry={row.symmetry_error:.3e}"
                )
        self.stdout.write(f"[compose] rows={len(rows)} out={path}")
