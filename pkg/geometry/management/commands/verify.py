# geometry/management/commands/verify.py
from __future__ import annotations

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from geometry.verification import SUITES, run_suite


class Command(BaseCommand):
    help = "Run the seeded invariant suites; one PASS/FAIL line per suite, non-zero exit if any fails."

    def add_arguments(self, parser):
        parser.add_argument("--suite", choices=(*SUITES, "all"), default="all")
        parser.add_argument("--seed", type=int, default=None, help="defaults to SYMSPACE_SEED (0)")

    def handle(self, *args, **options):
        seed = options["seed"] if options["seed"] is not None else settings.SYMSPACE["SEED"]
        if seed < 0:
            raise CommandError(f"[verify] seed must be non-negative, got {seed}", returncode=2)
        names = SUITES if options["suite"] == "all" else (options["suite"],)

        failed = []
        for name in names:
            result = run_suite(name, seed)
            status = "PASS" if result.passed else "FAIL"
            self.stdout.write(f"{status} {name} checks={len(result.checks)} seed={seed}")
            for check in result.checks:
                if not check.ok or options["verbosity"] > 1:
                    self.stdout.write(f"  [{name}] {'ok ' if check.ok else 'bad'} {check.label} value={check.value:.3e}")
            if not result.passed:
                failed.append(name)

        if failed:
            raise CommandError(f"[verify] failed suites: {' '.join(failed)}", returncode=1)
