# geometry/management/commands/polar.py
from __future__ import annotations

from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from geometry.errors import SymspaceError
from geometry.gpd import generalized_polar
from geometry.involutions import parse_involution
from geometry.matio import read_matrix, write_matrix


class Command(BaseCommand):
    help = (
        "Generalized polar decomposition x = p k of the matrix in --input for the involution --sigma; "
        "writes <out>.p and <out>.k and prints residual=<value>."
    )

    def add_arguments(self, parser):
        parser.add_argument("--input", required=True, help="matrix file ('rows cols' header, then rows)")
        parser.add_argument("--sigma", required=True, help="transpose-inverse | conjugate | inner:<r-matrix-file>")
        parser.add_argument("--order", type=int, choices=(1, 2, 3, 4), default=4)
        parser.add_argument("--out", required=True, help="output prefix")

    def handle(self, *args, **options):
        out = Path(options["out"])
        try:
            x = read_matrix(options["input"])
            sigma = parse_involution(options["sigma"])
            factors = generalized_polar(x, sigma, options["order"], warn_norm=settings.SYMSPACE["GPD_WARN_NORM"])
            p_path = write_matrix(out.with_name(out.name + ".p"), factors.p_factor)
            k_path = write_matrix(out.with_name(out.name + ".k"), factors.k_factor)
        except (SymspaceError, OSError) as e:
            raise CommandError(f"[polar] {e}", returncode=1) from e

        if options["verbosity"] > 1:
            self.stderr.write(f"[polar] sigma={sigma.label} order={options['order']} wrote {p_path} {k_path}")
        self.stdout.write(f"residual={factors.residual:.17g}")
