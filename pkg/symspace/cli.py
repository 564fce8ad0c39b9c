"""
`symspace` command line: a thin front over Django's management commands.

    symspace polar      --input <file> --sigma <id> --order <1..4> --out <prefix>
    symspace verify     --suite {matcore|involutions|series|gpd|flows|all} [--seed <u64>]
    symspace compose    --scheme {scovel|tm|yoshida|selfadjoint} ...
    symspace experiment {altdir|stiff} ... --out <csv>

Exit codes: 0 ok, 1 numerical-domain error, 2 usage error.
"""
from __future__ import annotations

import os
import sys
from typing import List, Optional

SUBCOMMANDS = ("polar", "verify", "compose", "experiment")

_USAGE = (
    "usage: symspace {polar|verify|compose|experiment} [options]\n"
    "       symspace <subcommand> --help\n"
)


def cli_main(argv: Optional[List[str]] = None) -> int:
    """
    Dispatch to a management command and return its exit code instead of
    letting SystemExit escape.
    """
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'symspace.settings')
    args = list(sys.argv[1:] if argv is None else argv)

    if not args or args[0] in ("-h", "--help", "help"):
        sys.stderr.write(_USAGE)
        return 0 if args else 2
    if args[0] not in SUBCOMMANDS:
        sys.stderr.write(f"symspace: unknown subcommand {args[0]!r}\n{_USAGE}")
        return 2

    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "symspace needs Django to run its commands; install the packages "
            "listed in requirements.txt into the interpreter running symspace."
        ) from exc

    try:
        execute_from_command_line(["symspace", *args])
    except SystemExit as exc:
        code = exc.code
        if code is None:
            return 0
        if isinstance(code, int):
            return code
        sys.stderr.write(f"{code}\n")
        return 1
    return 0


def main() -> None:
    sys.exit(cli_main())
