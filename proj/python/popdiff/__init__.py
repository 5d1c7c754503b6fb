"""Popular differences for matrix patterns: exact desk-scale computations.

The native module covers a few direct entry points; everything else goes
through :func:`run`, which drives the command-line tool in process and
returns its JSON-lines reports.
"""

import json
from fractions import Fraction

from ._popdiff import (
    PopdiffError,
    TooLarge,
    __version__,
    bohr_set,
    check,
    core_table,
    is_prime,
)
from ._popdiff import run as _run

__all__ = [
    "CommandFailed",
    "PopdiffError",
    "TooLarge",
    "__version__",
    "bohr_set",
    "check",
    "core_table",
    "is_prime",
    "rational",
    "run",
]


class CommandFailed(RuntimeError):
    """The tool exited 1 (usage, IO or guard error)."""

    def __init__(self, code, stderr):
        super().__init__(stderr.strip() or f"exit code {code}")
        self.code = code
        self.stderr = stderr


def run(*args, check_assertions=False):
    """Run a subcommand, e.g. ``run("cex", "core")``, and return its reports.

    Exit code 2 (a checked statement failed) still returns the reports unless
    ``check_assertions`` is set.
    """
    code, out, err = _run([str(a) for a in args])
    if code == 1 or (code == 2 and check_assertions):
        raise CommandFailed(code, err)
    return [json.loads(line) for line in out.splitlines() if line]


def rational(text):
    """Parse a "num/den" report value."""
    return Fraction(text)
