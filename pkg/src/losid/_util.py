"""Small internal helpers: atomic file writes and float formatting."""

from __future__ import annotations

import os
import tempfile


def fmt_float(x: float) -> str:
    """Shortest decimal string that round-trips the float exactly."""
    return repr(float(x))


def atomic_write_text(path: str | os.PathLike, text: str) -> None:
    """Write ``text`` to ``path`` via a temp file + rename.

    Either the complete file appears at ``path`` or nothing does; a failure
    mid-write never leaves a truncated output behind.
    """
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp_", suffix="~")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
