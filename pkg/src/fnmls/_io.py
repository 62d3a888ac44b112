"""Output helpers shared by the reports and the command line."""

from __future__ import annotations

import os
import tempfile


def fmt(x) -> str:
    """17 significant digits, enough for an exact float round trip."""
    return format(float(x), ".17g")


def atomic_write(path, text: str):
    """Write via a temporary file in the same directory and rename."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
