"""Kernel backend selection.

The compiled ``_core`` extension is used when importable, otherwise the
pure-Python ``_purepy`` module. ``use()`` switches explicitly, e.g. for
benchmarks and cross-backend tests.
"""

from __future__ import annotations

import logging
from types import ModuleType

from . import _purepy

log = logging.getLogger(__name__)

try:
    from . import _core as _compiled
except ImportError:  # extension not built
    _compiled = None
    log.info("compiled core unavailable; using pure-Python kernels")

kernels: ModuleType = _compiled if _compiled is not None else _purepy
name: str = "compiled" if _compiled is not None else "python"


def available() -> list[str]:
    return ["compiled", "python"] if _compiled is not None else ["python"]


def use(which: str) -> None:
    global kernels, name
    if which == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled core is not built")
        kernels = _compiled
    elif which == "python":
        kernels = _purepy
    else:
        raise ValueError(f"unknown backend {which!r}")
    name = which
