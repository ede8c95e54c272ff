"""Kernel backend selection.

Two interchangeable implementations of the hot numeric routines exist:
``_core`` (Cython) and ``_ref`` (numpy). The compiled one is preferred
when importable; ``FRAMEPOINT_BACKEND`` overrides the choice:

    auto      compiled when available, else python (default)
    compiled  require the Cython extension, fail otherwise
    python    force the numpy fallback
"""

from __future__ import annotations

import contextlib
import os

from . import _ref
from ..errors import ConfigError

try:
    from . import _core
except ImportError:
    _core = None

_BACKENDS = {"python": _ref}
if _core is not None:
    _BACKENDS["compiled"] = _core


def _initial_backend():
    choice = os.environ.get("FRAMEPOINT_BACKEND", "auto")
    if choice == "auto":
        return _BACKENDS.get("compiled", _ref)
    if choice == "python":
        return _ref
    if choice == "compiled":
        if _core is None:
            raise ImportError(
                "FRAMEPOINT_BACKEND=compiled but the Cython extension "
                "framepoint._kernels._core is not built")
        return _core
    raise ConfigError(f"unknown FRAMEPOINT_BACKEND value: {choice!r}")


_active = _initial_backend()


def active():
    """The currently selected backend module."""
    return _active


def active_name() -> str:
    return _active.backend_name()


def available() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def get_backend(name: str):
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ConfigError(f"unknown kernel backend {name!r}; "
                          f"available: {', '.join(available())}") from None


def set_backend(name: str) -> None:
    global _active
    _active = get_backend(name)


@contextlib.contextmanager
def use_backend(name: str):
    """Temporarily switch the active backend (used by tests and benchmarks)."""
    global _active
    previous = _active
    _active = get_backend(name)
    try:
        yield _active
    finally:
        _active = previous
