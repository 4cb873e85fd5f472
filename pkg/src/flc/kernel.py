"""Search-kernel backend selection.

The compiled extension (flc._speedups) and the pure-Python module
(flc._kernel_py) implement the same algorithm; the compiled one is picked
when importable.  Set FLC_KERNEL=py or FLC_KERNEL=c to force a backend.
"""

from __future__ import annotations

import os

from . import _kernel_py

SAT = _kernel_py.SAT
UNSAT = _kernel_py.UNSAT
LIMIT = _kernel_py.LIMIT

try:
    from . import _speedups  # type: ignore[attr-defined]
except ImportError:
    _speedups = None


def available_backends() -> tuple[str, ...]:
    return ("py", "c") if _speedups is not None else ("py",)


def get_backend(name: str = "auto"):
    """Return the kernel module for the requested backend name."""
    if name == "auto":
        name = os.environ.get("FLC_KERNEL", "auto")
    if name in ("auto", "c"):
        if _speedups is not None:
            return _speedups
        if name == "c":
            raise RuntimeError("compiled kernel requested but not built")
        return _kernel_py
    if name == "py":
        return _kernel_py
    raise ValueError(f"unknown kernel backend {name!r}")


def backend_name(module) -> str:
    return "c" if module is _speedups and _speedups is not None else "py"
