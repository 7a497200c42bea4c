"""Step-kernel backend selection.

The hot loop of a run is the per-automaton evaluation of the three rule
maps. Two interchangeable backends implement it: a compiled Cython
extension (_core) and a pure-Python twin (_pure). They are required to
produce bit-identical results; which one runs is decided here, at import.

Set GEOSIM_KERNEL=pure or GEOSIM_KERNEL=compiled to force a backend;
by default the extension is used when it built successfully.
"""

from __future__ import annotations

import os

from geosim.kernels import _pure

try:
    from geosim.kernels import _core
except ImportError:
    _core = None

_forced = os.environ.get("GEOSIM_KERNEL", "").strip().lower()
if _forced == "pure":
    active = _pure
elif _forced == "compiled":
    if _core is None:
        raise ImportError(
            "GEOSIM_KERNEL=compiled but the fast kernel extension is not built")
    active = _core
else:
    active = _core if _core is not None else _pure

BACKEND_NAME = active.NAME
HAVE_COMPILED = _core is not None


def backends() -> dict:
    """Available backends by name (for tests and the benchmark)."""
    out = {"pure": _pure}
    if _core is not None:
        out["compiled"] = _core
    return out


def use(name: str):
    """Switch the active backend in-process; returns the previous name."""
    global active, BACKEND_NAME
    previous = BACKEND_NAME
    active = backends()[name]
    BACKEND_NAME = name
    return previous
