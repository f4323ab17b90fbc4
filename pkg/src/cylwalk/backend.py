"""Kernel backend selection.

The compiled extension is preferred when built; the pure-Python twin is the
fallback.  Both implement the same stream protocol, so walk states evolve
bit-identically under either (the return-probability kernel is the one
exception: its compiled and fallback versions are statistically equivalent
but consume their generator differently).  Set CYLWALK_FORCE_PY=1 to force
the fallback, e.g. for benchmarking.
"""

from __future__ import annotations

import os

if os.environ.get("CYLWALK_FORCE_PY"):
    from . import _kernels_py as kernels
else:
    try:
        from . import _kernels as kernels  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as kernels

BACKEND: str = kernels.IMPL

run_steps = kernels.run_steps
walk_until_plane_or_exit = kernels.walk_until_plane_or_exit
z_exit_times = kernels.z_exit_times
count_star_saws = kernels.count_star_saws
q_return_walks = kernels.q_return_walks


def get_backends():
    """All importable kernel backends, for tests and benchmarks."""
    from . import _kernels_py
    out = [_kernels_py]
    try:
        from . import _kernels
        out.append(_kernels)
    except ImportError:
        pass
    return out
