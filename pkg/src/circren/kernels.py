"""Kernel dispatch: prefer the compiled extension, fall back to Python.

Both implementations expose the same functions and the test suite runs
the fallback against the compiled module when it is available.
"""

import numpy as np

try:
    from . import _kernels as _impl
except ImportError:  # pragma: no cover - depends on build environment
    from . import _kernels_py as _impl

from . import _kernels_py as pure

IMPL = _impl.IMPL

lift_step = _impl.lift_step
orbit_fill = _impl.orbit_fill
orbit_delta_count = _impl.orbit_delta_count
chain_eval_scalar = _impl.chain_eval_scalar
glued_orbit_count = _impl.glued_orbit_count


def flatten_pieces(pieces):
    """Pack ChebPiece objects into the flat arrays the kernels take.

    Returns (coeffs, lens, los, his); stage type arrays are built by the
    caller since they reference piece indices.
    """
    n = len(pieces)
    maxlen = max(len(p.coeffs) for p in pieces)
    coeffs = np.zeros((n, maxlen), dtype=np.float64)
    lens = np.zeros(n, dtype=np.int64)
    los = np.zeros(n, dtype=np.float64)
    his = np.zeros(n, dtype=np.float64)
    for i, p in enumerate(pieces):
        coeffs[i, :len(p.coeffs)] = p.coeffs
        lens[i] = len(p.coeffs)
        los[i] = p.domain.lo
        his[i] = p.domain.hi
    return coeffs, lens, los, his
