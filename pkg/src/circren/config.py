"""Default numerical parameters.

All tolerances scale from EPS_BASE so an extended-precision build can
tighten them uniformly by swapping the base.
"""

EPS_BASE = 2.220446049250313e-16  # binary64 machine epsilon

# Chebyshev representation
WORKING_DEGREE = 64
TAIL_TOL = 1e-12
DOMAIN_OVERHANG = 1e-9          # relative overhang allowed at interval ends
BERNSTEIN_RHO = 4.0             # default ellipse parameter for complex eval

# chains
STAGE_COMPAT_TOL = 1e-9         # relative tolerance for stage-image checks
CANON_VALUE_TOL = 1e-10         # relative value drift allowed by canonicalize
NODE_KEEP_TOL = 1e-4            # incoming-interval margin below which a
                                # q-node is kept (near-degenerate path)
NODE_DEGENERATE_TOL = 1e-9      # straddle margin for collision warnings

# rotation
NEAR_RATIONAL_TOL = 1e-12
QK_OVERFLOW_LIMIT = 1 << 62

# pairs
COMMUTATION_TOL = 1e-9
HEIGHT_CAP = 10**6

# speclab
FD_STEP = 1e-5
UNSTABLE_MARGIN = 0.05
DEGREE_SWEEP = (32, 48, 64)
