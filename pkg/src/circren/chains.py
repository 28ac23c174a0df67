"""Chains of monotone Chebyshev pieces interleaved with cube-map nodes.

A MapChain represents a composite D_k o q o ... o q o D_0 where every D_i
is an increasing ChebPiece and q(x) = x^3.  Critical points of the
composite come only from q nodes whose incoming interval reaches 0, which
is what makes the representation stable: the smooth pieces stay
diffeomorphisms and the cubic degeneracy is explicit and exact.

Canonical form fixes the scale redundancy around each node (w -> lam*w
before q equals v -> lam^3*v after q) by pinning the incoming interval's
outer endpoint to +1 (or -1 when 0 sits at the right end), and absorbs
nodes whose incoming interval is sign-definite via the real cube root.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, replace

import numpy as np

from . import config
from .chebseries import (
    MONOTONE_INC,
    ChebPiece,
    Interval,
    cheb_affine,
    cheb_derivative,
    cheb_eval,
    cheb_fit,
    identity_piece,
    piece_from_coeffs,
    refit,
    restrict,
)
from .errors import (
    ChainIntegrityError,
    ChainStructureError,
    DomainError,
)


@dataclass(frozen=True)
class QNode:
    """Marker for the cube map q(x) = x^3 between two pieces."""


Q = QNode()


class CollisionWarning(UserWarning):
    """A q-node incoming interval is too close to 0 to resolve safely."""


@dataclass(frozen=True)
class NodeMeta:
    """Per-node record: where (if anywhere) the incoming value crosses 0.

    preimage is the point of the chain domain whose value entering the
    node is 0, i.e. a critical point of the composite; None when the
    incoming interval misses 0.  removable marks sign-definite nodes that
    canonicalization may absorb via the real cube root.
    """

    preimage: float | None
    removable: bool = False
    source: str = ""


@dataclass(frozen=True)
class MapChain:
    stages: tuple
    domain: Interval
    node_meta: tuple

    @property
    def pieces(self):
        return tuple(s for s in self.stages if isinstance(s, ChebPiece))

    @property
    def n_nodes(self) -> int:
        return sum(1 for s in self.stages if isinstance(s, QNode))

    @property
    def image(self) -> Interval:
        lo, hi = self.domain.lo, self.domain.hi
        for s in self.stages:
            if isinstance(s, QNode):
                lo, hi = lo ** 3, hi ** 3
            else:
                lo = float(cheb_eval(s, _clip(lo, s), tol=np.inf))
                hi = float(cheb_eval(s, _clip(hi, s), tol=np.inf))
        return Interval(lo, hi)

    def __call__(self, x, tol=None):
        return chain_eval(self, x, tol=tol)


def _clip(x, piece: ChebPiece):
    return min(max(x, piece.domain.lo), piece.domain.hi)


def _check_alternating(stages):
    if not stages or not isinstance(stages[0], ChebPiece):
        raise ChainStructureError("chain must start with a piece")
    if not isinstance(stages[-1], ChebPiece):
        raise ChainStructureError("chain must end with a piece")
    for i in range(len(stages) - 1):
        a, b = stages[i], stages[i + 1]
        if isinstance(a, QNode) and isinstance(b, QNode):
            raise ChainStructureError(f"adjacent q-nodes at stage {i}")
        if isinstance(a, ChebPiece) and isinstance(b, ChebPiece):
            raise ChainStructureError(f"adjacent pieces at stage {i}")


def _prefix_eval(stages, upto, x):
    """Value entering stage `upto`, inputs clipped to piece domains."""
    w = x
    for s in stages[:upto]:
        if isinstance(s, QNode):
            w = w ** 3
        else:
            w = float(cheb_eval(s, _clip(w, s), tol=np.inf))
    return w


def _prefix_zero(stages, upto, domain):
    """Bisect for the domain point whose value entering stage `upto` is 0."""
    a, b = domain.lo, domain.hi
    fa = _prefix_eval(stages, upto, a)
    if fa >= 0.0:
        return a
    fb = _prefix_eval(stages, upto, b)
    if fb <= 0.0:
        return b
    for _ in range(100):
        m = 0.5 * (a + b)
        if _prefix_eval(stages, upto, m) < 0.0:
            a = m
        else:
            b = m
        if b - a < 4.0 * config.EPS_BASE * max(abs(a), abs(b), 1.0):
            break
    return 0.5 * (a + b)


def _incoming_interval(stages, upto, domain):
    lo = _prefix_eval(stages, upto, domain.lo)
    hi = _prefix_eval(stages, upto, domain.hi)
    return lo, hi


def _compute_node_meta(stages, domain, sources=None):
    metas = []
    j = 0
    for i, s in enumerate(stages):
        if not isinstance(s, QNode):
            continue
        src = sources[j] if sources else ""
        a, b = _incoming_interval(stages, i, domain)
        length = max(b - a, config.EPS_BASE)
        # endpoint values carry rounding noise (amplified by deep
        # renormalization); a gap at the 1e-11 relative level still counts
        # as containing 0
        ztol = 1e-11 * max(length, abs(a), abs(b))
        if a <= ztol and b >= -ztol:
            metas.append(NodeMeta(_prefix_zero(stages, i, domain),
                                  removable=False, source=src))
        else:
            gap = a if a > 0.0 else -b
            metas.append(NodeMeta(None,
                                  removable=gap > config.NODE_KEEP_TOL * length,
                                  source=src))
        j += 1
    return tuple(metas)


def make_chain(stages, validate=True, sources=None, node_meta=None) -> MapChain:
    """Assemble a MapChain, checking alternation and stage compatibility."""
    stages = tuple(stages)
    _check_alternating(stages)
    domain = stages[0].domain
    if validate:
        tol = config.STAGE_COMPAT_TOL * domain.length
        lo, hi = domain.lo, domain.hi
        for i, s in enumerate(stages):
            if isinstance(s, QNode):
                lo, hi = lo ** 3, hi ** 3
                continue
            if s.monotone_flag != MONOTONE_INC:
                raise ChainStructureError(
                    f"piece at stage {i} is not monotone increasing")
            escape = max(s.domain.lo - lo, hi - s.domain.hi, 0.0)
            if escape > tol:
                raise ChainIntegrityError(
                    f"incoming interval [{lo:.6g}, {hi:.6g}] escapes piece "
                    f"domain [{s.domain.lo:.6g}, {s.domain.hi:.6g}] "
                    f"by {escape:.3e}", stage=i)
            lo = float(cheb_eval(s, _clip(lo, s), tol=np.inf))
            hi = float(cheb_eval(s, _clip(hi, s), tol=np.inf))
    if node_meta is None:
        node_meta = _compute_node_meta(stages, domain, sources)
    return MapChain(stages=stages, domain=domain, node_meta=tuple(node_meta))


def identity_chain(domain: Interval) -> MapChain:
    return make_chain([identity_piece(domain)])


def chain_eval(c: MapChain, x, tol=None):
    """Stage-by-stage evaluation; scalar in -> scalar out, arrays pass through.

    Intermediate values may overhang a stage domain by at most `tol`
    (default 1e-9 of the chain domain length); beyond that the stage is
    named in a chain-integrity error.
    """
    if tol is None:
        tol = config.STAGE_COMPAT_TOL * c.domain.length
    w = np.asarray(x, dtype=float)
    scalar = w.ndim == 0
    w = np.atleast_1d(w).copy()
    for i, s in enumerate(c.stages):
        if isinstance(s, QNode):
            w = w ** 3
            continue
        d = np.maximum(s.domain.lo - w, w - s.domain.hi)
        worst = float(np.max(d))
        if worst > tol:
            raise ChainIntegrityError(
                f"value escapes piece domain by {worst:.3e}", stage=i)
        # evaluate without clipping: polynomial continuation is far more
        # accurate than projecting onto the domain boundary
        w = np.atleast_1d(np.asarray(cheb_eval(s, w, tol=np.inf),
                                     dtype=float))
    return float(w[0]) if scalar else w


def chain_derivative_at(c: MapChain, x: float, tol=None) -> float:
    """Chain-rule product of stage derivatives; a q node contributes 3w^2."""
    if tol is None:
        tol = config.STAGE_COMPAT_TOL * c.domain.length
    w = float(x)
    acc = 1.0
    for i, s in enumerate(c.stages):
        if isinstance(s, QNode):
            acc *= 3.0 * w * w
            w = w ** 3
            continue
        d = max(s.domain.lo - w, w - s.domain.hi)
        if d > tol:
            raise ChainIntegrityError(
                f"value escapes piece domain by {d:.3e}", stage=i)
        wc = _clip(w, s)
        acc *= float(cheb_eval(cheb_derivative(s), wc, tol=np.inf))
        w = float(cheb_eval(s, wc, tol=np.inf))
    return acc


def chain_compose(c2: MapChain, c1: MapChain, degree=None,
                  tol=None) -> MapChain:
    """The chain for c2 o c1; adjacent boundary pieces are merged."""
    img = c1.image
    if tol is None:
        tol = config.STAGE_COMPAT_TOL * max(c2.domain.length,
                                            c1.domain.length)
    escape = max(c2.domain.lo - img.lo, img.hi - c2.domain.hi, 0.0)
    if escape > tol:
        raise ChainIntegrityError(
            f"image [{img.lo:.6g}, {img.hi:.6g}] of inner chain escapes "
            f"outer domain [{c2.domain.lo:.6g}, {c2.domain.hi:.6g}] "
            f"by {escape:.3e}")
    inner_last = c1.stages[-1]
    # stored piece domains can be wider than the chart interval the chain
    # actually visits (stages inherited from a larger chain); the merge must
    # only sample the visited part, or the composite leaves c2's domain
    flo = _prefix_eval(c1.stages, len(c1.stages) - 1, c1.domain.lo)
    fhi = _prefix_eval(c1.stages, len(c1.stages) - 1, c1.domain.hi)
    J = Interval(max(flo, inner_last.domain.lo),
                 min(fhi, inner_last.domain.hi))
    if J.length < inner_last.domain.length * (1.0 - 1e-12):
        inner_last = restrict(inner_last, J, degree=inner_last.degree)
    outer_first = c2.stages[0]
    deg = degree if degree is not None else max(inner_last.degree,
                                               outer_first.degree)
    merged = cheb_fit(
        lambda x: cheb_eval(outer_first,
                            cheb_eval(inner_last, x, tol=np.inf),
                            tol=np.inf),
        inner_last.domain, max(deg, 1))
    stages = c1.stages[:-1] + (merged,) + c2.stages[1:]
    sources = ([m.source for m in c1.node_meta]
               + [m.source for m in c2.node_meta])
    out = make_chain(stages, validate=False, sources=sources)
    # trim every stage to the visited chart flow so downstream image-based
    # reasoning (canonical absorption, node classification) sees true ranges
    return chain_restrict(out, out.domain)


def chain_restrict(c: MapChain, J: Interval, degree=None,
                   tol=None) -> MapChain:
    """Same analytic map on J; node preimages that leave J become removable."""
    if tol is None:
        tol = config.DOMAIN_OVERHANG * c.domain.length
    if not c.domain.contains_interval(J, tol):
        raise DomainError(f"{J} not inside chain domain {c.domain}")
    lo, hi = max(J.lo, c.domain.lo), min(J.hi, c.domain.hi)
    stages = []
    for s in c.stages:
        if isinstance(s, QNode):
            stages.append(s)
            lo, hi = lo ** 3, hi ** 3
            continue
        a = max(lo, s.domain.lo)
        b = min(hi, s.domain.hi)
        deg = degree if degree is not None else s.degree
        stages.append(restrict(s, Interval(a, b), degree=deg))
        lo = float(cheb_eval(s, a, tol=np.inf))
        hi = float(cheb_eval(s, b, tol=np.inf))
    sources = [m.source for m in c.node_meta]
    return make_chain(stages, validate=False, sources=sources)


def _absorb(prev: ChebPiece, nxt: ChebPiece, degree=None) -> ChebPiece:
    """Merge (prev, q, nxt) into one piece; incoming must be sign-definite."""
    d1, d2 = prev.degree, nxt.degree
    deg = degree if degree is not None else min(
        max(3 * d1 * max(d2, 1), 4), config.WORKING_DEGREE)

    def composite(x):
        w = np.asarray(cheb_eval(prev, x, tol=np.inf)) ** 3
        w = np.clip(w, nxt.domain.lo, nxt.domain.hi)
        return cheb_eval(nxt, w, tol=np.inf)

    return cheb_fit(composite, prev.domain, deg)


def chain_canonicalize(c: MapChain, degree=None, tol=None) -> MapChain:
    """Canonical form: absorb sign-definite nodes, pin node scales.

    Surviving q nodes get their incoming interval's outer endpoint mapped
    to +1 (or to -1 when 0 sits at the right end) by pushing the commuting
    scalings w -> lam*w / v -> lam^3*v into the neighbouring pieces.
    Values on the domain are preserved; the operation is idempotent.
    """
    probes = np.linspace(c.domain.lo, c.domain.hi, 65)
    before = chain_eval(c, probes, tol=np.inf)

    # pass 1: absorb removable nodes
    stages = list(c.stages)
    out = [stages[0]]
    sources = list(m.source for m in c.node_meta)
    out_sources = []
    src_i = 0
    i = 1
    while i < len(stages):
        node, nxt = stages[i], stages[i + 1]
        prev = out[-1]
        a, b = prev.image.lo, prev.image.hi
        length = max(b - a, config.EPS_BASE)
        ztol = 1e-11 * max(length, abs(a), abs(b))
        src = sources[src_i]
        src_i += 1
        if a <= ztol and b >= -ztol:
            if ztol < min(-a, b) < config.NODE_DEGENERATE_TOL * length:
                warnings.warn(
                    f"q-node incoming interval [{a:.3e}, {b:.3e}] barely "
                    "straddles 0; keeping node (near critical collision)",
                    CollisionWarning)
            out.extend([node, nxt])
            out_sources.append(src)
        else:
            gap = a if a > 0.0 else -b
            if gap > config.NODE_KEEP_TOL * length:
                out[-1] = _absorb(prev, nxt, degree=degree)
            else:
                warnings.warn(
                    f"q-node incoming interval [{a:.3e}, {b:.3e}] misses 0 "
                    f"only by {gap:.3e}; keeping node", CollisionWarning)
                out.extend([node, nxt])
                out_sources.append(src)
        i += 2

    # pass 2: scale-normalize surviving nodes
    for i, s in enumerate(out):
        if not isinstance(s, QNode):
            continue
        prev, nxt = out[i - 1], out[i + 1]
        a, b = prev.image.lo, prev.image.hi
        # the outer endpoint is the one away from 0; picking by magnitude
        # keeps the choice stable when the inner endpoint is perturbed
        # slightly off 0
        lam = b if b >= -a else -a
        if abs(lam - 1.0) < 1e-12:
            continue
        out[i - 1] = cheb_affine(prev, post=(1.0 / lam, 0.0))
        out[i + 1] = cheb_affine(nxt, pre=(lam ** 3, 0.0), degree=nxt.degree)

    if degree is not None:
        out = [refit(s, degree) if isinstance(s, ChebPiece) else s
               for s in out]

    result = make_chain(out, validate=False, sources=out_sources)
    after = chain_eval(result, probes, tol=np.inf)
    rng = max(float(np.max(before) - np.min(before)), config.EPS_BASE)
    drift = float(np.max(np.abs(after - before)))
    if tol is None:
        tol = config.CANON_VALUE_TOL
    if drift > tol * rng:
        raise ChainIntegrityError(
            f"canonicalization drifted values by {drift:.3e} "
            f"(range {rng:.3e})")
    return result


def chain_critical_points(c: MapChain, thread_tol=None):
    """Critical points of the composite: one per q node reached by 0.

    A zero value threading consecutively through k nodes yields a single
    entry of order 3**k (so the two-node collision shows up as order 9).
    """
    img = c.image
    if thread_tol is None:
        thread_tol = 1e-9 * max(img.length, 1.0)
    node_stage = [i for i, s in enumerate(c.stages) if isinstance(s, QNode)]
    consumed = set()
    found = []
    for j, stage_i in enumerate(node_stage):
        if j in consumed:
            continue
        meta = c.node_meta[j]
        if meta.preimage is None:
            continue
        order = 3
        k = j
        i = stage_i
        while k + 1 < len(node_stage) and node_stage[k + 1] == i + 2:
            bridge = c.stages[i + 1]
            v = float(cheb_eval(bridge, _clip(0.0, bridge), tol=np.inf))
            if abs(v) > thread_tol:
                break
            order *= 3
            consumed.add(k + 1)
            k += 1
            i += 2
        found.append((meta.preimage, order))
    return found


def chain_to_triple(c: MapChain):
    """The three diffeo pieces of a canonical two-node chain, inner first."""
    if c.n_nodes != 2:
        raise ChainStructureError(
            f"triple form needs exactly 2 q-nodes, chain has {c.n_nodes}")
    p = c.pieces
    return p[0], p[1], p[2]


def chain_from_triple(p1: ChebPiece, p2: ChebPiece, p3: ChebPiece) -> MapChain:
    return make_chain([p1, Q, p2, Q, p3], validate=False)


def chain_coordinates(c: MapChain, degrees=None) -> np.ndarray:
    """Concatenated Chebyshev coefficients of the pieces (refit per degree)."""
    pieces = c.pieces
    if degrees is None:
        degrees = [p.degree for p in pieces]
    if len(degrees) != len(pieces):
        raise ChainStructureError(
            f"{len(degrees)} degrees given for {len(pieces)} pieces")
    return np.concatenate([refit(p, d).coeffs
                           for p, d in zip(pieces, degrees)])


def chain_from_coordinates(template: MapChain, vec) -> MapChain:
    """Rebuild a chain with the template's structure and new coefficients.

    Piece domains, q-node placement, and node metadata are taken from the
    template; only the coefficients change.  Inverts chain_coordinates
    exactly on the template's own coordinate vector.
    """
    vec = np.asarray(vec, dtype=float)
    sizes = [p.degree + 1 for p in template.pieces]
    if len(vec) != sum(sizes):
        raise ChainStructureError(
            f"coordinate vector has length {len(vec)}, template needs "
            f"{sum(sizes)}")
    chunks = np.split(vec, np.cumsum(sizes)[:-1])
    stages = []
    k = 0
    for s in template.stages:
        if isinstance(s, QNode):
            stages.append(s)
        else:
            stages.append(piece_from_coeffs(s.domain, chunks[k],
                                            ellipse_rho=s.ellipse_rho))
            k += 1
    return MapChain(stages=tuple(stages), domain=stages[0].domain,
                    node_meta=template.node_meta)


def _piece_flip(p: ChebPiece) -> ChebPiece:
    """x -> -p(-x) as an exact coefficient transform (stays increasing)."""
    signs = np.where(np.arange(len(p.coeffs)) % 2 == 0, -1.0, 1.0)
    return piece_from_coeffs(Interval(-p.domain.hi, -p.domain.lo),
                             p.coeffs * signs, ellipse_rho=p.ellipse_rho)


def chain_flip(c: MapChain) -> MapChain:
    """Conjugate by m(x) = -x.  m commutes with q, so nodes survive."""
    stages = tuple(s if isinstance(s, QNode) else _piece_flip(s)
                   for s in c.stages)
    meta = tuple(replace(m, preimage=None if m.preimage is None
                         else -m.preimage)
                 for m in c.node_meta)
    return MapChain(stages=stages, domain=stages[0].domain, node_meta=meta)


def chain_rescale(c: MapChain, lam: float) -> MapChain:
    """Affine conjugation x -> c(lam*x)/lam (zoom by 1/lam around 0).

    Only the outermost pieces change: the first gets the pre-scaling, the
    last the post-scaling, so interior node normalizations survive.
    """
    if lam <= 0.0:
        raise DomainError(f"rescale factor {lam} must be positive")
    stages = list(c.stages)
    if len(stages) == 1:
        stages[0] = cheb_affine(stages[0], pre=(lam, 0.0),
                                post=(1.0 / lam, 0.0),
                                degree=stages[0].degree)
    else:
        stages[0] = cheb_affine(stages[0], pre=(lam, 0.0),
                                degree=stages[0].degree)
        stages[-1] = cheb_affine(stages[-1], post=(1.0 / lam, 0.0))
    meta = tuple(replace(m, preimage=None if m.preimage is None
                         else m.preimage / lam)
                 for m in c.node_meta)
    return MapChain(stages=tuple(stages), domain=stages[0].domain,
                    node_meta=meta)


def chain_translate(c: MapChain, t: float) -> MapChain:
    """Add the constant t to the output (folds a translation into D_k)."""
    last = c.stages[-1]
    coeffs = last.coeffs.copy()
    coeffs[0] += t
    stages = c.stages[:-1] + (piece_from_coeffs(
        last.domain, coeffs, ellipse_rho=last.ellipse_rho),)
    return MapChain(stages=stages, domain=c.domain, node_meta=c.node_meta)


def chain_kernel_arrays(c: MapChain):
    """Flatten to the (types, coeffs, lens, los, his) kernel layout."""
    from . import kernels

    pieces = c.pieces
    coeffs, lens, los, his = kernels.flatten_pieces(pieces)
    types = []
    k = 0
    for s in c.stages:
        if isinstance(s, QNode):
            types.append(-1)
        else:
            types.append(k)
            k += 1
    return np.asarray(types, dtype=np.int64), coeffs, lens, los, his


def chain_to_json(c: MapChain) -> str:
    """Lossless serialization: floats stored as hex strings."""
    stages = []
    for s in c.stages:
        if isinstance(s, QNode):
            stages.append({"type": "q"})
        else:
            stages.append({
                "type": "piece",
                "lo": s.domain.lo.hex(),
                "hi": s.domain.hi.hex(),
                "coeffs": [float(v).hex() for v in s.coeffs],
            })
    meta = [{"preimage": None if m.preimage is None else m.preimage.hex(),
             "removable": m.removable,
             "source": m.source} for m in c.node_meta]
    return json.dumps({"stages": stages, "node_meta": meta})


def chain_from_json(text: str) -> MapChain:
    data = json.loads(text)
    stages = []
    for s in data["stages"]:
        if s["type"] == "q":
            stages.append(Q)
        else:
            dom = Interval(float.fromhex(s["lo"]), float.fromhex(s["hi"]))
            stages.append(piece_from_coeffs(
                dom, [float.fromhex(v) for v in s["coeffs"]]))
    meta = tuple(NodeMeta(
        preimage=None if m["preimage"] is None
        else float.fromhex(m["preimage"]),
        removable=m["removable"], source=m["source"])
        for m in data["node_meta"])
    return MapChain(stages=tuple(stages), domain=stages[0].domain,
                    node_meta=meta)
