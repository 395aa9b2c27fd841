"""Lower/upper envelope (Baire) operators and graph completion on the
piecewise representation, plus a discrete grid engine approximating them.

On a piece interior the operators reduce to the bound expressions, because
removing finitely many points never changes a one-sided limit of a
continuous piece.  All the work happens at breakpoints, where the operator
value is an exact min/max over the abutting envelope data and, when the
point belongs to the dense set, the stored value itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from . import piecewise as pw
from .errors import DomainError, EngineError, EnvelopeError
from .interval import Interval
from .piecewise import DenseSubsetSpec, HFunction, Piece, SpecialPoint
from .scalars import Scalar, to_scalar

__all__ = [
    "DenseSubsetSpec",
    "lower_baire",
    "upper_baire",
    "graph_completion",
    "fis",
    "fsi",
    "GridFunction",
    "grid_sample",
    "grid_lower",
    "grid_upper",
    "grid_completion",
    "grid_fis",
]


def _with_excluded(f: HFunction, spec: DenseSubsetSpec) -> HFunction:
    for x in spec.excluded:
        if not f.domain.contains(x):
            raise DomainError(f"excluded point {x!r} outside the domain")
    return pw.insert_breakpoints(
        f, [x for x in spec.excluded if f.point_index(x) is None]
    )


def _envelope_function(
    f: HFunction,
    spec: DenseSubsetSpec,
    which: str,
) -> HFunction:
    """Shared body of the lower/upper operators: keep the chosen bound on
    pieces, take min/max over side envelopes (and the point value when the
    point is in the dense set) at breakpoints."""
    g = _with_excluded(f, spec)
    lower = which == "lower"
    points: List[SpecialPoint] = []
    for i, point in enumerate(g.points):
        ll, lr, ul, ur = pw.side_envelopes(g, i)
        if lower:
            candidates = [ll.liminf, lr.liminf]
            if spec.admits(point.x):
                candidates.append(point.value.lo)
            v = min(candidates)
        else:
            candidates = [ul.limsup, ur.limsup]
            if spec.admits(point.x):
                candidates.append(point.value.hi)
            v = max(candidates)
        points.append(SpecialPoint(point.x, Interval(v, v)))
    pieces: List[Piece] = []
    for p in g.pieces:
        if lower:
            pieces.append(
                Piece(p.lo, p.hi, p.lower, p.lower,
                      p.lower_left, p.lower_right, p.lower_left, p.lower_right)
            )
        else:
            pieces.append(
                Piece(p.lo, p.hi, p.upper, p.upper,
                      p.upper_left, p.upper_right, p.upper_left, p.upper_right)
            )
    return pw.normalize(HFunction(g.domain, tuple(points), tuple(pieces)))


def lower_baire(f: HFunction, spec: Optional[DenseSubsetSpec] = None) -> HFunction:
    """Lower envelope operator over the cofinite dense set (default: the
    whole domain).  Real-valued output; equals the lower bound off
    breakpoints."""
    return _envelope_function(f, spec or DenseSubsetSpec.whole(), "lower")


def upper_baire(f: HFunction, spec: Optional[DenseSubsetSpec] = None) -> HFunction:
    """Upper envelope operator, dual to `lower_baire`."""
    return _envelope_function(f, spec or DenseSubsetSpec.whole(), "upper")


def graph_completion(f: HFunction, spec: Optional[DenseSubsetSpec] = None) -> HFunction:
    """Pair the lower and upper operators into an interval-valued function.

    Raises EnvelopeError when inconsistent declared envelopes make the
    completed value inverted."""
    spec = spec or DenseSubsetSpec.whole()
    g = _with_excluded(f, spec)
    points: List[SpecialPoint] = []
    for i, point in enumerate(g.points):
        ll, lr, ul, ur = pw.side_envelopes(g, i)
        lo_candidates = [ll.liminf, lr.liminf]
        hi_candidates = [ul.limsup, ur.limsup]
        if spec.admits(point.x):
            lo_candidates.append(point.value.lo)
            hi_candidates.append(point.value.hi)
        lo, hi = min(lo_candidates), max(hi_candidates)
        if lo > hi:
            raise EnvelopeError(
                f"completion inverted at {point.x!r}: declared envelopes inconsistent"
            )
        points.append(SpecialPoint(point.x, Interval(lo, hi)))
    return pw.normalize(HFunction(g.domain, tuple(points), tuple(g.pieces)))


def fis(f: HFunction) -> HFunction:
    """Graph completion of lower-of-upper: F(I(S(f))).  Always Hausdorff
    continuous; fixes H-continuous inputs."""
    return graph_completion(lower_baire(upper_baire(f)))


def fsi(f: HFunction) -> HFunction:
    """Graph completion of upper-of-lower: F(S(I(f))).  Dual of `fis`."""
    return graph_completion(upper_baire(lower_baire(f)))


# ---------------------------------------------------------------------------
# Grid engine
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GridFunction:
    """Uniform sampling: values[i] is the interval at x0 + i*h."""

    x0: Scalar
    h: Scalar
    values: Tuple[Interval, ...]

    def __post_init__(self):
        if not self.h > 0:
            raise EngineError("grid step must be positive")

    def x(self, i: int) -> Scalar:
        return self.x0 + i * self.h

    def __len__(self) -> int:
        return len(self.values)


def grid_sample(f: HFunction, x0, h, n: int) -> GridFunction:
    x0 = to_scalar(x0)
    h = to_scalar(h)
    if n < 1:
        raise EngineError("need at least one grid node")
    values = []
    for i in range(n):
        x = x0 + i * h
        if not f.domain.contains(x):
            raise DomainError(f"grid node {x!r} outside domain {f.domain!r}")
        values.append(f.eval_at(x))
    return GridFunction(x0, h, tuple(values))


def _stencil(values: Sequence[Interval], i: int) -> Sequence[Interval]:
    lo = max(0, i - 1)
    hi = min(len(values), i + 2)
    return values[lo:hi]


def grid_lower(g: GridFunction) -> GridFunction:
    """One-cell min stencil over lower endpoints (one-sided at the ends)."""
    out = []
    for i in range(len(g.values)):
        v = min(w.lo for w in _stencil(g.values, i))
        out.append(Interval(v, v))
    return GridFunction(g.x0, g.h, tuple(out))


def grid_upper(g: GridFunction) -> GridFunction:
    """One-cell max stencil over upper endpoints."""
    out = []
    for i in range(len(g.values)):
        v = max(w.hi for w in _stencil(g.values, i))
        out.append(Interval(v, v))
    return GridFunction(g.x0, g.h, tuple(out))


def grid_completion(g: GridFunction) -> GridFunction:
    lows = grid_lower(g)
    highs = grid_upper(g)
    out = [Interval(a.lo, b.hi) for a, b in zip(lows.values, highs.values)]
    return GridFunction(g.x0, g.h, tuple(out))


def grid_fis(g: GridFunction) -> GridFunction:
    """Discrete counterpart of `fis`: completion of lower of upper."""
    if len(g.values) < 3:
        raise EngineError("grid_fis needs at least three nodes")
    return grid_completion(grid_lower(grid_upper(g)))
