"""Piecewise symbolic representation of interval-valued functions on an
open 1-D interval.

A function is held as finitely many *special points* carrying interval
values, with closed-form continuous pieces between them.  Every piece end
abutting a special point (or a finite domain boundary) stores a one-sided
limit envelope: the liminf/limsup of the bound expression as it approaches
the end.  Envelopes are what the lower/upper envelope operators read at
special points; they are computed as true limits where evaluation allows,
estimated by geometric sampling otherwise, and may be overridden by
declarations (subject to `validate_envelopes`).

Special points may carry width-0 values: a breakpoint whose value matches
both abutting limits is pruned by normalization when the neighbouring
expressions merge, which gives a canonical form and decidable equality.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from . import expr as ex
from . import interval as iv
from .errors import (
    DomainError,
    EngineError,
    EnvelopeError,
    ExprEvalError,
    PieceError,
    RepresentationError,
)
from .interval import Interval
from .scalars import (
    FLOAT,
    RATIONAL,
    Scalar,
    get_mode,
    get_seed,
    get_tolerance,
    scalar_eq,
    to_scalar,
)

EVALUATED = "evaluated"
DECLARED = "declared"
ESTIMATED = "estimated"
_PROV_RANK = {EVALUATED: 0, DECLARED: 1, ESTIMATED: 2}

# Window half-width used when a sampled check meets an unbounded piece end.
_INF_WINDOW = 8


@dataclass(frozen=True)
class Domain:
    """Open interval (lo, hi); None stands for an infinite end."""

    lo: Optional[Scalar]
    hi: Optional[Scalar]

    def __post_init__(self):
        if self.lo is not None and self.hi is not None and not self.lo < self.hi:
            raise EngineError("domain must satisfy lo < hi")

    def contains(self, x: Scalar) -> bool:
        if self.lo is not None and not self.lo < x:
            return False
        if self.hi is not None and not x < self.hi:
            return False
        return True

    def __repr__(self) -> str:
        lo = "-inf" if self.lo is None else repr(self.lo)
        hi = "inf" if self.hi is None else repr(self.hi)
        return f"({lo}, {hi})"

    @staticmethod
    def of(lo, hi) -> "Domain":
        return Domain(
            None if lo is None else to_scalar(lo),
            None if hi is None else to_scalar(hi),
        )


def domain_eq(a: Domain, b: Domain) -> bool:
    for x, y in ((a.lo, b.lo), (a.hi, b.hi)):
        if (x is None) != (y is None):
            return False
        if x is not None and not scalar_eq(x, y):
            return False
    return True


@dataclass(frozen=True)
class EndEnvelope:
    """One-sided limiting range (liminf, limsup) of one bound expression."""

    liminf: Scalar
    limsup: Scalar
    provenance: str = EVALUATED

    def __post_init__(self):
        if self.liminf > self.limsup:
            raise EnvelopeError(
                f"envelope liminf {self.liminf!r} above limsup {self.limsup!r}"
            )
        if self.provenance not in _PROV_RANK:
            raise EngineError(f"unknown provenance {self.provenance!r}")

    @property
    def is_point(self) -> bool:
        return self.liminf == self.limsup

    @property
    def is_exact_limit(self) -> bool:
        """True when the data asserts an actual one-sided limit."""
        return self.is_point and _PROV_RANK[self.provenance] <= 1


@dataclass(frozen=True)
class Piece:
    """Continuous piece on the open subinterval (lo, hi).

    ``lower`` and ``upper`` are the bound expressions (equal trees for
    real-valued pieces).  The four envelope slots are the (liminf, limsup)
    of each bound at each end; None is allowed only at infinite ends.
    """

    lo: Optional[Scalar]
    hi: Optional[Scalar]
    lower: ex.Expr
    upper: ex.Expr
    lower_left: Optional[EndEnvelope]
    lower_right: Optional[EndEnvelope]
    upper_left: Optional[EndEnvelope]
    upper_right: Optional[EndEnvelope]

    @property
    def is_real(self) -> bool:
        return self.lower == self.upper

    @property
    def kind(self) -> str:
        """Coarser of the two bounds' classes: polynomial, rational, or
        transcendental."""
        order = ("polynomial", "rational", "transcendental")
        lo = ex.classify(self.lower)
        hi = lo if self.is_real else ex.classify(self.upper)
        return max(lo, hi, key=order.index)

    def eval(self, x: Scalar) -> Interval:
        lo = ex.eval_finite(self.lower, x)
        if self.lower == self.upper:
            return Interval(lo, lo)
        hi = ex.eval_finite(self.upper, x)
        # proper pieces may suffer tiny float inversions; order defensively
        return Interval(min(lo, hi), max(lo, hi))


@dataclass(frozen=True)
class SpecialPoint:
    x: Scalar
    value: Interval


@dataclass(frozen=True)
class HFunction:
    """Interval-valued function: sorted special points and covering pieces.

    len(pieces) == len(points) + 1 and consecutive boundaries agree; all
    special points are interior to the domain.
    """

    domain: Domain
    points: Tuple[SpecialPoint, ...]
    pieces: Tuple[Piece, ...]

    def __post_init__(self):
        if len(self.pieces) != len(self.points) + 1:
            raise EngineError("pieces must cover domain minus special points")
        bounds = [self.domain.lo] + [p.x for p in self.points] + [self.domain.hi]
        for i in range(1, len(self.points) + 1):
            if bounds[i - 1] is not None and not bounds[i - 1] < bounds[i]:
                raise EngineError("special points must be strictly increasing")
            if bounds[i + 1] is not None and not bounds[i] < bounds[i + 1]:
                raise EngineError("special points must be interior to the domain")
        for i, piece in enumerate(self.pieces):
            if _bound_ne(piece.lo, bounds[i]) or _bound_ne(piece.hi, bounds[i + 1]):
                raise EngineError("piece boundaries must chain through the points")

    @property
    def breakpoints(self) -> Tuple[Scalar, ...]:
        return tuple(p.x for p in self.points)

    def point_index(self, x: Scalar) -> Optional[int]:
        for i, p in enumerate(self.points):
            if scalar_eq(p.x, x):
                return i
        return None

    def piece_at(self, x: Scalar) -> Piece:
        for piece in self.pieces:
            above = piece.lo is None or piece.lo < x
            below = piece.hi is None or x < piece.hi
            if above and below:
                return piece
        raise DomainError(f"{x!r} not interior to any piece")

    def eval_at(self, x) -> Interval:
        x = to_scalar(x)
        if not self.domain.contains(x):
            raise DomainError(f"{x!r} outside domain {self.domain!r}")
        idx = self.point_index(x)
        if idx is not None:
            return self.points[idx].value
        return self.piece_at(x).eval(x)

    @property
    def is_piecewise_linear(self) -> bool:
        return all(
            ex.is_linear(p.lower) and ex.is_linear(p.upper) for p in self.pieces
        )


def _bound_ne(a: Optional[Scalar], b: Optional[Scalar]) -> bool:
    if (a is None) != (b is None):
        return True
    return a is not None and a != b


class FunctionSet(dict):
    """Named collection of functions over one common domain.

    A plain mapping str -> HFunction that refuses mixed domains, which is
    the precondition for aligning and combining its members.
    """

    def __init__(self, functions):
        super().__init__(functions)
        domains = [f.domain for f in self.values()]
        for d in domains[1:]:
            if not domain_eq(domains[0], d):
                raise EngineError("function set members must share a domain")

    @property
    def domain(self) -> Domain:
        if not self:
            raise EngineError("empty function set has no domain")
        return next(iter(self.values())).domain


@dataclass(frozen=True)
class DenseSubsetSpec:
    """Cofinite dense subset of the domain: everything except ``excluded``."""

    excluded: Tuple[Scalar, ...] = ()

    @staticmethod
    def whole() -> "DenseSubsetSpec":
        return DenseSubsetSpec(())

    @staticmethod
    def excluding(*points) -> "DenseSubsetSpec":
        coerced = sorted(to_scalar(p) for p in points)
        deduped: List[Scalar] = []
        for p in coerced:
            if not deduped or p != deduped[-1]:
                deduped.append(p)
        return DenseSubsetSpec(tuple(deduped))

    @property
    def is_whole(self) -> bool:
        return not self.excluded

    def admits(self, x: Scalar) -> bool:
        return all(not scalar_eq(x, p) for p in self.excluded)


# ---------------------------------------------------------------------------
# Envelope computation
# ---------------------------------------------------------------------------


def _poly_eval(coeffs: Sequence[Fraction], a):
    out = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        out = out * a + c
    return out


def _synthetic_div(coeffs: Sequence[Fraction], a: Fraction) -> List[Fraction]:
    """Divide a polynomial by (x - a), assuming a is a root."""
    rev = list(reversed(list(coeffs)))
    quotient: List[Fraction] = []
    acc = Fraction(0)
    for c in rev[:-1]:
        acc = acc * a + c
        quotient.append(acc)
    return list(reversed(quotient))


def rational_limit_at(e: ex.Expr, at: Scalar) -> Optional[Scalar]:
    """Exact one-sided limit of a rational expression at a finite point,
    cancelling removable singularities; None when the value diverges."""
    rc = ex.rational_coeffs(e)
    if rc is None:
        return None
    num, den = [list(c) for c in rc]
    a = Fraction(at) if not isinstance(at, float) else Fraction(str(at))
    while _poly_eval(den, a) == 0 and _poly_eval(num, a) == 0:
        if den == [Fraction(0)] or num == [Fraction(0)]:
            break
        num = _synthetic_div(num, a) if len(num) > 1 else num
        den = _synthetic_div(den, a) if len(den) > 1 else den
        if len(num) == 0 or len(den) == 0:
            return None
    dval = _poly_eval(den, a)
    if dval == 0:
        return None
    value = _poly_eval(num, a) / dval
    return value if get_mode() == RATIONAL else float(value)


def one_sided_envelope(
    e: ex.Expr,
    at: Optional[Scalar],
    side: str,
    reach: Scalar,
) -> Optional[EndEnvelope]:
    """Envelope of ``e`` approaching ``at`` from inside the piece.

    ``side`` is "-" when the piece lies left of the end and "+" when it lies
    right.  ``reach`` bounds how far into the piece sampling may step.  An
    exact limit gives an evaluated envelope; otherwise geometric sampling
    gives an estimated one.  Returns None for a diverging infinite end.
    """
    if at is None:
        return _envelope_at_infinity(e, side)
    limit = rational_limit_at(e, at)
    if limit is not None:
        return EndEnvelope(limit, limit, EVALUATED)
    if ex.rational_coeffs(e) is not None:
        return None  # genuine pole at the end
    try:
        value = ex.eval_finite(e, at)
        return EndEnvelope(value, value, EVALUATED)
    except ExprEvalError:
        pass
    samples = _approach_samples(e, at, side, reach)
    if not samples:
        return None
    return EndEnvelope(min(samples), max(samples), ESTIMATED)


def _approach_samples(e: ex.Expr, at: Scalar, side: str, reach: Scalar, steps: int = 48):
    sign = -1 if side == "-" else 1
    base = min(to_scalar(1), reach / 2) if reach is not None else to_scalar(1)
    out = []
    step = base
    for _ in range(steps):
        step = step / 2
        try:
            out.append(ex.eval_finite(e, at + sign * step))
        except ExprEvalError:
            continue
    return out[steps // 3 :] if len(out) > steps // 3 else out


def _envelope_at_infinity(e: ex.Expr, side: str) -> Optional[EndEnvelope]:
    limit = ex.limit_at_infinity(e, -1 if side == "-" else 1)
    if limit is not None:
        value = limit if get_mode() == RATIONAL else float(limit)
        return EndEnvelope(value, value, EVALUATED)
    if ex.rational_coeffs(e) is not None:
        return None  # polynomial growth, no finite envelope
    if get_mode() == RATIONAL:
        return None
    sign = -1 if side == "-" else 1
    try:
        value = ex.eval_finite(e, sign * float("inf"))
        return EndEnvelope(value, value, EVALUATED)
    except (ExprEvalError, OverflowError):
        pass
    samples = []
    for k in range(4, 44):
        try:
            samples.append(ex.eval_finite(e, sign * float(2**k)))
        except ExprEvalError:
            continue
    if not samples:
        return None
    tail = samples[len(samples) // 2 :]
    return EndEnvelope(min(tail), max(tail), ESTIMATED)


def _declared_env(data) -> Optional[EndEnvelope]:
    if data is None:
        return None
    liminf, limsup = data
    return EndEnvelope(to_scalar(liminf), to_scalar(limsup), DECLARED)


def make_piece(
    lo: Optional[Scalar],
    hi: Optional[Scalar],
    lower: ex.Expr,
    upper: Optional[ex.Expr] = None,
    declared_left=None,
    declared_right=None,
) -> Piece:
    """Build a piece, canonicalizing expressions and filling envelopes.

    ``declared_left``/``declared_right`` are optional (liminf, limsup)
    pairs; they override the computed envelopes of both bounds, which is
    exact for real-valued pieces and a sound enclosure otherwise.
    """
    lower_c = ex.canonical(lower)
    upper_c = lower_c if upper is None else ex.canonical(upper)
    reach = _reach(lo, hi)
    left_declared = _declared_env(declared_left)
    right_declared = _declared_env(declared_right)
    lower_left = left_declared or one_sided_envelope(lower_c, lo, "+", reach)
    upper_left = (
        left_declared
        or (lower_left if upper_c == lower_c else one_sided_envelope(upper_c, lo, "+", reach))
    )
    lower_right = right_declared or one_sided_envelope(lower_c, hi, "-", reach)
    upper_right = (
        right_declared
        or (lower_right if upper_c == lower_c else one_sided_envelope(upper_c, hi, "-", reach))
    )
    return Piece(
        lo, hi, lower_c, upper_c, lower_left, lower_right, upper_left, upper_right
    )


def _reach(lo: Optional[Scalar], hi: Optional[Scalar]) -> Scalar:
    if lo is None or hi is None:
        return to_scalar(2 * _INF_WINDOW)
    return hi - lo


# ---------------------------------------------------------------------------
# Construction and validation
# ---------------------------------------------------------------------------


def hfunction(
    domain: Domain,
    points: Sequence[Tuple[Scalar, Interval]],
    pieces: Sequence[Piece],
    validate: bool = True,
) -> HFunction:
    f = HFunction(
        domain,
        tuple(SpecialPoint(x, v) for x, v in points),
        tuple(pieces),
    )
    if validate:
        validate_function(f)
    return f


def validate_function(f: HFunction, samples_per_piece: int = 64) -> None:
    """Sampled representation checks: pieces evaluable and finite (no poles
    inside), lower <= upper pointwise, interior envelopes present."""
    tol = get_tolerance() if get_mode() == FLOAT else 0
    for i, piece in enumerate(f.pieces):
        for bound in {id(piece.lower): piece.lower, id(piece.upper): piece.upper}.values():
            for den in ex.div_denominators(bound):
                coeffs = ex.poly_coeffs(den)
                if coeffs is not None and ex.count_poly_roots_inside(
                    coeffs, piece.lo, piece.hi
                ):
                    raise PieceError(
                        f"denominator {ex.to_text(den)} vanishes inside "
                        f"({piece.lo!r}, {piece.hi!r})"
                    )
        for x in _span_samples(piece.lo, piece.hi, samples_per_piece, tag=("validate", i)):
            try:
                lo_raw = ex.eval_finite(piece.lower, x)
                hi_raw = lo_raw if piece.is_real else ex.eval_finite(piece.upper, x)
            except ExprEvalError as exc:
                raise PieceError(
                    f"piece on ({piece.lo!r}, {piece.hi!r}) not evaluable at {x!r}: {exc}"
                ) from exc
            if lo_raw > hi_raw + tol:
                raise PieceError(
                    f"lower bound above upper bound at {x!r} on piece "
                    f"({piece.lo!r}, {piece.hi!r})"
                )
        left_interior = i > 0
        right_interior = i < len(f.pieces) - 1
        if left_interior and (piece.lower_left is None or piece.upper_left is None):
            raise EnvelopeError("missing envelope at an interior special point")
        if right_interior and (piece.lower_right is None or piece.upper_right is None):
            raise EnvelopeError("missing envelope at an interior special point")


def _span_samples(
    lo: Optional[Scalar], hi: Optional[Scalar], count: int, tag
) -> List[Scalar]:
    """Deterministic pseudo-random points strictly inside (lo, hi)."""
    a, b = _finite_window(lo, hi)
    rng = random.Random(f"{get_seed()}|{tag!r}")
    out = []
    for _ in range(count):
        u = Fraction(rng.getrandbits(30) + 1, 2**30 + 2)
        if get_mode() == RATIONAL:
            out.append(a + (b - a) * u)
        else:
            out.append(float(a) + float(b - a) * float(u))
    return out


def _finite_window(lo: Optional[Scalar], hi: Optional[Scalar]) -> Tuple[Scalar, Scalar]:
    w = to_scalar(_INF_WINDOW)
    if lo is None and hi is None:
        return -w, w
    if lo is None:
        return hi - 2 * w, hi
    if hi is None:
        return lo, lo + 2 * w
    return lo, hi


def constant_function(domain: Domain, value) -> HFunction:
    if not isinstance(value, Interval):
        value = Interval.point(value)
    piece = make_piece(domain.lo, domain.hi, ex.const(value.lo), ex.const(value.hi))
    return hfunction(domain, [], [piece], validate=False)


# ---------------------------------------------------------------------------
# Breakpoint insertion and alignment
# ---------------------------------------------------------------------------


def insert_breakpoint(f: HFunction, x: Scalar) -> HFunction:
    """Split the covering piece at x, storing the evaluated point value.
    No-op when x is already a special point."""
    x = to_scalar(x)
    if not f.domain.contains(x):
        raise DomainError(f"{x!r} outside domain {f.domain!r}")
    if f.point_index(x) is not None:
        return f
    new_points: List[SpecialPoint] = []
    new_pieces: List[Piece] = []
    inserted = False
    for i, piece in enumerate(f.pieces):
        above = piece.lo is None or piece.lo < x
        below = piece.hi is None or x < piece.hi
        if above and below and not inserted:
            v_lo = ex.eval_finite(piece.lower, x)
            v_hi = v_lo if piece.is_real else ex.eval_finite(piece.upper, x)
            value = Interval(min(v_lo, v_hi), max(v_lo, v_hi))
            env_lo = EndEnvelope(v_lo, v_lo, EVALUATED)
            env_hi = env_lo if piece.is_real else EndEnvelope(v_hi, v_hi, EVALUATED)
            left = Piece(
                piece.lo, x, piece.lower, piece.upper,
                piece.lower_left, env_lo, piece.upper_left, env_hi,
            )
            right = Piece(
                x, piece.hi, piece.lower, piece.upper,
                env_lo, piece.lower_right, env_hi, piece.upper_right,
            )
            new_pieces.extend([left, right])
            new_points.append(SpecialPoint(x, value))
            inserted = True
        else:
            new_pieces.append(piece)
        if i < len(f.points):
            new_points.append(f.points[i])
    if not inserted:
        raise DomainError(f"no piece covers {x!r}")
    return HFunction(f.domain, tuple(new_points), tuple(new_pieces))


def insert_breakpoints(f: HFunction, xs: Sequence[Scalar]) -> HFunction:
    for x in xs:
        f = insert_breakpoint(f, x)
    return f


def align(f: HFunction, g: HFunction) -> Tuple[HFunction, HFunction]:
    """Refine both functions to the union of their special points."""
    if not domain_eq(f.domain, g.domain):
        raise EngineError("operands must share a domain")
    merged: List[Scalar] = []
    fi = gi = 0
    fx, gx = f.breakpoints, g.breakpoints
    while fi < len(fx) or gi < len(gx):
        if fi == len(fx):
            merged.append(gx[gi]); gi += 1
        elif gi == len(gx):
            merged.append(fx[fi]); fi += 1
        elif scalar_eq(fx[fi], gx[gi]):
            merged.append(fx[fi]); fi += 1; gi += 1
        elif fx[fi] < gx[gi]:
            merged.append(fx[fi]); fi += 1
        else:
            merged.append(gx[gi]); gi += 1
    f2 = insert_breakpoints(f, [x for x in merged if f.point_index(x) is None])
    g2 = insert_breakpoints(g, [x for x in merged if g.point_index(x) is None])
    return f2, g2


# ---------------------------------------------------------------------------
# Pointwise operations
# ---------------------------------------------------------------------------


def _combine_env(
    a: Optional[EndEnvelope], b: Optional[EndEnvelope], box_op
) -> Optional[EndEnvelope]:
    """Envelope calculus: exact limits combine to exact limits; a point
    limit shifts the other envelope exactly; anything else falls back to
    the conservative interval operation on the envelope boxes."""
    if a is None or b is None:
        return None
    box = box_op(Interval(a.liminf, a.limsup), Interval(b.liminf, b.limsup))
    if a.is_exact_limit or b.is_exact_limit:
        rank = max(_PROV_RANK[a.provenance], _PROV_RANK[b.provenance])
        provenance = {0: EVALUATED, 1: DECLARED, 2: ESTIMATED}[rank]
    else:
        provenance = ESTIMATED
    return EndEnvelope(box.lo, box.hi, provenance)


def pointwise_add(f: HFunction, g: HFunction) -> HFunction:
    """Pointwise interval sum; generally S-continuous but not H-continuous."""
    f, g = align(f, g)
    points = [
        SpecialPoint(p.x, iv.add(p.value, q.value))
        for p, q in zip(f.points, g.points)
    ]
    pieces = []
    for a, b in zip(f.pieces, g.pieces):
        lower = ex.add(a.lower, b.lower)
        upper = lower if (a.is_real and b.is_real) else ex.add(a.upper, b.upper)
        pieces.append(
            Piece(
                a.lo, a.hi, lower, upper,
                _combine_env(a.lower_left, b.lower_left, iv.add),
                _combine_env(a.lower_right, b.lower_right, iv.add),
                _combine_env(a.upper_left, b.upper_left, iv.add),
                _combine_env(a.upper_right, b.upper_right, iv.add),
            )
        )
    return HFunction(f.domain, tuple(points), tuple(pieces))


def pointwise_neg(f: HFunction) -> HFunction:
    points = [SpecialPoint(p.x, iv.neg(p.value)) for p in f.points]
    pieces = []
    for p in f.pieces:
        lower = ex.negate(p.upper)
        upper = lower if p.is_real else ex.negate(p.lower)
        pieces.append(
            Piece(
                p.lo, p.hi, lower, upper,
                _negate_env(p.upper_left), _negate_env(p.upper_right),
                _negate_env(p.lower_left), _negate_env(p.lower_right),
            )
        )
    return HFunction(f.domain, tuple(points), tuple(pieces))


def _negate_env(e: Optional[EndEnvelope]) -> Optional[EndEnvelope]:
    if e is None:
        return None
    return EndEnvelope(-e.limsup, -e.liminf, e.provenance)


def pointwise_mul(f: HFunction, g: HFunction) -> HFunction:
    """Pointwise interval product.

    Real-valued pieces multiply symbolically.  For proper interval pieces
    the product bounds are min/max of the four bound products; the engine
    picks the winning product expression by sampling and refuses (with a
    RepresentationError) when no single product wins across the piece,
    since min/max shapes are outside the expression grammar.
    """
    f, g = align(f, g)
    points = [
        SpecialPoint(p.x, iv.mul(p.value, q.value))
        for p, q in zip(f.points, g.points)
    ]
    pieces = []
    for a, b in zip(f.pieces, g.pieces):
        if a.is_real and b.is_real:
            prod = ex.mul(a.lower, b.lower)
            pieces.append(
                Piece(
                    a.lo, a.hi, prod, prod,
                    _combine_env(a.lower_left, b.lower_left, iv.mul),
                    _combine_env(a.lower_right, b.lower_right, iv.mul),
                    _combine_env(a.upper_left, b.upper_left, iv.mul),
                    _combine_env(a.upper_right, b.upper_right, iv.mul),
                )
            )
        else:
            pieces.append(_mul_proper_pieces(a, b))
    return HFunction(f.domain, tuple(points), tuple(pieces))


def _mul_proper_pieces(a: Piece, b: Piece) -> Piece:
    candidates = [
        (ex.mul(a.lower, b.lower), ("lower", "lower")),
        (ex.mul(a.lower, b.upper), ("lower", "upper")),
        (ex.mul(a.upper, b.lower), ("upper", "lower")),
        (ex.mul(a.upper, b.upper), ("upper", "upper")),
    ]
    xs = _span_samples(a.lo, a.hi, 65, tag=("mulpick", str(a.lo), str(a.hi)))
    rows = []
    for x in xs:
        rows.append([ex.eval_finite(c, x) for c, _ in candidates])
    low_idx = _consistent_winner(rows, min)
    high_idx = _consistent_winner(rows, max)
    if low_idx is None or high_idx is None:
        raise RepresentationError(
            "product bounds change shape inside a proper interval piece; "
            "insert a breakpoint where the winning product changes"
        )
    lower, low_slots = candidates[low_idx]
    upper, high_slots = candidates[high_idx]

    def env(piece: Piece, slot: str, side: str) -> Optional[EndEnvelope]:
        return getattr(piece, f"{slot}_{side}")

    return Piece(
        a.lo, a.hi, lower, upper,
        _combine_env(env(a, low_slots[0], "left"), env(b, low_slots[1], "left"), iv.mul),
        _combine_env(env(a, low_slots[0], "right"), env(b, low_slots[1], "right"), iv.mul),
        _combine_env(env(a, high_slots[0], "left"), env(b, high_slots[1], "left"), iv.mul),
        _combine_env(env(a, high_slots[0], "right"), env(b, high_slots[1], "right"), iv.mul),
    )


def _consistent_winner(rows, pick) -> Optional[int]:
    for idx in range(4):
        if all(row[idx] == pick(row) for row in rows):
            return idx
    return None


# ---------------------------------------------------------------------------
# Completion values, continuity predicates
# ---------------------------------------------------------------------------


def side_envelopes(f: HFunction, i: int) -> Tuple[EndEnvelope, EndEnvelope, EndEnvelope, EndEnvelope]:
    """(lower-left, lower-right, upper-left, upper-right) data at point i,
    where left means the envelope of the piece left of the point."""
    left = f.pieces[i]
    right = f.pieces[i + 1]
    slots = (left.lower_right, right.lower_left, left.upper_right, right.upper_left)
    if any(s is None for s in slots):
        raise EnvelopeError("missing envelope at an interior special point")
    return slots  # type: ignore[return-value]


def punctured_completion_at(f: HFunction, i: int) -> Interval:
    """Graph-completion value at special point i computed from the abutting
    envelopes only (the point itself excluded from the dense set)."""
    ll, lr, ul, ur = side_envelopes(f, i)
    lo = min(ll.liminf, lr.liminf)
    hi = max(ul.limsup, ur.limsup)
    if lo > hi:
        raise EnvelopeError(
            f"completion inverted at {f.points[i].x!r}: declared envelopes inconsistent"
        )
    return Interval(lo, hi)


def completion_at(f: HFunction, i: int) -> Interval:
    """Graph-completion value at special point i with the point included."""
    ll, lr, ul, ur = side_envelopes(f, i)
    value = f.points[i].value
    lo = min(ll.liminf, lr.liminf, value.lo)
    hi = max(ul.limsup, ur.limsup, value.hi)
    return Interval(lo, hi)


def is_S_continuous(f: HFunction) -> bool:
    """Fixed point of graph completion: every special-point value already
    equals its completion (pieces are continuous by representation)."""
    for i in range(len(f.points)):
        if not iv.interval_eq(completion_at(f, i), f.points[i].value):
            return False
    return True


def is_H_continuous(f: HFunction) -> bool:
    """Hausdorff continuity on this representation: pieces are point-valued
    and each special-point value equals its punctured completion."""
    if not all(p.is_real for p in f.pieces):
        return False
    for i in range(len(f.points)):
        try:
            target = punctured_completion_at(f, i)
        except EnvelopeError:
            return False
        if not iv.interval_eq(target, f.points[i].value):
            return False
    return True


@dataclass(frozen=True)
class Support:
    """Locations where the function takes proper interval values."""

    points: Tuple[Scalar, ...]
    pieces: Tuple[Tuple[Optional[Scalar], Optional[Scalar]], ...]

    @property
    def is_empty(self) -> bool:
        return not self.points and not self.pieces


def interval_support(f: HFunction) -> Support:
    pts = tuple(p.x for p in f.points if iv.width(p.value) > 0)
    spans = tuple((p.lo, p.hi) for p in f.pieces if not p.is_real)
    return Support(pts, spans)


def common_point_domain(fs) -> DenseSubsetSpec:
    """Domain minus every location where some operand has positive width;
    cofinite (hence dense) because proper values sit at special points."""
    if isinstance(fs, dict):
        fs = list(fs.values())
    excluded: List[Scalar] = []
    for f in fs:
        support = interval_support(f)
        if support.pieces:
            raise RepresentationError(
                "an operand takes proper interval values on a whole piece; "
                "its point-valued locus is not cofinite"
            )
        excluded.extend(support.points)
    return DenseSubsetSpec.excluding(*excluded)


# ---------------------------------------------------------------------------
# Envelope declaration and validation
# ---------------------------------------------------------------------------


def declare_envelope(
    f: HFunction, x, liminf, limsup, side: str = "both"
) -> HFunction:
    """Override the envelopes abutting breakpoint x with declared data."""
    x = to_scalar(x)
    idx = f.point_index(x)
    if idx is None:
        raise DomainError(f"{x!r} is not a special point")
    env = EndEnvelope(to_scalar(liminf), to_scalar(limsup), DECLARED)
    pieces = list(f.pieces)
    if side in ("both", "left"):
        pieces[idx] = replace(pieces[idx], lower_right=env, upper_right=env)
    if side in ("both", "right"):
        pieces[idx + 1] = replace(pieces[idx + 1], lower_left=env, upper_left=env)
    return HFunction(f.domain, f.points, tuple(pieces))


@dataclass(frozen=True)
class EnvelopeCheck:
    x: Optional[Scalar]
    side: str
    provenance: str
    passed: bool
    observed_min: Optional[Scalar]
    observed_max: Optional[Scalar]
    message: str


def validate_envelopes(
    f: HFunction,
    samples_per_decade: int = 64,
    decades: int = 9,
    eps: Optional[float] = None,
    approach_tol: float = 1e-3,
) -> List[EnvelopeCheck]:
    """Sample each declared/estimated envelope on a geometric sequence
    approaching its end.

    Flags values escaping [liminf - eps, limsup + eps] (soundness) and an
    observed range that fails to come within ``approach_tol`` of the
    declared bounds (sharpness; necessarily a weaker, sampling-limited
    check).  Report-only.
    """
    if eps is None:
        eps = get_tolerance() if get_mode() == FLOAT else 0.0
    checks: List[EnvelopeCheck] = []
    for i, piece in enumerate(f.pieces):
        ends = (
            (piece.lo, "+", (piece.lower_left, piece.upper_left)),
            (piece.hi, "-", (piece.lower_right, piece.upper_right)),
        )
        for at, side, (env_lo, env_hi) in ends:
            seen = set()
            for env, bound in ((env_lo, piece.lower), (env_hi, piece.upper)):
                if env is None or env.provenance == EVALUATED:
                    continue
                key = (id(env), id(bound))
                if key in seen:
                    continue  # real pieces share one bound and one envelope
                seen.add(key)
                checks.append(
                    _check_envelope(
                        bound, at, side, env, piece, samples_per_decade, decades,
                        eps, approach_tol,
                    )
                )
    return checks


def _check_envelope(
    bound, at, side, env, piece, samples_per_decade, decades, eps, approach_tol
) -> EnvelopeCheck:
    label = "left" if side == "+" else "right"
    if at is None:
        return EnvelopeCheck(None, label, env.provenance, True, None, None,
                             "infinite end not sampled")
    reach = _reach(piece.lo, piece.hi)
    base = min(to_scalar(1), reach / 2)
    sign = to_scalar(1) if side == "+" else to_scalar(-1)
    ratio = 10 ** (-1.0 / samples_per_decade)
    observed: List[Scalar] = []
    offset = float(base)
    total = samples_per_decade * decades
    for _ in range(total):
        offset *= ratio
        x = at + sign * to_scalar(offset)
        try:
            observed.append(ex.eval_finite(bound, x))
        except ExprEvalError:
            continue
    if not observed:
        return EnvelopeCheck(at, label, env.provenance, False, None, None,
                             "no evaluable samples near the end")
    lo, hi = min(observed), max(observed)
    if lo < env.liminf - eps or hi > env.limsup + eps:
        return EnvelopeCheck(
            at, label, env.provenance, False, lo, hi,
            "observed values escape the declared envelope",
        )
    scale = max(1.0, abs(float(env.liminf)), abs(float(env.limsup)))
    slack = approach_tol * scale
    if float(env.limsup) - float(hi) > slack or float(lo) - float(env.liminf) > slack:
        return EnvelopeCheck(
            at, label, env.provenance, False, lo, hi,
            "observed range does not approach the declared envelope",
        )
    return EnvelopeCheck(at, label, env.provenance, True, lo, hi, "ok")


# ---------------------------------------------------------------------------
# Normalization and equality
# ---------------------------------------------------------------------------


def normalize(f: HFunction) -> HFunction:
    """Canonical form: prune width-0 special points whose value matches the
    evaluated limits on both sides and whose neighbouring pieces merge."""
    points = list(f.points)
    pieces = list(f.pieces)
    changed = True
    while changed:
        changed = False
        for i, point in enumerate(points):
            if not point.value.is_point:
                continue
            v = point.value.lo
            left, right = pieces[i], pieces[i + 1]
            envs = (left.lower_right, left.upper_right, right.lower_left, right.upper_left)
            if any(e is None or not e.is_exact_limit or e.provenance != EVALUATED
                   for e in envs):
                continue
            if any(not scalar_eq(e.liminf, v) for e in envs):
                continue
            if not (ex.exact_equal(left.lower, right.lower)
                    and ex.exact_equal(left.upper, right.upper)):
                continue
            pieces[i : i + 2] = [
                Piece(
                    left.lo, right.hi, left.lower, left.upper,
                    left.lower_left, right.lower_right,
                    left.upper_left, right.upper_right,
                )
            ]
            del points[i]
            changed = True
            break
    return HFunction(f.domain, tuple(points), tuple(pieces))


def piece_expr_equal(a: ex.Expr, b: ex.Expr, lo, hi, tag="eq") -> bool:
    """Decidable piece equality: exact (canonical/cross-multiplied) when
    possible, seeded sampling within tolerance in float mode."""
    if ex.exact_equal(a, b):
        return True
    if get_mode() == RATIONAL:
        return False
    tol = get_tolerance()
    for x in _span_samples(lo, hi, 128, tag=(tag, str(lo), str(hi))):
        try:
            va = ex.eval_finite(a, x)
            vb = ex.eval_finite(b, x)
        except ExprEvalError:
            return False
        if abs(va - vb) > tol:
            return False
    return True


def func_equal(f: HFunction, g: HFunction) -> bool:
    """Equality of normalized representations."""
    f, g = normalize(f), normalize(g)
    if not domain_eq(f.domain, g.domain):
        return False
    if len(f.points) != len(g.points):
        return False
    for p, q in zip(f.points, g.points):
        if not scalar_eq(p.x, q.x) or not iv.interval_eq(p.value, q.value):
            return False
    for a, b in zip(f.pieces, g.pieces):
        if not piece_expr_equal(a.lower, b.lower, a.lo, a.hi):
            return False
        if not piece_expr_equal(a.upper, b.upper, a.lo, a.hi):
            return False
    return True


def func_sample_points(f: HFunction, count: int, tag="samples") -> List[Scalar]:
    """Deterministic sample points spread over the pieces of f."""
    per = max(1, count // max(1, len(f.pieces)))
    out: List[Scalar] = []
    for i, piece in enumerate(f.pieces):
        out.extend(_span_samples(piece.lo, piece.hi, per, tag=(tag, i)))
    return out[:count] if len(out) >= count else out
