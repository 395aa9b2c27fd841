"""Partial order, order convergence, and the order-limit construction of
the ring operations.

Approximating sequences are realized by slope-n inf-convolution (from
below) and its reflection (from above): for piecewise-linear inputs these
are exactly computable continuous piecewise-linear functions, increasing
in n, that regularize the lower/upper bound.

Order limits are taken by *structure stabilization*: elements at depths
N, 2N, 4N and 8N are compared pairwise; regions where the representation
has stopped changing supply the limit's pieces, while the shrinking
disagreement zones are extrapolated to their collapse points (zone bounds
of regularized piecewise-linear functions move along p + c/(n-k)
trajectories, whose limit three doubling samples determine exactly) and
the limit's values there are recovered by graph completion.  For
inf-convolution sequences of piecewise-linear functions the whole
procedure is exact in rational mode; the reported residual measures how
far the deepest element still is from the completed limit.  Sequences
whose piece expressions keep drifting (instead of their breakpoints)
stabilize only up to the float-mode tolerance and raise ConvergenceError
in rational mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from . import algebra, baire
from . import expr as ex
from . import interval as iv
from . import piecewise as pw
from .errors import (
    ConvergenceError,
    EngineError,
    NotHausdorffContinuous,
    NotPiecewiseLinear,
)
from .interval import Interval
from .piecewise import HFunction
from .scalars import FLOAT, Scalar, get_mode, get_tolerance, scalar_eq, to_scalar

FROM_BELOW = "from_below"
FROM_ABOVE = "from_above"


# ---------------------------------------------------------------------------
# Pointwise partial order
# ---------------------------------------------------------------------------


def func_leq(f: HFunction, g: HFunction) -> bool:
    """f <= g in the pointwise interval order.

    Exact for piecewise-linear operands (endpoint/slope comparison piece by
    piece); otherwise checked at the special points plus deterministic
    samples of every piece.
    """
    f, g = pw.align(f, g)
    for p, q in zip(f.points, g.points):
        if not iv.leq(p.value, q.value):
            return False
    for a, b in zip(f.pieces, g.pieces):
        for bound in ("lower", "upper"):
            ea = getattr(a, bound)
            eb = getattr(b, bound)
            if ex.is_linear(ea) and ex.is_linear(eb):
                if not _linear_leq(ea, eb, a.lo, a.hi):
                    return False
            else:
                if not _sampled_leq(ea, eb, a.lo, a.hi):
                    return False
    return True


def _linear_leq(ea, eb, lo, hi) -> bool:
    sa, ca = ex.linear_coeffs(ea)
    sb, cb = ex.linear_coeffs(eb)
    ds, dc = sb - sa, cb - ca  # difference eb - ea must be >= 0 on (lo, hi)
    tol = get_tolerance() if get_mode() == FLOAT else 0

    def val(x):
        return ds * x + dc

    if lo is None and hi is None:
        return ds == 0 and dc >= -tol
    if lo is None:
        return ds <= 0 and val(hi) >= -tol
    if hi is None:
        return ds >= 0 and val(lo) >= -tol
    return val(lo) >= -tol and val(hi) >= -tol


def _sampled_leq(ea, eb, lo, hi) -> bool:
    tol = get_tolerance() if get_mode() == FLOAT else 0
    for x in pw._span_samples(lo, hi, 64, tag=("leq", str(lo), str(hi))):
        if ex.eval_finite(ea, x) > ex.eval_finite(eb, x) + tol:
            return False
    return True


# ---------------------------------------------------------------------------
# Function sequences
# ---------------------------------------------------------------------------


@dataclass
class FunctionSequence:
    """Rule producing the n-th element (n >= 1), with a monotonicity tag."""

    generator: Callable[[int], HFunction]
    monotonicity: str = "none"  # increasing | decreasing | none
    description: str = ""
    _cache: Dict[int, HFunction] = field(default_factory=dict, repr=False)

    def element(self, n: int) -> HFunction:
        if n < 1:
            raise EngineError("sequence indices start at 1")
        if n not in self._cache:
            self._cache[n] = self.generator(n)
        return self._cache[n]

    def spot_check_monotone(self, depth: int = 4) -> bool:
        """Verify the declared tag on consecutive elements up to depth."""
        if self.monotonicity == "none":
            return True
        for n in range(1, depth):
            a, b = self.element(n), self.element(n + 1)
            ok = func_leq(a, b) if self.monotonicity == "increasing" else func_leq(b, a)
            if not ok:
                return False
        return True


def mixture(seq_a: FunctionSequence, seq_b: FunctionSequence) -> FunctionSequence:
    """Interleave two sequences: elements a1, b1, a2, b2, ...  Used by the
    well-definedness check: mixtures of sequences with a common limit keep
    that limit."""
    return FunctionSequence(
        generator=lambda n: (
            seq_a.element((n + 1) // 2) if n % 2 else seq_b.element(n // 2)
        ),
        monotonicity="none",
        description=f"mixture({seq_a.description}, {seq_b.description})",
    )


# ---------------------------------------------------------------------------
# Inf-convolution approximants (exact for piecewise-linear operands)
# ---------------------------------------------------------------------------


@dataclass
class _PL:
    """Continuous piecewise-linear function on the whole line: knots plus
    tail slopes.  Used only as scaffolding for lower envelopes."""

    knots: List[Tuple[Scalar, Scalar]]
    left_slope: Scalar
    right_slope: Scalar

    def at(self, x: Scalar) -> Scalar:
        ks = self.knots
        if x <= ks[0][0]:
            return ks[0][1] + self.left_slope * (x - ks[0][0])
        if x >= ks[-1][0]:
            return ks[-1][1] + self.right_slope * (x - ks[-1][0])
        for (x1, y1), (x2, y2) in zip(ks, ks[1:]):
            if x1 <= x <= x2:
                return y1 + (y2 - y1) * (x - x1) / (x2 - x1)
        raise AssertionError("knot scan failed")


def _cone(x0: Scalar, v: Scalar, n: Scalar) -> _PL:
    return _PL([(x0, v)], -n, n)


def infconv_approx(f: HFunction, n: int, direction: str = FROM_BELOW) -> HFunction:
    """Slope-n regularization: from below the n-Lipschitz inf-convolution of
    the lower bound, from above its reflection on the upper bound.

    Continuous piecewise-linear, monotone in n, converging to the bound off
    the special points.  Requires a piecewise-linear H-continuous operand.
    """
    if direction not in (FROM_BELOW, FROM_ABOVE):
        raise EngineError(f"unknown direction {direction!r}")
    if direction == FROM_ABOVE:
        mirrored = infconv_approx(pw.pointwise_neg(f), n, FROM_BELOW)
        return pw.normalize(pw.pointwise_neg(mirrored))
    if not f.is_piecewise_linear:
        raise NotPiecewiseLinear("inf-convolution needs piecewise-linear operands")
    if not pw.is_H_continuous(f):
        raise NotHausdorffContinuous("inf-convolution operand must be H-continuous")
    slope = to_scalar(n)
    if not slope > 0:
        raise EngineError("regularization slope must be positive")
    cands: List[_PL] = []
    for piece in f.pieces:
        a, b = ex.linear_coeffs(piece.lower)
        if abs(a) <= slope:
            knots = []
            if piece.lo is not None:
                knots.append((piece.lo, a * piece.lo + b))
            if piece.hi is not None:
                knots.append((piece.hi, a * piece.hi + b))
            if not knots:
                knots = [(to_scalar(0), to_scalar(b))]
            left = -slope if piece.lo is not None else a
            right = slope if piece.hi is not None else a
            cands.append(_PL(knots, left, right))
        elif a > slope:
            if piece.lo is None:
                raise EngineError(
                    "piece slope exceeds the regularization slope on an "
                    "unbounded piece; increase n"
                )
            cands.append(_cone(piece.lo, a * piece.lo + b, slope))
        else:
            if piece.hi is None:
                raise EngineError(
                    "piece slope exceeds the regularization slope on an "
                    "unbounded piece; increase n"
                )
            cands.append(_cone(piece.hi, a * piece.hi + b, slope))
    for point in f.points:
        cands.append(_cone(point.x, point.value.lo, slope))
    envelope = _lower_envelope(cands)
    return _pl_to_hfunction(envelope, f.domain)


def _lower_envelope(cands: List[_PL]) -> _PL:
    xs = sorted({x for c in cands for (x, _) in c.knots})
    probe_l = _tail_probe(cands, xs[0], left=True)
    probe_r = _tail_probe(cands, xs[-1], left=False)
    grid = [probe_l] + xs + [probe_r]
    knot_xs = set(xs)
    for u, w in zip(grid, grid[1:]):
        if not u < w:
            continue
        # candidates are linear inside the cell; collect pairwise crossings
        lines = [(c.at(u), (c.at(w) - c.at(u)) / (w - u)) for c in cands]
        for i in range(len(lines)):
            vi, si = lines[i]
            for j in range(i + 1, len(lines)):
                vj, sj = lines[j]
                if si == sj:
                    continue
                x_cross = u + (vj - vi) / (si - sj)
                if u < x_cross < w:
                    knot_xs.add(x_cross)
    ordered = sorted(knot_xs)
    knots = [(x, min(c.at(x) for c in cands)) for x in ordered]
    left_winner = min(cands, key=lambda c: (c.at(probe_l), -_tail_slope(c, left=True)))
    right_winner = min(cands, key=lambda c: (c.at(probe_r), _tail_slope(c, left=False)))
    return _PL(knots, _tail_slope(left_winner, True), _tail_slope(right_winner, False))


def _tail_slope(c: _PL, left: bool) -> Scalar:
    return c.left_slope if left else c.right_slope


def _tail_probe(cands: List[_PL], edge: Scalar, left: bool) -> Scalar:
    crossings = [edge]
    lines = [(c.at(edge), _tail_slope(c, left)) for c in cands]
    for i in range(len(lines)):
        vi, si = lines[i]
        for j in range(i + 1, len(lines)):
            vj, sj = lines[j]
            if si == sj:
                continue
            x_cross = edge + (vj - vi) / (si - sj)
            if (left and x_cross < edge) or (not left and x_cross > edge):
                crossings.append(x_cross)
    return (min(crossings) - 1) if left else (max(crossings) + 1)


def _pl_to_hfunction(env: _PL, domain: pw.Domain) -> HFunction:
    interior = [(x, v) for (x, v) in env.knots if domain.contains(x)]
    bounds: List[Optional[Scalar]] = (
        [domain.lo] + [x for (x, _) in interior] + [domain.hi]
    )
    pieces = []
    for u, w in zip(bounds, bounds[1:]):
        x1, x2 = _line_probes(u, w)
        v1, v2 = env.at(x1), env.at(x2)
        slope = (v2 - v1) / (x2 - x1)
        intercept = v1 - slope * x1
        expr = ex.poly_expr([_as_fraction(intercept), _as_fraction(slope)])
        pieces.append(pw.make_piece(u, w, expr))
    points = [(x, Interval(v, v)) for (x, v) in interior]
    return pw.normalize(pw.hfunction(domain, points, pieces, validate=False))


def _as_fraction(v: Scalar) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(str(v))


def _line_probes(u: Optional[Scalar], w: Optional[Scalar]) -> Tuple[Scalar, Scalar]:
    if u is None and w is None:
        return to_scalar(-1), to_scalar(1)
    if u is None:
        return w - 2, w - 1
    if w is None:
        return u + 1, u + 2
    return u + (w - u) / 4, w - (w - u) / 4


# ---------------------------------------------------------------------------
# Order limits by structure stabilization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OrderLimitWitness:
    """Increasing and decreasing sequences squeezing the limit."""

    alpha: FunctionSequence
    beta: FunctionSequence
    limit: HFunction


@dataclass(frozen=True)
class LimitResult:
    limit: HFunction
    residual: float
    witness: Optional[OrderLimitWitness]
    collapse_points: Tuple[Scalar, ...]


def _stability_zones(h_a: HFunction, h_b: HFunction):
    """Maximal spans where the two representations disagree."""
    a, b = pw.align(h_a, h_b)
    n = len(a.points)
    flags: List[Tuple[str, int, bool]] = []
    for i in range(n + 1):
        pa, pb = a.pieces[i], b.pieces[i]
        ok = pw.piece_expr_equal(
            pa.lower, pb.lower, pa.lo, pa.hi, tag=("stab-lo", i)
        ) and pw.piece_expr_equal(pa.upper, pb.upper, pa.lo, pa.hi, tag=("stab-hi", i))
        flags.append(("piece", i, ok))
        if i < n:
            flags.append(("point", i, iv.interval_eq(a.points[i].value, b.points[i].value)))
    bounds = [a.domain.lo] + [p.x for p in a.points] + [a.domain.hi]
    zones = []
    j = 0
    while j < len(flags):
        if flags[j][2]:
            j += 1
            continue
        start = j
        while j < len(flags) and not flags[j][2]:
            j += 1
        end = j - 1
        kind_s, idx_s, _ = flags[start]
        kind_e, idx_e, _ = flags[end]
        left = bounds[idx_s] if kind_s == "piece" else bounds[idx_s + 1]
        right = bounds[idx_e + 1]
        zones.append((left, right))
    return zones


def _mobius_limit(y1: Scalar, y2: Scalar, y4: Scalar) -> Optional[Scalar]:
    """Exact limit of a sequence of the form p + c/(n - k), sampled at
    three doubling indices.  Breakpoints of regularized piecewise-linear
    functions move along exactly such trajectories, which is what makes the
    stabilization exact in rational mode."""
    if scalar_eq(y2, y4):
        return y4
    denominator = 2 * y1 - 3 * y2 + y4
    if denominator == 0:
        return None
    return (3 * y1 * y4 - y1 * y2 - 2 * y2 * y4) / denominator


def _containing_zone(zones, lo: Scalar, hi: Scalar):
    for (l, r) in zones:
        left_ok = l is None or l <= lo
        right_ok = r is None or hi <= r
        if left_ok and right_ok:
            return (l, r)
    return None


def _collapse_points(scans, depth: int) -> List[Tuple[Scalar, Tuple[Scalar, Scalar]]]:
    """Extrapolate each disagreement zone of the deepest scan to its
    collapse point, using the zone bounds observed at three scan depths."""
    z1, z2, z3 = scans
    out = []
    for (l3, r3) in z3:
        if l3 is None or r3 is None:
            raise ConvergenceError(
                "disagreement zone touches an infinite end; expressions are "
                "drifting instead of breakpoints (exact stabilization fails)"
            )
        zone2 = _containing_zone(z2, l3, r3)
        zone1 = zone2 and _containing_zone(z1, zone2[0], zone2[1])
        if zone2 is None or zone1 is None or None in zone2 + zone1:
            raise ConvergenceError(
                f"zone ({l3!r}, {r3!r}) has no matching shallower zones; "
                f"structure is not stabilizing at depth {depth}"
            )
        if not (zone1[0] <= zone2[0] <= l3 and r3 <= zone2[1] <= zone1[1]):
            raise ConvergenceError("disagreement zones are not nested")
        p_left = _mobius_limit(zone1[0], zone2[0], l3)
        p_right = _mobius_limit(zone1[1], zone2[1], r3)
        if p_left is None or p_right is None or not scalar_eq(p_left, p_right):
            raise ConvergenceError(
                f"zone ({l3!r}, {r3!r}) is not collapsing to a point at depth {depth}"
            )
        eps = get_tolerance() if get_mode() == FLOAT else 0
        if not (l3 - eps <= p_left <= r3 + eps):
            raise ConvergenceError("extrapolated collapse point escapes its zone")
        out.append((min(max(p_left, l3), r3), (l3, r3)))
    # two zones flanking one stable breakpoint may collapse onto the same
    # point (a shrinking dip); merge them instead of rejecting
    merged: List[Tuple[Scalar, Tuple[Scalar, Scalar]]] = []
    for p, span in out:
        if merged and scalar_eq(merged[-1][0], p):
            prev_p, prev_span = merged[-1]
            merged[-1] = (prev_p, (min(prev_span[0], span[0]), max(prev_span[1], span[1])))
        else:
            merged.append((p, span))
    for (p1, _), (p2, _) in zip(merged, merged[1:]):
        if not p1 < p2:
            raise ConvergenceError("collapse points are not separated")
    return merged


def order_limit_stabilized(seq: FunctionSequence, depth: int) -> LimitResult:
    """Order limit via structure stabilization plus graph completion.

    Monotonicity is not used; callers wanting the monotone contract use
    `order_limit_monotone`.
    """
    e2 = seq.element(2 * depth)
    e4 = seq.element(4 * depth)
    e8 = seq.element(8 * depth)
    scans = (
        _stability_zones(seq.element(depth), e2),
        _stability_zones(e2, e4),
        _stability_zones(e4, e8),
    )
    completion = baire.fsi if seq.monotonicity == "decreasing" else baire.fis
    if not scans[2]:
        limit = pw.normalize(completion(e8))
        return LimitResult(limit, 0.0, None, ())
    if not scans[0] or not scans[1]:
        raise ConvergenceError("sequence oscillates: disagreement reappears at depth")
    collapses = _collapse_points(scans, depth)
    collapse_xs = [p for p, _ in collapses]
    spans = [span for _, span in collapses]
    kept = [
        point
        for point in e8.points
        if not any(l <= point.x <= r for (l, r) in spans)
        and not any(scalar_eq(point.x, p) for p in collapse_xs)
    ]
    break_list = sorted(
        [(p.x, p.value, False) for p in kept] + [(x, None, True) for x in collapse_xs],
        key=lambda t: t[0],
    )
    bounds: List[Optional[Scalar]] = (
        [e8.domain.lo] + [x for (x, _, _) in break_list] + [e8.domain.hi]
    )
    pieces = []
    for u, w in zip(bounds, bounds[1:]):
        probe = _stable_probe(u, w, spans)
        source = e8.piece_at(probe)
        pieces.append(pw.make_piece(u, w, source.lower, source.upper))
    points = []
    for i, (x, value, is_collapse) in enumerate(break_list):
        if not is_collapse:
            points.append((x, value))
            continue
        left, right = pieces[i], pieces[i + 1]
        anchor = iv.hull(
            left.lower_right.liminf, left.upper_right.limsup,
            right.lower_left.liminf, right.upper_left.limsup,
        )
        points.append((x, anchor))  # placeholder; completion recomputes it
    phi = pw.hfunction(e8.domain, points, pieces, validate=False)
    limit = pw.normalize(completion(phi))
    residual = _limit_residual(limit, e8, spans)
    return LimitResult(limit, residual, None, tuple(collapse_xs))


def _stable_probe(u: Optional[Scalar], w: Optional[Scalar], spans) -> Scalar:
    core_lo, core_hi = u, w
    for (l, r) in spans:
        if core_lo is not None and l <= core_lo <= r:
            core_lo = r
        if core_hi is not None and l <= core_hi <= r:
            core_hi = l
    if core_lo is not None and core_hi is not None and not core_lo < core_hi:
        raise ConvergenceError(
            "disagreement zones cover a whole region; no stable evidence"
        )
    a, b = pw._finite_window(core_lo, core_hi)
    return a + (b - a) / 2


def _limit_residual(limit: HFunction, element: HFunction, spans) -> float:
    xs = pw.func_sample_points(limit, 128, tag="residual")
    for (l, r) in spans:
        mid = l + (r - l) / 2
        if limit.domain.contains(mid):
            xs.append(mid)
    worst = 0.0
    for x in xs:
        if limit.point_index(x) is not None:
            continue
        d = iv.distance(limit.eval_at(x), element.eval_at(x))
        worst = max(worst, float(d))
    return worst


def order_limit_monotone(
    seq: FunctionSequence, depth: int = 64, spot_depth: int = 3
) -> LimitResult:
    """Order limit of a monotone sequence, with a squeezing witness.

    The limit itself is computed by stabilization; monotonicity is verified
    on the first ``spot_depth`` consecutive pairs plus the depth pair.
    """
    if seq.monotonicity not in ("increasing", "decreasing"):
        raise EngineError("order_limit_monotone needs a monotone-tagged sequence")
    if not seq.spot_check_monotone(spot_depth):
        raise EngineError(f"sequence is not {seq.monotonicity} on its first elements")
    a, b = seq.element(depth), seq.element(2 * depth)
    ordered = (a, b) if seq.monotonicity == "increasing" else (b, a)
    if not func_leq(*ordered):
        raise EngineError(f"sequence is not {seq.monotonicity} at the working depth")
    result = order_limit_stabilized(seq, depth)
    limit = result.limit
    sign = 1 if seq.monotonicity == "increasing" else -1

    def shifted(n: int) -> HFunction:
        offset = pw.constant_function(limit.domain, Interval.point(Fraction(sign, n)))
        return pw.pointwise_add(limit, offset)

    squeezing = FunctionSequence(
        shifted, "decreasing" if sign > 0 else "increasing", "limit +/- 1/n"
    )
    if seq.monotonicity == "increasing":
        witness = OrderLimitWitness(alpha=seq, beta=squeezing, limit=limit)
    else:
        witness = OrderLimitWitness(alpha=squeezing, beta=seq, limit=limit)
    return LimitResult(limit, result.residual, witness, result.collapse_points)


# ---------------------------------------------------------------------------
# Cauchy verification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CauchyReport:
    passed: bool
    first_violation: Optional[str]
    beta_residual: float


def verify_cauchy(
    seq: FunctionSequence,
    beta: FunctionSequence,
    depth: int,
    tol: float = 1e-3,
) -> CauchyReport:
    """Check the order-Cauchy witness: every increment f_m - f_k with
    m, k >= n is dominated by beta_n, and beta approaches zero.

    Ring subtraction (via the additive inverse) is used for the increments.
    Report-only; a failing witness does not prove the sequence non-Cauchy.
    """
    if not beta.spot_check_monotone(min(depth, 4)) or beta.monotonicity != "decreasing":
        return CauchyReport(False, "beta is not a decreasing sequence", math.inf)
    diffs: Dict[Tuple[int, int], HFunction] = {}
    for m in range(1, depth + 1):
        for k in range(1, depth + 1):
            if m == k:
                continue
            diffs[(m, k)] = algebra.oplus_def1(
                seq.element(m), algebra.additive_inverse(seq.element(k))
            ).result
    violation = None
    for n in range(1, depth + 1):
        bound = beta.element(n)
        for (m, k), diff in diffs.items():
            if m < n or k < n:
                continue
            if not func_leq(diff, bound):
                violation = f"f_{m} - f_{k} exceeds beta_{n}"
                break
        if violation:
            break
    last = beta.element(depth)
    xs = pw.func_sample_points(last, 64, tag="cauchy")
    residual = max(
        (float(iv.modulus(last.eval_at(x))) for x in xs), default=0.0
    )
    passed = violation is None and residual <= tol
    if violation is None and residual > tol:
        violation = f"inf beta_n stays {residual} away from zero at depth {depth}"
    return CauchyReport(passed, violation, residual)


# ---------------------------------------------------------------------------
# Ring operations via order limits
# ---------------------------------------------------------------------------


def _regularizing_offset(f: HFunction) -> int:
    worst = 0
    for piece in f.pieces:
        if piece.lo is None or piece.hi is None:
            slope, _ = ex.linear_coeffs(piece.lower)
            worst = max(worst, int(math.floor(abs(slope))) + (0 if slope == 0 else 1))
    return worst


def from_below_sequence(f: HFunction) -> FunctionSequence:
    offset = _regularizing_offset(f)
    return FunctionSequence(
        lambda n: infconv_approx(f, n + offset, FROM_BELOW),
        "increasing",
        "inf-convolution from below",
    )


def def3_from_sequences(
    seq_f: FunctionSequence,
    seq_g: FunctionSequence,
    op: str,
    depth: int,
) -> LimitResult:
    """Order limit of (f_n op g_n) for user-supplied approximating
    sequences.  The sum of increasing sequences stays increasing; products
    carry no monotonicity claim and are completed after stabilization."""
    if op == "plus":
        tag = (
            "increasing"
            if seq_f.monotonicity == seq_g.monotonicity == "increasing"
            else "none"
        )
        combined = FunctionSequence(
            lambda n: pw.pointwise_add(seq_f.element(n), seq_g.element(n)), tag
        )
        if tag == "increasing":
            return order_limit_monotone(combined, depth)
        return order_limit_stabilized(combined, depth)
    if op == "times":
        combined = FunctionSequence(
            lambda n: pw.pointwise_mul(seq_f.element(n), seq_g.element(n)), "none"
        )
        return order_limit_stabilized(combined, depth)
    raise EngineError(f"unknown op {op!r}")


def _def3(f: HFunction, g: HFunction, op: str, depth: int) -> algebra.OpReport:
    if not (f.is_piecewise_linear and g.is_piecewise_linear):
        raise NotPiecewiseLinear(
            "order-limit operations are defined on the piecewise-linear subclass"
        )
    if not (pw.is_H_continuous(f) and pw.is_H_continuous(g)):
        raise NotHausdorffContinuous("operands must be Hausdorff continuous")
    result = def3_from_sequences(from_below_sequence(f), from_below_sequence(g), op, depth)
    reference = (
        algebra.oplus_def1(f, g) if op == "plus" else algebra.otimes_def1(f, g)
    )
    deviation = max_deviation(result.limit, reference.result, samples=1000)
    pointwise_op = pw.pointwise_add if op == "plus" else pw.pointwise_mul
    return algebra.OpReport(
        result=result.limit,
        pointwise=pointwise_op(f, g),
        definition="def3",
        witnesses={"def1": reference.result},
        max_deviation=deviation,
    )


def oplus_def3(f: HFunction, g: HFunction, depth: int = 4096) -> algebra.OpReport:
    """Ring sum as the order limit of sums of increasing continuous
    approximants."""
    return _def3(f, g, "plus", depth)


def otimes_def3(f: HFunction, g: HFunction, depth: int = 4096) -> algebra.OpReport:
    """Ring product as the completed pointwise limit of products of the
    approximants (numerical check; no monotonicity is assumed)."""
    return _def3(f, g, "times", depth)


def max_deviation(f: HFunction, g: HFunction, samples: int = 1000) -> Scalar:
    """Largest endpointwise distance over deterministic sample points plus
    both special-point sets."""
    xs = pw.func_sample_points(f, samples, tag="dev")
    xs.extend(p.x for p in f.points)
    xs.extend(p.x for p in g.points)
    worst = to_scalar(0)
    for x in xs:
        if not f.domain.contains(x):
            continue
        d = iv.distance(f.eval_at(x), g.eval_at(x))
        worst = max(worst, d)
    return worst
