"""Ring operations on Hausdorff-continuous functions.

Two equivalent constructions are implemented: completing the pointwise
interval operation (route 1, computed as F(I(S(.))) and cross-checked
against F(S(I(.)))), and restricting the pointwise operation to the locus
where both operands are point-valued, then extending back (route 2).  The
module also evaluates whole +/x expressions over bound operands and checks
the commutative-ring axioms over seeded random suites.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Union

from . import baire
from . import interval as iv
from . import piecewise as pw
from .errors import (
    EngineError,
    InternalConsistencyError,
    NotHausdorffContinuous,
    UnboundOperandError,
)
from .expr import ExprSyntaxError, tokenize
from .piecewise import DenseSubsetSpec, HFunction
from .scalars import Scalar


# ---------------------------------------------------------------------------
# Expressions over function operands
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OperandRef:
    name: str


@dataclass(frozen=True)
class TreePlus:
    left: "ExprTree"
    right: "ExprTree"


@dataclass(frozen=True)
class TreeTimes:
    left: "ExprTree"
    right: "ExprTree"


ExprTree = Union[OperandRef, TreePlus, TreeTimes]


def parse_operand_expr(text: str) -> ExprTree:
    """Parse an expression over named operands with + and * only."""
    tokens = tokenize(text)
    pos = [0]

    def peek():
        return tokens[pos[0]]

    def advance():
        tok = tokens[pos[0]]
        if tok[0] != "end":
            pos[0] += 1
        return tok

    def parse_sum() -> ExprTree:
        node = parse_product()
        while peek()[0] == "+":
            advance()
            node = TreePlus(node, parse_product())
        return node

    def parse_product() -> ExprTree:
        node = parse_atom()
        while peek()[0] == "*":
            advance()
            node = TreeTimes(node, parse_atom())
        return node

    def parse_atom() -> ExprTree:
        tok = peek()
        if tok[0] == "name":
            advance()
            return OperandRef(tok[1])
        if tok[0] == "(":
            advance()
            node = parse_sum()
            if peek()[0] != ")":
                raise ExprSyntaxError("expected ')'", peek()[2])
            advance()
            return node
        raise ExprSyntaxError(f"unexpected token {tok[1]!r}", tok[2])

    node = parse_sum()
    if peek()[0] != "end":
        raise ExprSyntaxError(f"trailing input {peek()[1]!r}", peek()[2])
    return node


def operand_names(tree: ExprTree) -> List[str]:
    if isinstance(tree, OperandRef):
        return [tree.name]
    names = operand_names(tree.left)
    for name in operand_names(tree.right):
        if name not in names:
            names.append(name)
    return names


# ---------------------------------------------------------------------------
# The ring operations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OpReport:
    """Result of a ring operation with its audit trail."""

    result: HFunction
    pointwise: HFunction
    definition: str
    witnesses: Dict[str, HFunction] = field(default_factory=dict)
    max_deviation: Optional[Scalar] = None


def _require_h_continuous(*fs: HFunction) -> None:
    for f in fs:
        if not pw.is_H_continuous(f):
            raise NotHausdorffContinuous(
                "operand is not Hausdorff continuous; complete it with fis first"
            )


def _apply_declared(s: HFunction, declared) -> HFunction:
    if not declared:
        return s
    for x, (liminf, limsup) in declared.items():
        s = pw.declare_envelope(s, x, liminf, limsup)
    return s


def _op_def1(f: HFunction, g: HFunction, pointwise_op, declared) -> OpReport:
    _require_h_continuous(f, g)
    s = _apply_declared(pointwise_op(f, g), declared)
    via_fis = baire.fis(s)
    via_fsi = baire.fsi(s)
    if not pw.func_equal(via_fis, via_fsi):
        raise InternalConsistencyError(
            "F(I(S(.))) and F(S(I(.))) disagree; uniqueness is violated"
        )
    return OpReport(
        result=via_fis,
        pointwise=s,
        definition="def1",
        witnesses={"fis": via_fis, "fsi": via_fsi},
    )


def oplus_def1(f: HFunction, g: HFunction, declared=None) -> OpReport:
    """Ring sum: the unique H-continuous function inside the pointwise sum,
    computed by completing the regularized pointwise sum."""
    return _op_def1(f, g, pw.pointwise_add, declared)


def otimes_def1(f: HFunction, g: HFunction, declared=None) -> OpReport:
    """Ring product, same construction over the pointwise product."""
    return _op_def1(f, g, pw.pointwise_mul, declared)


def extend(phi: HFunction, spec: DenseSubsetSpec) -> HFunction:
    """Unique H-continuous extension of a function that is H-continuous off
    the excluded points: graph completion over the punctured dense set."""
    g = pw.insert_breakpoints(
        phi, [x for x in spec.excluded if phi.point_index(x) is None]
    )
    if not all(p.is_real for p in g.pieces):
        raise NotHausdorffContinuous(
            "restriction has proper interval values on pieces"
        )
    for i, point in enumerate(g.points):
        if spec.admits(point.x):
            target = pw.punctured_completion_at(g, i)
            if not iv.interval_eq(target, point.value):
                raise NotHausdorffContinuous(
                    f"restriction is not Hausdorff continuous at {point.x!r}"
                )
    points = []
    for i, point in enumerate(g.points):
        if spec.admits(point.x):
            points.append(point)
        else:
            points.append(
                pw.SpecialPoint(point.x, pw.punctured_completion_at(g, i))
            )
    return pw.normalize(HFunction(g.domain, tuple(points), g.pieces))


def _op_def2(f: HFunction, g: HFunction, pointwise_op, declared) -> OpReport:
    _require_h_continuous(f, g)
    s = _apply_declared(pointwise_op(f, g), declared)
    spec = pw.common_point_domain([f, g])
    result = extend(s, spec)
    return OpReport(result=result, pointwise=s, definition="def2")


def oplus_def2(f: HFunction, g: HFunction, declared=None) -> OpReport:
    """Ring sum via restriction to the common point-valued locus followed
    by the unique H-continuous extension."""
    return _op_def2(f, g, pw.pointwise_add, declared)


def otimes_def2(f: HFunction, g: HFunction, declared=None) -> OpReport:
    return _op_def2(f, g, pw.pointwise_mul, declared)


def additive_inverse(f: HFunction) -> HFunction:
    """Value-wise reflection [-upper, -lower]; the ring sum with it is the
    constant zero function."""
    _require_h_continuous(f)
    return pw.normalize(pw.pointwise_neg(f))


def eval_expr(
    tree: ExprTree,
    bindings: Dict[str, HFunction],
    mode: str = "ring",
    check_extension: bool = False,
) -> HFunction:
    """Evaluate a +/x expression over bound operands.

    mode="pointwise" folds the pointwise interval operations (S-continuous
    result); mode="ring" folds the ring operations (H-continuous result).
    With ``check_extension`` the identity between the extension of the
    pointwise result and the ring result is verified.
    """
    if mode not in ("ring", "pointwise"):
        raise EngineError(f"unknown evaluation mode {mode!r}")
    for name in operand_names(tree):
        if name not in bindings:
            raise UnboundOperandError(f"operand {name!r} is not bound")

    def fold(node: ExprTree) -> HFunction:
        if isinstance(node, OperandRef):
            return bindings[node.name]
        left, right = fold(node.left), fold(node.right)
        if mode == "pointwise":
            op = pw.pointwise_add if isinstance(node, TreePlus) else pw.pointwise_mul
            return op(left, right)
        op = oplus_def1 if isinstance(node, TreePlus) else otimes_def1
        return op(left, right).result

    result = fold(tree)
    if mode == "ring" and check_extension:
        used = [bindings[name] for name in operand_names(tree)]
        pointwise = eval_expr(tree, bindings, mode="pointwise")
        extended = extend(pointwise, pw.common_point_domain(used))
        if not pw.func_equal(extended, result):
            raise InternalConsistencyError(
                "extension of the pointwise expression disagrees with the ring result"
            )
    return pw.normalize(result) if mode == "ring" else result


# ---------------------------------------------------------------------------
# Ring axiom verification
# ---------------------------------------------------------------------------


@dataclass
class AxiomResult:
    name: str
    passed: bool = True
    cases: int = 0
    counterexample: Optional[str] = None

    def record(self, ok: bool, description: str) -> None:
        self.cases += 1
        if not ok and self.passed:
            self.passed = False
            self.counterexample = description


@dataclass
class RingReport:
    axioms: Dict[str, AxiomResult]

    @property
    def all_passed(self) -> bool:
        return all(a.passed for a in self.axioms.values())

    def to_json(self) -> dict:
        return {
            "all_passed": self.all_passed,
            "axioms": {
                name: {
                    "passed": a.passed,
                    "cases": a.cases,
                    "counterexample": a.counterexample,
                }
                for name, a in sorted(self.axioms.items())
            },
        }


AXIOMS = (
    "add_commutative",
    "mul_commutative",
    "add_associative",
    "mul_associative",
    "distributive",
    "additive_identity",
    "multiplicative_identity",
    "additive_inverse",
)


def verify_ring(
    functions: Sequence[HFunction],
    add_op: Optional[Callable[[HFunction, HFunction], HFunction]] = None,
    mul_op: Optional[Callable[[HFunction, HFunction], HFunction]] = None,
) -> RingReport:
    """Check the commutative-ring axioms over a function suite.

    Pairs and triples are drawn deterministically from the suite.  The
    default operations are the route-1 ring operations; injecting others
    (e.g. the raw pointwise operations) is how the verification itself is
    smoke-tested."""
    if add_op is None:
        add_op = lambda a, b: oplus_def1(a, b).result
    if mul_op is None:
        mul_op = lambda a, b: otimes_def1(a, b).result
    suite = list(functions)
    if not suite:
        raise EngineError("empty suite")
    domain = suite[0].domain
    zero = pw.constant_function(domain, 0)
    one = pw.constant_function(domain, 1)
    report = RingReport({name: AxiomResult(name) for name in AXIOMS})
    n = len(suite)
    for i, f in enumerate(suite):
        g = suite[(7 * i + 1) % n]
        h = suite[(13 * i + 2) % n]
        label = f"suite[{i}] with suite[{(7 * i + 1) % n}], suite[{(13 * i + 2) % n}]"
        fg = add_op(f, g)
        report.axioms["add_commutative"].record(
            pw.func_equal(fg, add_op(g, f)), label
        )
        fg_m = mul_op(f, g)
        report.axioms["mul_commutative"].record(
            pw.func_equal(fg_m, mul_op(g, f)), label
        )
        report.axioms["add_associative"].record(
            pw.func_equal(add_op(fg, h), add_op(f, add_op(g, h))), label
        )
        report.axioms["mul_associative"].record(
            pw.func_equal(mul_op(fg_m, h), mul_op(f, mul_op(g, h))), label
        )
        report.axioms["distributive"].record(
            pw.func_equal(
                mul_op(fg, h), add_op(mul_op(f, h), mul_op(g, h))
            ),
            label,
        )
        report.axioms["additive_identity"].record(
            pw.func_equal(add_op(f, zero), pw.normalize(f)), label
        )
        report.axioms["multiplicative_identity"].record(
            pw.func_equal(mul_op(f, one), pw.normalize(f)), label
        )
        try:
            inverse = additive_inverse(f)
            inverse_ok = pw.func_equal(add_op(f, inverse), zero)
        except NotHausdorffContinuous:
            inverse_ok = False
        report.axioms["additive_inverse"].record(inverse_ok, label)
    return report
