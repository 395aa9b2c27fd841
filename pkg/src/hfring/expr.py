"""Closed-form piece expressions: parsing, printing, evaluation, analysis.

The grammar covers constants, the variable ``x``, the four arithmetic
operators, unary minus, and the functions sin, cos, sqrt, with arbitrary
composition (``sin(1/x)`` and the like).  ``*`` and ``/`` bind tighter
than ``+`` and ``-``; same-precedence operators associate left.

Constants are stored as exact rationals regardless of engine mode; decimal
literals are read with decimal semantics.  Polynomial subtrees have a
canonical coefficient form, which is what makes piece equality decidable
in rational mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple, Union

from .errors import ExprEvalError, ExprSyntaxError
from .scalars import RATIONAL, Scalar, format_scalar, get_mode

FUNCTIONS = ("sin", "cos", "sqrt")


@dataclass(frozen=True)
class Const:
    value: Fraction


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Add:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Sub:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Mul:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Div:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Fun:
    name: str
    arg: "Expr"


Expr = Union[Const, Var, Add, Sub, Mul, Div, Neg, Fun]

X = Var()


def const(value) -> Const:
    if isinstance(value, float):
        value = Fraction(str(value))
    return Const(Fraction(value))


ZERO = const(0)
ONE = const(1)


# ---------------------------------------------------------------------------
# Tokenizer and parser
# ---------------------------------------------------------------------------

Token = Tuple[str, str, int]  # kind, text, position


def tokenize(text: str) -> List[Token]:
    tokens: List[Token] = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c.isdigit() or (c == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            seen_dot = False
            while j < n and (text[j].isdigit() or (text[j] == "." and not seen_dot)):
                if text[j] == ".":
                    seen_dot = True
                j += 1
            tokens.append(("number", text[i:j], i))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("name", text[i:j], i))
            i = j
            continue
        if c in "+-*/()":
            tokens.append((c, c, i))
            i += 1
            continue
        raise ExprSyntaxError(f"unexpected character {c!r}", i)
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, tokens: List[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok[0] != "end":
            self.pos += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.peek()
        if tok[0] != kind:
            raise ExprSyntaxError(f"expected {kind!r}, found {tok[1]!r}", tok[2])
        return self.advance()

    def parse_expr(self) -> Expr:
        node = self.parse_term()
        while self.peek()[0] in ("+", "-"):
            op = self.advance()[0]
            right = self.parse_term()
            node = Add(node, right) if op == "+" else Sub(node, right)
        return node

    def parse_term(self) -> Expr:
        node = self.parse_unary()
        while self.peek()[0] in ("*", "/"):
            op = self.advance()[0]
            right = self.parse_unary()
            node = Mul(node, right) if op == "*" else Div(node, right)
        return node

    def parse_unary(self) -> Expr:
        if self.peek()[0] == "-":
            self.advance()
            return Neg(self.parse_unary())
        return self.parse_atom()

    def parse_atom(self) -> Expr:
        tok = self.peek()
        if tok[0] == "number":
            self.advance()
            return Const(Fraction(tok[1]))
        if tok[0] == "name":
            self.advance()
            if tok[1] == "x":
                return X
            if tok[1] in FUNCTIONS:
                self.expect("(")
                arg = self.parse_expr()
                self.expect(")")
                return Fun(tok[1], arg)
            raise ExprSyntaxError(f"unknown name {tok[1]!r}", tok[2])
        if tok[0] == "(":
            self.advance()
            node = self.parse_expr()
            self.expect(")")
            return node
        raise ExprSyntaxError(f"unexpected token {tok[1]!r}", tok[2])


def parse(text: str) -> Expr:
    """Parse expression text; raises ExprSyntaxError with a position."""
    parser = _Parser(tokenize(text))
    node = parser.parse_expr()
    end = parser.peek()
    if end[0] != "end":
        raise ExprSyntaxError(f"trailing input {end[1]!r}", end[2])
    return node


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

_PREC_ADD = 10
_PREC_MUL = 20
_PREC_NEG = 30
_PREC_ATOM = 100


def _prec(e: Expr) -> int:
    if isinstance(e, (Add, Sub)):
        return _PREC_ADD
    if isinstance(e, (Mul, Div)):
        return _PREC_MUL
    if isinstance(e, Neg):
        return _PREC_NEG
    if isinstance(e, Const):
        # constants may print as fractions ("-7/3"), which reparse as a
        # division; rank them by their printed shape
        text = format_scalar(e.value)
        if "/" in text:
            return _PREC_MUL
        if text.startswith("-"):
            return _PREC_NEG
    return _PREC_ATOM


def to_text(e: Expr) -> str:
    """Render an expression; printing then reparsing recovers the tree
    (up to constant-folding of fraction literals)."""
    if isinstance(e, Const):
        return format_scalar(e.value)
    if isinstance(e, Var):
        return "x"
    if isinstance(e, Neg):
        return "-" + _child(e.arg, _PREC_NEG)
    if isinstance(e, Fun):
        return f"{e.name}({to_text(e.arg)})"
    if isinstance(e, (Add, Sub)):
        op = " + " if isinstance(e, Add) else " - "
        # operators associate left, so right children need parens at equal
        # precedence to keep the tree shape under reparsing
        return _child(e.left, _PREC_ADD) + op + _child(e.right, _PREC_ADD + 1)
    if isinstance(e, (Mul, Div)):
        op = "*" if isinstance(e, Mul) else "/"
        return _child(e.left, _PREC_MUL) + op + _child(e.right, _PREC_MUL + 1)
    raise TypeError(f"not an expression: {e!r}")


def _child(e: Expr, minimum: int) -> str:
    text = to_text(e)
    if _prec(e) < minimum:
        return f"({text})"
    return text


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def evaluate(e: Expr, x: Scalar) -> Scalar:
    """Evaluate at a point of the current mode.

    Rational mode is exact and rejects sin/cos/sqrt (transcendental pieces
    need float mode).  Float mode may return non-finite values when probing
    limits; use `eval_finite` when a finite value is required.
    """
    mode = get_mode()
    if isinstance(e, Const):
        return e.value if mode == RATIONAL else float(e.value)
    if isinstance(e, Var):
        return x
    if isinstance(e, Neg):
        return -evaluate(e.arg, x)
    if isinstance(e, Add):
        return evaluate(e.left, x) + evaluate(e.right, x)
    if isinstance(e, Sub):
        return evaluate(e.left, x) - evaluate(e.right, x)
    if isinstance(e, Mul):
        return evaluate(e.left, x) * evaluate(e.right, x)
    if isinstance(e, Div):
        denom = evaluate(e.right, x)
        if denom == 0:
            raise ExprEvalError(f"division by zero in {to_text(e)}")
        return evaluate(e.left, x) / denom
    if isinstance(e, Fun):
        if mode == RATIONAL:
            raise ExprEvalError(
                f"{e.name} requires float mode (rational mode is for polynomial work)"
            )
        arg = evaluate(e.arg, x)
        try:
            if e.name == "sin":
                return math.sin(arg)
            if e.name == "cos":
                return math.cos(arg)
            return math.sqrt(arg)
        except ValueError as exc:
            raise ExprEvalError(f"{e.name} domain error at argument {arg!r}") from exc
    raise TypeError(f"not an expression: {e!r}")


def eval_finite(e: Expr, x: Scalar) -> Scalar:
    value = evaluate(e, x)
    if isinstance(value, float) and not math.isfinite(value):
        raise ExprEvalError(f"non-finite value of {to_text(e)}")
    return value


# ---------------------------------------------------------------------------
# Polynomial and rational analysis (always exact)
# ---------------------------------------------------------------------------


def poly_coeffs(e: Expr) -> Optional[List[Fraction]]:
    """Ascending coefficients when the expression is a polynomial in x
    (division allowed by nonzero constants only), else None."""
    if isinstance(e, Const):
        return [e.value]
    if isinstance(e, Var):
        return [Fraction(0), Fraction(1)]
    if isinstance(e, Neg):
        inner = poly_coeffs(e.arg)
        return None if inner is None else [-c for c in inner]
    if isinstance(e, (Add, Sub)):
        a = poly_coeffs(e.left)
        b = poly_coeffs(e.right)
        if a is None or b is None:
            return None
        sign = 1 if isinstance(e, Add) else -1
        out = [Fraction(0)] * max(len(a), len(b))
        for i, c in enumerate(a):
            out[i] += c
        for i, c in enumerate(b):
            out[i] += sign * c
        return _trim(out)
    if isinstance(e, Mul):
        a = poly_coeffs(e.left)
        b = poly_coeffs(e.right)
        if a is None or b is None:
            return None
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            for j, cb in enumerate(b):
                out[i + j] += ca * cb
        return _trim(out)
    if isinstance(e, Div):
        a = poly_coeffs(e.left)
        b = poly_coeffs(e.right)
        if a is None or b is None or len(b) != 1 or b[0] == 0:
            return None
        return _trim([c / b[0] for c in a])
    return None


def _trim(coeffs: List[Fraction]) -> List[Fraction]:
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def rational_coeffs(e: Expr) -> Optional[Tuple[List[Fraction], List[Fraction]]]:
    """(numerator, denominator) coefficient lists for a rational function,
    without cancellation; None when the tree contains sin/cos/sqrt."""
    if isinstance(e, Const):
        return [e.value], [Fraction(1)]
    if isinstance(e, Var):
        return [Fraction(0), Fraction(1)], [Fraction(1)]
    if isinstance(e, Neg):
        inner = rational_coeffs(e.arg)
        if inner is None:
            return None
        num, den = inner
        return [-c for c in num], den
    if isinstance(e, (Add, Sub, Mul, Div)):
        a = rational_coeffs(e.left)
        b = rational_coeffs(e.right)
        if a is None or b is None:
            return None
        (n1, d1), (n2, d2) = a, b
        if isinstance(e, Add):
            return _padd(_pmul(n1, d2), _pmul(n2, d1)), _pmul(d1, d2)
        if isinstance(e, Sub):
            return _padd(_pmul(n1, d2), [-c for c in _pmul(n2, d1)]), _pmul(d1, d2)
        if isinstance(e, Mul):
            return _pmul(n1, n2), _pmul(d1, d2)
        return _pmul(n1, d2), _pmul(d1, n2)
    return None


def _pmul(a: List[Fraction], b: List[Fraction]) -> List[Fraction]:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        for j, cb in enumerate(b):
            out[i + j] += ca * cb
    return _trim(out)


def _padd(a: List[Fraction], b: List[Fraction]) -> List[Fraction]:
    out = [Fraction(0)] * max(len(a), len(b))
    for i, c in enumerate(a):
        out[i] += c
    for i, c in enumerate(b):
        out[i] += c
    return _trim(out)


def classify(e: Expr) -> str:
    """Kind tag: polynomial, rational, or transcendental."""
    if poly_coeffs(e) is not None:
        return "polynomial"
    if rational_coeffs(e) is not None:
        return "rational"
    return "transcendental"


def degree(e: Expr) -> Optional[int]:
    coeffs = poly_coeffs(e)
    if coeffs is None:
        return None
    return len(coeffs) - 1


def is_linear(e: Expr) -> bool:
    """Piecewise-linear subclass flag: polynomial of degree <= 1."""
    d = degree(e)
    return d is not None and d <= 1


def linear_coeffs(e: Expr) -> Tuple[Fraction, Fraction]:
    """(slope, intercept) of a linear expression; exact."""
    coeffs = poly_coeffs(e)
    if coeffs is None or len(coeffs) > 2:
        raise ExprEvalError(f"not linear: {to_text(e)}")
    intercept = coeffs[0]
    slope = coeffs[1] if len(coeffs) > 1 else Fraction(0)
    return slope, intercept


def div_denominators(e: Expr):
    """Yield the denominator subtree of every division in the expression."""
    if isinstance(e, (Add, Sub, Mul, Div)):
        yield from div_denominators(e.left)
        yield from div_denominators(e.right)
        if isinstance(e, Div):
            yield e.right
    elif isinstance(e, (Neg, Fun)):
        yield from div_denominators(e.arg)


def _poly_derivative(c: List[Fraction]) -> List[Fraction]:
    return _trim([Fraction(i) * c[i] for i in range(1, len(c))]) if len(c) > 1 else [Fraction(0)]


def _poly_divmod(a: List[Fraction], b: List[Fraction]) -> Tuple[List[Fraction], List[Fraction]]:
    rem = list(a)
    quot = [Fraction(0)] * max(1, len(a) - len(b) + 1)
    while len(rem) >= len(b) and any(c != 0 for c in rem):
        shift = len(rem) - len(b)
        factor = rem[-1] / b[-1]
        quot[shift] = factor
        for i, c in enumerate(b):
            rem[shift + i] -= factor * c
        rem = _trim(rem)
        if rem == [Fraction(0)]:
            break
    return _trim(quot), _trim(rem)


def _poly_gcd(a: List[Fraction], b: List[Fraction]) -> List[Fraction]:
    a, b = _trim(list(a)), _trim(list(b))
    while b != [Fraction(0)]:
        _, r = _poly_divmod(a, b)
        a, b = b, r
    return a


def _sign_at(coeffs: List[Fraction], x) -> int:
    if x is None:
        return 0
    value = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        value = value * x + c
    return (value > 0) - (value < 0)


def _sign_at_infinity(coeffs: List[Fraction], positive: bool) -> int:
    lead = coeffs[-1]
    if lead == 0:
        return 0
    sign = (lead > 0) - (lead < 0)
    if not positive and (len(coeffs) - 1) % 2 == 1:
        sign = -sign
    return sign


def _variations(signs: List[int]) -> int:
    seq = [s for s in signs if s != 0]
    return sum(1 for a, b in zip(seq, seq[1:]) if a * b < 0)


def count_poly_roots_inside(coeffs: List[Fraction], lo, hi) -> int:
    """Distinct real roots of the polynomial strictly inside (lo, hi),
    counted exactly via a Sturm chain; None bounds mean +/- infinity."""
    p = _trim(list(coeffs))
    if len(p) == 1:
        return 0
    square_free, _ = _poly_divmod(p, _poly_gcd(p, _poly_derivative(p)))
    chain = [square_free, _poly_derivative(square_free)]
    while chain[-1] != [Fraction(0)] and len(chain[-1]) > 1:
        _, rem = _poly_divmod(chain[-2], chain[-1])
        if rem == [Fraction(0)]:
            break
        chain.append([-c for c in rem])
    if chain[-1] == [Fraction(0)]:
        chain.pop()

    def variations_at(x, positive_inf: bool) -> int:
        if x is None:
            return _variations([_sign_at_infinity(q, positive_inf) for q in chain])
        return _variations([_sign_at(q, x) for q in chain])

    lo_f = Fraction(str(lo)) if lo is not None and not isinstance(lo, Fraction) else lo
    hi_f = Fraction(str(hi)) if hi is not None and not isinstance(hi, Fraction) else hi
    count = variations_at(lo_f, False) - variations_at(hi_f, True)
    if hi_f is not None and _sign_at(square_free, hi_f) == 0:
        count -= 1  # root exactly at the open right end does not count
    return max(0, count)


def limit_at_infinity(e: Expr, sign: int) -> Optional[Fraction]:
    """Exact limit of a rational function as x tends to +/- infinity;
    None when the limit is infinite or the expression is transcendental."""
    rc = rational_coeffs(e)
    if rc is None:
        return None
    num, den = rc
    dn, dd = len(num) - 1, len(den) - 1
    if num == [Fraction(0)]:
        return Fraction(0)
    if dn > dd:
        return None
    if dn < dd:
        return Fraction(0)
    return num[-1] / den[-1]


# ---------------------------------------------------------------------------
# Canonical form and smart constructors
# ---------------------------------------------------------------------------


def canonical(e: Expr) -> Expr:
    """Canonicalize: polynomial subtrees become coefficient form; constant
    subtrees fold; additive/multiplicative identities drop out.  Structural
    equality of canonical polynomials is coefficient equality."""
    coeffs = poly_coeffs(e)
    if coeffs is not None:
        return poly_expr(coeffs)
    return _fold(e)


def poly_expr(coeffs: List[Fraction]) -> Expr:
    coeffs = _trim(list(coeffs))
    terms: List[Expr] = []
    for k, c in enumerate(coeffs):
        if c == 0:
            continue
        terms.append(_poly_term(c, k))
    if not terms:
        return Const(Fraction(0))
    node = terms[0]
    for term in terms[1:]:
        node = Add(node, term)
    return node


def _poly_term(c: Fraction, k: int) -> Expr:
    if k == 0:
        return Const(c)
    power: Expr = X
    for _ in range(k - 1):
        power = Mul(power, X)
    if c == 1:
        return power
    return Mul(Const(c), power)


def _fold(e: Expr) -> Expr:
    if isinstance(e, (Const, Var)):
        return e
    if isinstance(e, Neg):
        arg = canonical(e.arg)
        if isinstance(arg, Const):
            return Const(-arg.value)
        if isinstance(arg, Neg):
            return arg.arg
        return Neg(arg)
    if isinstance(e, Fun):
        return Fun(e.name, canonical(e.arg))
    left = canonical(e.left)
    right = canonical(e.right)
    if isinstance(left, Const) and isinstance(right, Const):
        if isinstance(e, Add):
            return Const(left.value + right.value)
        if isinstance(e, Sub):
            return Const(left.value - right.value)
        if isinstance(e, Mul):
            return Const(left.value * right.value)
        if right.value != 0:
            return Const(left.value / right.value)
    if isinstance(e, Add):
        if left == ZERO:
            return right
        if right == ZERO:
            return left
        return Add(left, right)
    if isinstance(e, Sub):
        if right == ZERO:
            return left
        return Sub(left, right)
    if isinstance(e, Mul):
        if left == ZERO or right == ZERO:
            return ZERO
        if left == ONE:
            return right
        if right == ONE:
            return left
        return Mul(left, right)
    if isinstance(e, Div):
        if right == ONE:
            return left
        return Div(left, right)
    raise TypeError(f"not an expression: {e!r}")


def add(a: Expr, b: Expr) -> Expr:
    return canonical(Add(a, b))


def sub(a: Expr, b: Expr) -> Expr:
    return canonical(Sub(a, b))


def mul(a: Expr, b: Expr) -> Expr:
    return canonical(Mul(a, b))


def negate(a: Expr) -> Expr:
    return canonical(Neg(a))


def exact_equal(a: Expr, b: Expr) -> bool:
    """Decidable equality: canonical structural match, with an exact
    cross-multiplication fallback for rational functions."""
    ca, cb = canonical(a), canonical(b)
    if ca == cb:
        return True
    ra, rb = rational_coeffs(ca), rational_coeffs(cb)
    if ra is not None and rb is not None:
        return _pmul(ra[0], rb[1]) == _pmul(rb[0], ra[1])
    return False
