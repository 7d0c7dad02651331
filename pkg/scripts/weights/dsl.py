"""
Weight expression DSL.

Grammar (EBNF):

    expression     := additive [ 'if' disjunction 'else' expression ]
    additive       := multiplicative { ('+' | '-') multiplicative }
    multiplicative := unary { ('*' | '/') unary }
    unary          := '-' unary | power
    power          := atom [ ('^' | '**') unary ]          (right associative)
    atom           := NUMBER | VARIABLE | CONSTANT
                    | FUNCTION '(' expression { ',' expression } ')'
                    | '(' expression ')'
    disjunction    := conjunction { 'or' conjunction }
    conjunction    := negation { 'and' negation }
    negation       := 'not' negation | comparison
    comparison     := additive ('<' | '<=' | '>' | '>=' | '==' | '!=') additive

    VARIABLE  := 'i' | 'j' | 'k'       (index components and level)
    CONSTANT  := 'e' | 'pi'
    FUNCTION  := 'log' | 'exp' | 'sqrt' | 'min' | 'max'

Expressions are closed-form: no user-defined names and no recursion.
Evaluation is vectorized over index prefixes and carried out on signed
logarithms, so intermediate magnitudes like 2^((k*j)^i) stay representable.
"""

import math
import re
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import sympy

from workbench.errors import WeightExprError

VARIABLES = ("i", "j", "k")
CONSTANTS = {"e": math.e, "pi": math.pi}
FUNCTIONS = {"log": 1, "exp": 1, "sqrt": 1, "min": None, "max": None}
KEYWORDS = {"if", "else", "and", "or", "not"}
COMPARISONS = ("<", "<=", ">", ">=", "==", "!=")


# ---------------------------------------------------------------------------
# Syntax tree
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    text: str

    @property
    def value(self) -> float:
        return float(self.text)


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    args: Tuple["Node", ...]


@dataclass(frozen=True)
class Compare:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Logical:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Not:
    operand: "Node"


@dataclass(frozen=True)
class Piecewise:
    condition: "Node"
    then: "Node"
    otherwise: "Node"


Node = Union[Num, Var, Const, Neg, BinOp, Call, Compare, Logical, Not, Piecewise]

ZERO = Num("0")
ONE = Num("1")


def num(value: Union[int, float, str]) -> Num:
    """Literal node with an exact decimal rendering."""
    if isinstance(value, str):
        return Num(value)
    if isinstance(value, int) or float(value).is_integer():
        return Num(str(int(value)))
    return Num(repr(float(value)))


def mul(left: Node, right: Node) -> Node:
    return BinOp("*", left, right)


def div(left: Node, right: Node) -> Node:
    return BinOp("/", left, right)


def power(base: Node, exponent: Node) -> Node:
    return BinOp("^", base, exponent)


def add(left: Node, right: Node) -> Node:
    return BinOp("+", left, right)


# ---------------------------------------------------------------------------
# Tokenizer and parser
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(r"""
    (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>\*\*|<=|>=|==|!=|[-+*/^(),<>])
  | (?P<space>\s+)
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    position: int


def tokenize(text: str) -> List[Token]:
    tokens = []
    position = 0
    while position < len(text):
        match = _TOKEN_RE.match(text, position)
        if not match:
            raise WeightExprError(f"unexpected character {text[position]!r}", position)
        kind = match.lastgroup
        if kind != "space":
            token_text = match.group(kind)
            if kind == "op" and token_text == "**":
                token_text = "^"
            tokens.append(Token(kind, token_text, position))
        position = match.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


class _Parser:
    """Recursive-descent parser over a token list."""

    def __init__(self, text: str, allowed: Iterable[str]):
        self.tokens = tokenize(text)
        self.index = 0
        self.allowed = frozenset(allowed)

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def _advance(self) -> Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def _accept(self, text: str) -> bool:
        if self.current.kind in ("op", "name") and self.current.text == text:
            self.index += 1
            return True
        return False

    def _expect(self, text: str):
        if not self._accept(text):
            found = self.current.text or "end of input"
            raise WeightExprError(f"expected {text!r}, found {found!r}", self.current.position)

    def parse(self) -> Node:
        node = self.expression()
        if self.current.kind != "end":
            raise WeightExprError(f"unexpected {self.current.text!r}", self.current.position)
        return node

    def expression(self) -> Node:
        node = self.additive()
        if self._accept("if"):
            condition = self.disjunction()
            self._expect("else")
            otherwise = self.expression()
            node = Piecewise(condition, node, otherwise)
        return node

    def additive(self) -> Node:
        node = self.multiplicative()
        while self.current.kind == "op" and self.current.text in ("+", "-"):
            op = self._advance().text
            node = BinOp(op, node, self.multiplicative())
        return node

    def multiplicative(self) -> Node:
        node = self.unary()
        while self.current.kind == "op" and self.current.text in ("*", "/"):
            op = self._advance().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self._accept("-"):
            return Neg(self.unary())
        return self.power()

    def power(self) -> Node:
        node = self.atom()
        if self._accept("^"):
            node = BinOp("^", node, self.unary())
        return node

    def atom(self) -> Node:
        token = self.current
        if token.kind == "number":
            self._advance()
            return Num(token.text)
        if token.kind == "op" and token.text == "(":
            self._advance()
            node = self.expression()
            self._expect(")")
            return node
        if token.kind == "name":
            name = token.text
            if name in FUNCTIONS:
                self._advance()
                return self._call(name, token.position)
            if name in CONSTANTS:
                self._advance()
                return Const(name)
            if name in VARIABLES:
                if name not in self.allowed:
                    raise WeightExprError(f"variable {name!r} is not allowed here", token.position)
                self._advance()
                return Var(name)
            raise WeightExprError(f"unknown name {name!r}", token.position)
        found = token.text or "end of input"
        raise WeightExprError(f"unexpected {found!r}", token.position)

    def _call(self, name: str, position: int) -> Node:
        self._expect("(")
        args = [self.expression()]
        while self._accept(","):
            args.append(self.expression())
        self._expect(")")
        arity = FUNCTIONS[name]
        if arity is not None and len(args) != arity:
            raise WeightExprError(f"{name} takes {arity} argument(s)", position)
        if arity is None and len(args) < 2:
            raise WeightExprError(f"{name} takes at least 2 arguments", position)
        return Call(name, tuple(args))

    def disjunction(self) -> Node:
        node = self.conjunction()
        while self._accept("or"):
            node = Logical("or", node, self.conjunction())
        return node

    def conjunction(self) -> Node:
        node = self.negation()
        while self._accept("and"):
            node = Logical("and", node, self.negation())
        return node

    def negation(self) -> Node:
        if self._accept("not"):
            return Not(self.negation())
        left = self.additive()
        token = self.current
        if token.kind != "op" or token.text not in COMPARISONS:
            raise WeightExprError("expected a comparison", token.position)
        self._advance()
        return Compare(token.text, left, self.additive())


def parse(text: str, allowed: Iterable[str] = VARIABLES) -> Node:
    """Parse source text into a syntax tree (no semantic validation)."""
    return _Parser(text, allowed).parse()


def render(node: Node) -> str:
    """Render a tree back to parseable source, fully parenthesized."""
    if isinstance(node, Num):
        return node.text
    if isinstance(node, (Var, Const)):
        return node.name
    if isinstance(node, Neg):
        return f"(-{render(node.operand)})"
    if isinstance(node, BinOp):
        return f"({render(node.left)} {node.op} {render(node.right)})"
    if isinstance(node, Call):
        return f"{node.func}({', '.join(render(a) for a in node.args)})"
    if isinstance(node, Compare):
        return f"{render(node.left)} {node.op} {render(node.right)}"
    if isinstance(node, Logical):
        return f"({render(node.left)} {node.op} {render(node.right)})"
    if isinstance(node, Not):
        return f"not {render(node.operand)}"
    if isinstance(node, Piecewise):
        return f"({render(node.then)} if {render(node.condition)} else {render(node.otherwise)})"
    raise TypeError(f"not a DSL node: {node!r}")


def free_variables(node: Node) -> FrozenSet[str]:
    if isinstance(node, Var):
        return frozenset([node.name])
    if isinstance(node, (Num, Const)):
        return frozenset()
    if isinstance(node, (Neg, Not)):
        return free_variables(node.operand)
    if isinstance(node, Call):
        return frozenset().union(*(free_variables(a) for a in node.args))
    if isinstance(node, Piecewise):
        return (free_variables(node.condition) | free_variables(node.then)
                | free_variables(node.otherwise))
    return free_variables(node.left) | free_variables(node.right)


def substitute(node: Node, bindings: Mapping[str, Node]) -> Node:
    """Replace variables by subtrees."""
    if isinstance(node, Var):
        return bindings.get(node.name, node)
    if isinstance(node, (Num, Const)):
        return node
    if isinstance(node, Neg):
        return Neg(substitute(node.operand, bindings))
    if isinstance(node, Not):
        return Not(substitute(node.operand, bindings))
    if isinstance(node, Call):
        return Call(node.func, tuple(substitute(a, bindings) for a in node.args))
    if isinstance(node, Piecewise):
        return Piecewise(substitute(node.condition, bindings),
                         substitute(node.then, bindings),
                         substitute(node.otherwise, bindings))
    return type(node)(node.op, substitute(node.left, bindings), substitute(node.right, bindings))


# ---------------------------------------------------------------------------
# Signed-log evaluation
# ---------------------------------------------------------------------------

# A signed log pairs a sign array (-1, 0, +1) with log|value|.
SignedLog = Tuple[np.ndarray, np.ndarray]

_NEG_INF = float("-inf")
_POS_INF = float("inf")


def _constant(value: float, shape) -> SignedLog:
    sign = np.full(shape, float(np.sign(value)))
    magnitude = math.log(abs(value)) if value != 0 else _NEG_INF
    return sign, np.full(shape, magnitude)


def from_values(values: np.ndarray) -> SignedLog:
    values = np.asarray(values, dtype=float)
    with np.errstate(divide="ignore"):
        return np.sign(values), np.log(np.abs(values))


def to_values(x: SignedLog) -> np.ndarray:
    sign, log = x
    with np.errstate(over="ignore", invalid="ignore"):
        return np.where(sign == 0, 0.0, sign * np.exp(log))


def _normalize(sign, log) -> SignedLog:
    zero = log == _NEG_INF
    return np.where(zero, 0.0, sign), np.where(sign == 0, _NEG_INF, log)


def _add(a: SignedLog, b: SignedLog) -> SignedLog:
    sa, la = a
    sb, lb = b
    with np.errstate(invalid="ignore", over="ignore"):
        same = sa * sb >= 0
        s_same = np.where(sa != 0, sa, sb)
        l_same = np.logaddexp(la, lb)
        hi = np.maximum(la, lb)
        lo = np.minimum(la, lb)
        s_opp = np.where(la >= lb, sa, sb)
        l_opp = hi + np.log1p(-np.exp(lo - hi))
    return _normalize(np.where(same, s_same, s_opp), np.where(same, l_same, l_opp))


def _mul(a: SignedLog, b: SignedLog) -> SignedLog:
    sa, la = a
    sb, lb = b
    sign = sa * sb
    with np.errstate(invalid="ignore"):
        log = np.where(sign == 0, _NEG_INF, la + lb)
    return sign, log


def _div(a: SignedLog, b: SignedLog) -> SignedLog:
    sa, la = a
    sb, lb = b
    with np.errstate(invalid="ignore"):
        log = la - lb
    log = np.where(np.isnan(log), _POS_INF, log)
    by_zero = sb == 0
    sign = np.where(by_zero, np.where(sa != 0, sa, 1.0), sa * sb)
    log = np.where(by_zero, _POS_INF, log)
    return _normalize(sign, log)


def _pow(a: SignedLog, b: SignedLog) -> SignedLog:
    sa, la = a
    exponent = to_values(b)
    with np.errstate(invalid="ignore", over="ignore"):
        log = exponent * la
    # x^0 = 1 and 1^inf = 1
    log = np.where((exponent == 0) | (la == 0), 0.0, log)
    sign = np.ones_like(log)
    # zero base
    zero_base = sa == 0
    log = np.where(zero_base & (exponent > 0), _NEG_INF, log)
    log = np.where(zero_base & (exponent < 0), _POS_INF, log)
    # negative base only for integer exponents
    negative = sa < 0
    integral = np.isfinite(exponent) & (np.floor(exponent) == exponent)
    odd = integral & (np.mod(exponent, 2) == 1)
    sign = np.where(negative & odd, -1.0, sign)
    log = np.where(negative & ~integral, np.nan, log)
    return _normalize(sign, log)


def _exp(a: SignedLog) -> SignedLog:
    value = to_values(a)
    return _normalize(np.ones_like(value), value)


def _log(a: SignedLog) -> SignedLog:
    sa, la = a
    sign, magnitude = from_values(la)
    sign = np.where(sa == 0, -1.0, sign)
    magnitude = np.where(sa == 0, _POS_INF, magnitude)
    magnitude = np.where(sa < 0, np.nan, magnitude)
    return _normalize(sign, magnitude)


def _less(a: SignedLog, b: SignedLog) -> np.ndarray:
    sa, la = a
    sb, lb = b
    return (sa < sb) | ((sa == sb) & (sa > 0) & (la < lb)) | ((sa == sb) & (sa < 0) & (la > lb))


def _equal(a: SignedLog, b: SignedLog) -> np.ndarray:
    sa, la = a
    sb, lb = b
    return (sa == sb) & ((sa == 0) | (la == lb))


def _select(mask: np.ndarray, a: SignedLog, b: SignedLog) -> SignedLog:
    return np.where(mask, a[0], b[0]), np.where(mask, a[1], b[1])


class Evaluator:
    """Evaluates a tree on coordinate arrays (all of one shape)."""

    def __init__(self, env: Mapping[str, Union[float, np.ndarray]]):
        arrays = {name: np.asarray(value, dtype=float) for name, value in env.items()}
        shapes = {a.shape for a in arrays.values() if a.ndim > 0}
        self.shape = shapes.pop() if shapes else ()
        self.env = {name: from_values(np.broadcast_to(a, self.shape)) for name, a in arrays.items()}

    def __call__(self, node: Node) -> SignedLog:
        with np.errstate(all="ignore"):
            return self._eval(node)

    def _eval(self, node: Node) -> SignedLog:
        if isinstance(node, Num):
            return _constant(node.value, self.shape)
        if isinstance(node, Const):
            return _constant(CONSTANTS[node.name], self.shape)
        if isinstance(node, Var):
            if node.name not in self.env:
                raise WeightExprError(f"variable {node.name!r} is unbound")
            return self.env[node.name]
        if isinstance(node, Neg):
            sign, log = self._eval(node.operand)
            return -sign, log
        if isinstance(node, BinOp):
            left = self._eval(node.left)
            right = self._eval(node.right)
            if node.op == "+":
                return _add(left, right)
            if node.op == "-":
                return _add(left, (-right[0], right[1]))
            if node.op == "*":
                return _mul(left, right)
            if node.op == "/":
                return _div(left, right)
            return _pow(left, right)
        if isinstance(node, Call):
            args = [self._eval(a) for a in node.args]
            if node.func == "exp":
                return _exp(args[0])
            if node.func == "log":
                return _log(args[0])
            if node.func == "sqrt":
                return _pow(args[0], _constant(0.5, self.shape))
            result = args[0]
            for other in args[1:]:
                if node.func == "min":
                    result = _select(_less(other, result), other, result)
                else:
                    result = _select(_less(result, other), other, result)
            return result
        if isinstance(node, Piecewise):
            mask = self.predicate(node.condition)
            return _select(mask, self._eval(node.then), self._eval(node.otherwise))
        raise WeightExprError(f"predicate used as a value: {render(node)}")

    def predicate(self, node: Node) -> np.ndarray:
        if isinstance(node, Compare):
            left = self._eval(node.left)
            right = self._eval(node.right)
            if node.op == "<":
                mask = _less(left, right)
            elif node.op == "<=":
                mask = _less(left, right) | _equal(left, right)
            elif node.op == ">":
                mask = _less(right, left)
            elif node.op == ">=":
                mask = _less(right, left) | _equal(left, right)
            elif node.op == "==":
                mask = _equal(left, right)
            else:
                mask = ~_equal(left, right)
            return np.broadcast_to(mask, self.shape)
        if isinstance(node, Logical):
            left = self.predicate(node.left)
            right = self.predicate(node.right)
            return (left & right) if node.op == "and" else (left | right)
        if isinstance(node, Not):
            return ~self.predicate(node.operand)
        raise WeightExprError(f"value used as a predicate: {render(node)}")


def evaluate(node: Node, env: Mapping[str, Union[float, np.ndarray]]) -> SignedLog:
    return Evaluator(env)(node)


def evaluate_log(node: Node, env: Mapping[str, Union[float, np.ndarray]]) -> np.ndarray:
    """Log of a nonnegative expression; raises on negative or undefined values."""
    sign, log = evaluate(node, env)
    bad = (sign < 0) | np.isnan(log)
    if np.any(bad):
        where = int(np.argmax(np.ravel(bad)))
        kind = "negative" if np.ravel(sign)[where] < 0 else "undefined"
        raise WeightExprError(f"{kind} value in {render(node)} at sample {where + 1}")
    return log


# ---------------------------------------------------------------------------
# Symbolic conversion
# ---------------------------------------------------------------------------

def to_sympy(node: Node, symbols: Mapping[str, sympy.Symbol]) -> sympy.Expr:
    """Exact sympy image of a tree (decimal literals become rationals)."""
    if isinstance(node, Num):
        return sympy.Rational(node.text)
    if isinstance(node, Const):
        return sympy.E if node.name == "e" else sympy.pi
    if isinstance(node, Var):
        return symbols[node.name]
    if isinstance(node, Neg):
        return -to_sympy(node.operand, symbols)
    if isinstance(node, BinOp):
        left = to_sympy(node.left, symbols)
        right = to_sympy(node.right, symbols)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if node.op == "*":
            return left * right
        if node.op == "/":
            return left / right
        return left ** right
    if isinstance(node, Call):
        args = [to_sympy(a, symbols) for a in node.args]
        if node.func == "exp":
            return sympy.exp(args[0])
        if node.func == "log":
            return sympy.log(args[0])
        if node.func == "sqrt":
            return sympy.sqrt(args[0])
        return sympy.Min(*args) if node.func == "min" else sympy.Max(*args)
    if isinstance(node, Piecewise):
        return sympy.Piecewise((to_sympy(node.then, symbols), _sympy_predicate(node.condition, symbols)),
                               (to_sympy(node.otherwise, symbols), True))
    raise WeightExprError(f"predicate used as a value: {render(node)}")


def _sympy_predicate(node: Node, symbols: Mapping[str, sympy.Symbol]):
    if isinstance(node, Compare):
        left = to_sympy(node.left, symbols)
        right = to_sympy(node.right, symbols)
        return {
            "<": sympy.Lt, "<=": sympy.Le, ">": sympy.Gt,
            ">=": sympy.Ge, "==": sympy.Eq, "!=": sympy.Ne,
        }[node.op](left, right)
    if isinstance(node, Logical):
        parts = (_sympy_predicate(node.left, symbols), _sympy_predicate(node.right, symbols))
        return sympy.And(*parts) if node.op == "and" else sympy.Or(*parts)
    if isinstance(node, Not):
        return sympy.Not(_sympy_predicate(node.operand, symbols))
    raise WeightExprError(f"value used as a predicate: {render(node)}")


# ---------------------------------------------------------------------------
# Validated expressions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeightExpr:
    """A validated, nonnegative closed-form expression."""

    source: str
    root: Node

    @property
    def variables(self) -> FrozenSet[str]:
        return free_variables(self.root)

    @property
    def is_zero(self) -> bool:
        return isinstance(self.root, Num) and self.root.value == 0

    def log_values(self, **env) -> np.ndarray:
        return evaluate_log(self.root, env)

    def substitute(self, **values: Union[int, float, Node]) -> "WeightExpr":
        bindings = {name: value if not isinstance(value, (int, float)) else num(value)
                    for name, value in values.items()}
        root = substitute(self.root, bindings)
        return WeightExpr(render(root), root)

    @classmethod
    def from_node(cls, node: Node) -> "WeightExpr":
        return cls(render(node), node)

    def __str__(self) -> str:
        return self.source


def parse_weight_expr(text: str, allowed: Sequence[str] = VARIABLES,
                      sample_depth: int = 64, sample_levels: int = 8) -> WeightExpr:
    """
    Parse and validate a weight expression.

    The expression is evaluated on the first `sample_depth` indices (Cantor
    order when j occurs) for levels 1..sample_levels; any negative or
    undefined value rejects it.

    Raises:
        WeightExprError: syntax error (with position) or negativity
    """
    root = parse(text, allowed)
    variables = free_variables(root)
    env: Dict[str, np.ndarray] = {}
    ranks = np.arange(1, sample_depth + 1, dtype=float)
    if "j" in variables:
        s = np.ceil((1.0 + np.sqrt(1.0 + 8.0 * ranks)) / 2.0)
        s = np.where((s - 2) * (s - 1) / 2 >= ranks, s - 1, s)
        i = ranks - (s - 2) * (s - 1) / 2
        env["i"], env["j"] = i, s - i
    elif "i" in variables:
        env["i"] = ranks
    levels = range(1, sample_levels + 1) if "k" in variables else [None]
    for level in levels:
        sample_env = dict(env)
        if level is not None:
            sample_env["k"] = float(level)
        if not sample_env:
            sample_env["i"] = np.ones(1)
        sign, log = evaluate(root, sample_env)
        sign = np.atleast_1d(sign)
        log = np.atleast_1d(log)
        bad = (sign < 0) | np.isnan(log)
        if np.any(bad):
            where = int(np.argmax(bad))
            kind = "negative" if sign[where] < 0 else "undefined"
            at = f"k={level}, " if level is not None else ""
            raise WeightExprError(f"{kind} value of {text!r} at {at}sample index {where + 1}")
    return WeightExpr(text, root)
