"""Metric-component expression language.

Grammar::

    expr   := term (("+"|"-") term)* ;
    term   := factor (("*"|"/") factor)* ;
    factor := ("-")? power ;
    power  := atom ("^" factor)? ;
    atom   := NUMBER | IDENT | IDENT "(" expr ("," expr)* ")" | "(" expr ")" ;

Identifiers resolve to coordinates (``x1 .. xn`` by default) or to declared
parameters.  Functions are limited to ``exp, log, sin, cos, sqrt``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

from . import jets
from .jets import Jet3, JetDomainError

__all__ = [
    "Const", "Var", "Param", "Unary", "Binary", "Call", "Node",
    "ParseError", "EvaluationError",
    "parse_expression", "format_expression", "variables", "evaluate", "evaluate_jet",
    "jet_arithmetic", "FUNCTIONS",
]

FUNCTIONS = ("exp", "log", "sin", "cos", "sqrt")
MAX_DEPTH = 200


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Param:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str
    child: "Node"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple


Node = Union[Const, Var, Param, Unary, Binary, Call]


class ParseError(ValueError):
    def __init__(self, message: str, offset: int, source: str = ""):
        self.offset = offset
        self.source = source
        super().__init__(f"{message} at offset {offset}")


class EvaluationError(ValueError):
    """A jet or float evaluation failed; ``node`` is the offending subtree."""

    def __init__(self, message: str, node):
        self.node = node
        super().__init__(f"{message} in {format_expression(node)!r}")


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^(),])
""", re.VERBOSE)

_COORD = re.compile(r"x[1-9][0-9]*\Z")


def _tokenize(src: str):
    pos = 0
    out = []
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}", pos, src)
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), pos))
        pos = m.end()
    out.append(("end", "", len(src)))
    return out


class _Parser:
    def __init__(self, src, coordinates, parameters):
        self.src = src
        self.toks = _tokenize(src)
        self.i = 0
        self.coordinates = coordinates
        self.parameters = parameters
        self.depth = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        return ParseError(msg, tok[2], self.src)

    def expect(self, text):
        tok = self.peek()
        if tok[1] != text or tok[0] != "op":
            found = tok[1] or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        return self.take()

    def enter(self):
        self.depth += 1
        if self.depth > MAX_DEPTH:
            raise self.error("expression nested too deeply")

    def parse(self):
        node = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise self.error(f"unexpected token {tok[1]!r}")
        return node

    def expr(self):
        self.enter()
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = Binary(op, node, self.term())
        self.depth -= 1
        return node

    def term(self):
        node = self.factor()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = Binary(op, node, self.factor())
        return node

    def factor(self):
        self.enter()
        if self.peek() == ("op", "-", self.peek()[2]):
            self.take()
            node = Unary("-", self.power())
        else:
            node = self.power()
        self.depth -= 1
        return node

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            return Binary("^", base, self.factor())
        return base

    def atom(self):
        tok = self.peek()
        kind, text, pos = tok
        if kind == "num":
            self.take()
            return Const(float(text))
        if kind == "ident":
            self.take()
            if self.peek()[0] == "op" and self.peek()[1] == "(":
                if text not in FUNCTIONS:
                    raise ParseError(f"unknown function {text!r}", pos, self.src)
                self.take()
                args = [self.expr()]
                while self.peek()[0] == "op" and self.peek()[1] == ",":
                    self.take()
                    args.append(self.expr())
                self.expect(")")
                if len(args) != 1:
                    raise ParseError(f"{text} takes 1 argument, got {len(args)}", pos, self.src)
                return Call(text, tuple(args))
            return self.identifier(text, pos)
        if kind == "op" and text == "(":
            self.take()
            node = self.expr()
            self.expect(")")
            return node
        found = text or "end of input"
        raise self.error(f"unexpected {found!r}, expected a number, name or '('")

    def identifier(self, name, pos):
        if name in FUNCTIONS:
            raise ParseError(f"function {name!r} used without arguments", pos, self.src)
        if self.coordinates is None:
            if _COORD.match(name):
                return Var(name)
        elif name in self.coordinates:
            return Var(name)
        if name in self.parameters:
            return Param(name)
        raise ParseError(f"unknown identifier {name!r}", pos, self.src)


def parse_expression(src: str, coordinates: Sequence[str] | None = None,
                     parameters=()) -> Node:
    """Parse ``src`` into an AST.

    ``coordinates=None`` accepts any name of the form ``x<k>``; otherwise only
    the listed names.  ``parameters`` lists names that become :class:`Param`.
    Raises :class:`ParseError` (carrying ``offset``) on any malformed input.
    """
    if not isinstance(src, str):
        raise TypeError("source must be str")
    if not src.strip():
        raise ParseError("empty expression", 0, src)
    coords = None if coordinates is None else frozenset(coordinates)
    return _Parser(src, coords, frozenset(parameters)).parse()


def _fmt_const(v: float) -> str:
    if v.is_integer() and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def format_expression(node: Node) -> str:
    """Render ``node`` as source text that parses back to an equal AST."""
    if isinstance(node, Const):
        return _fmt_const(node.value)
    if isinstance(node, (Var, Param)):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({', '.join(format_expression(a) for a in node.args)})"
    if isinstance(node, Unary):
        return f"-{_wrap(node.child)}"
    if isinstance(node, Binary):
        return f"{_wrap(node.left)} {node.op} {_wrap(node.right)}"
    raise TypeError(f"not an expression node: {node!r}")


def _wrap(node):
    text = format_expression(node)
    if isinstance(node, (Var, Param, Call)) or (isinstance(node, Const) and node.value >= 0):
        return text
    return f"({text})"


def variables(node: Node) -> set[str]:
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, Unary):
        return variables(node.child)
    if isinstance(node, Binary):
        return variables(node.left) | variables(node.right)
    if isinstance(node, Call):
        return set().union(*(variables(a) for a in node.args))
    return set()


def _float_funcs():
    def checked(f, name, ok):
        def g(x):
            if not ok(x):
                raise ValueError(f"{name} domain error at {x!r}")
            return f(x)
        return g
    return {
        "exp": math.exp,
        "log": checked(math.log, "log", lambda x: x > 0),
        "sin": math.sin,
        "cos": math.cos,
        "sqrt": checked(math.sqrt, "sqrt", lambda x: x >= 0),
    }


_FLOAT_FUNCS = _float_funcs()


def evaluate(node: Node, env: Mapping[str, float]) -> float:
    """Plain float evaluation; ``env`` maps coordinate and parameter names to values."""
    try:
        if isinstance(node, Const):
            return node.value
        if isinstance(node, (Var, Param)):
            return float(env[node.name])
        if isinstance(node, Unary):
            return -evaluate(node.child, env)
        if isinstance(node, Call):
            return _FLOAT_FUNCS[node.func](evaluate(node.args[0], env))
        a, b = evaluate(node.left, env), evaluate(node.right, env)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            return a / b
        if a < 0 and not float(b).is_integer():
            raise ValueError(f"real power {b} of negative base {a}")
        return float(a ** b)
    except EvaluationError:
        raise
    except (ValueError, ZeroDivisionError, OverflowError, KeyError) as exc:
        raise EvaluationError(str(exc), node) from exc


def jet_arithmetic(op: str, *args):
    """Apply a named operation to jets (``add sub mul div neg pow exp log sin cos sqrt``)."""
    if op == "add":
        return args[0] + args[1]
    if op == "sub":
        return args[0] - args[1]
    if op == "mul":
        return args[0] * args[1]
    if op == "div":
        return args[0] / args[1]
    if op == "neg":
        return -args[0]
    if op == "pow":
        return args[0] ** args[1]
    if op in jets.FUNCTIONS:
        return jets.FUNCTIONS[op](args[0])
    raise ValueError(f"unknown jet operation {op!r}")


_BINOPS = {"+": "add", "-": "sub", "*": "mul", "/": "div", "^": "pow"}


def evaluate_jet(node: Node, point: Sequence[float], coordinates: Sequence[str],
                 parameters: Mapping[str, float] | None = None) -> Jet3:
    """Order-3 jet of ``node`` at ``point``; coordinate ``coordinates[i]`` is seeded as variable i."""
    if len(point) != len(coordinates):
        raise ValueError("point length does not match number of coordinates")
    nvars = len(coordinates)
    seeds = {name: jets.seed(i, float(x), nvars) for i, (name, x) in enumerate(zip(coordinates, point))}
    params = dict(parameters or {})

    def ev(n):
        try:
            if isinstance(n, Const):
                return jets.constant(n.value, nvars)
            if isinstance(n, Var):
                return seeds[n.name]
            if isinstance(n, Param):
                return jets.constant(float(params[n.name]), nvars)
            if isinstance(n, Unary):
                return -ev(n.child)
            if isinstance(n, Call):
                return jet_arithmetic(n.func, ev(n.args[0]))
            left = ev(n.left)
            if n.op == "^" and isinstance(n.right, Const):
                return left ** n.right.value
            return jet_arithmetic(_BINOPS[n.op], left, ev(n.right))
        except EvaluationError:
            raise
        except (JetDomainError, KeyError, OverflowError, ZeroDivisionError) as exc:
            raise EvaluationError(str(exc), n) from exc

    return ev(node)
