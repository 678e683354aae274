"""Recursive-descent parser for kernel and test-function expressions.

Grammar::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := ("+" | "-") unary | power
    power   := atom ("^" unary)?            # right associative, -x^2 == -(x^2)
    atom    := NUMBER | NAME | NAME "(" expr ("," expr)* ")" | "(" expr ")"

Compiled expressions evaluate on numpy arrays with float64 semantics.
"""

from __future__ import annotations

import math
import re
from typing import Callable, Sequence

import numpy as np

FUNCTIONS = {
    "exp": (1, np.exp),
    "log": (1, np.log),
    "abs": (1, np.abs),
    "sqrt": (1, np.sqrt),
    "sin": (1, np.sin),
    "cos": (1, np.cos),
    "min": (2, np.minimum),
    "max": (2, np.maximum),
}
CONSTANTS = {"pi": math.pi, "e": math.e}

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^(),]))"
)


class ExpressionError(ValueError):
    """Syntax or name error, carrying the byte offset into the source."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


def _tokenize(src: str):
    pos = 0
    out = []
    while pos < len(src):
        if src[pos:].strip() == "":
            break
        m = _TOKEN.match(src, pos)
        if m is None or m.end() == pos:
            bad = len(src) - len(src[pos:].lstrip())
            raise ExpressionError(f"unexpected character {src[bad]!r}", bad)
        kind = m.lastgroup
        start = m.start(kind)
        out.append((kind, m.group(kind), start))
        pos = m.end()
    out.append(("end", "", len(src)))
    return out


class _Parser:
    def __init__(self, src: str, variables: Sequence[str]):
        self.src = src
        self.tokens = _tokenize(src)
        self.i = 0
        self.variables = {name: k for k, name in enumerate(variables)}

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, op):
        kind, text, off = self.take()
        if kind != "op" or text != op:
            raise ExpressionError(f"expected {op!r}, found {text or 'end of input'!r}", off)

    def parse(self):
        node = self.expr()
        kind, text, off = self.peek()
        if kind != "end":
            raise ExpressionError(f"unexpected token {text!r}", off)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            rhs = self.term()
            node = _binary(np.add if op == "+" else np.subtract, node, rhs)
        return node

    def term(self):
        node = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            rhs = self.unary()
            node = _binary(np.multiply if op == "*" else np.true_divide, node, rhs)
        return node

    def unary(self):
        kind, text, _ = self.peek()
        if kind == "op" and text in "+-":
            self.take()
            inner = self.unary()
            if text == "-":
                return lambda env, f=inner: np.negative(f(env))
            return inner
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            exponent = self.unary()
            return _binary(np.power, base, exponent)
        return base

    def atom(self):
        kind, text, off = self.take()
        if kind == "num":
            value = float(text)
            return lambda env: value
        if kind == "name":
            if self.peek()[0] == "op" and self.peek()[1] == "(":
                if text not in FUNCTIONS:
                    raise ExpressionError(f"unknown function {text!r}", off)
                arity, fn = FUNCTIONS[text]
                self.take()
                args = [self.expr()]
                while self.peek()[0] == "op" and self.peek()[1] == ",":
                    self.take()
                    args.append(self.expr())
                self.expect(")")
                if len(args) != arity:
                    raise ExpressionError(f"{text} takes {arity} argument(s), got {len(args)}", off)
                if arity == 1:
                    a = args[0]
                    return lambda env: fn(a(env))
                a, b = args
                return lambda env: fn(a(env), b(env))
            if text in self.variables:
                k = self.variables[text]
                return lambda env: env[k]
            if text in CONSTANTS:
                value = CONSTANTS[text]
                return lambda env: value
            raise ExpressionError(f"unknown identifier {text!r}", off)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect(")")
            return node
        raise ExpressionError(f"unexpected {text or 'end of input'!r}", off)


def _binary(fn, a, b):
    return lambda env: fn(a(env), b(env))


class Expression:
    """A compiled expression; call it with one positional argument per variable."""

    def __init__(self, src: str, variables: Sequence[str], node):
        self.src = src
        self.variables = tuple(variables)
        self._node = node

    def __call__(self, *args):
        if len(args) != len(self.variables):
            raise TypeError(f"expression over {self.variables} called with {len(args)} arguments")
        env = [np.asarray(a, dtype=float) for a in args]
        shape = np.broadcast(*env).shape if env else ()
        with np.errstate(all="ignore"):
            out = self._node(env)
        return np.broadcast_to(np.asarray(out, dtype=float), shape)[()] if shape else np.float64(out)

    def __repr__(self):
        return f"Expression({self.src!r}, variables={self.variables})"


def parse_expression(src: str, variables: Sequence[str]) -> Expression:
    """Compile ``src`` into a vectorized callable over ``variables``.

    Raises :class:`ExpressionError` with the byte offset of the problem.
    Variable names shadow the constants ``pi`` and ``e``.
    """
    if not isinstance(src, str) or not src.strip():
        raise ExpressionError("empty expression", 0)
    try:
        src.encode("ascii")
    except UnicodeEncodeError as exc:
        raise ExpressionError("non-ASCII character", exc.start) from None
    node = _Parser(src, variables).parse()
    return Expression(src, variables, node)


def compile_quotient(src: str, model) -> Callable:
    """Expression over the quotient chart of ``model``.

    On the complex-mod-circle model the radial variable ``r = e^t`` may be
    used alongside ``t``.
    """
    names = list(model.quotient_vars)
    if names == ["t"]:
        expr = parse_expression(src, ["t", "r"])
        return lambda t: expr(t, np.exp(t))
    return parse_expression(src, names)


def compile_group(src: str, model) -> Callable:
    return parse_expression(src, list(model.group_vars))
