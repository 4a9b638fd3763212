"""A small expression grammar for symbols ``a(theta)`` and Abel test functions ``f(u)``.

Grammar (precedence low to high, ``^`` and ``**`` are synonyms)::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := ("+" | "-") unary | power
    power   := atom (("^" | "**") unary)?      right associative
    atom    := NUMBER | VAR | CONST | FUNC "(" expr ")" | "(" expr ")"

    VAR   := theta | u          (one per context)
    CONST := pi | e
    FUNC  := cos | sin | exp | sqrt

As in Python, ``-x^2`` is ``-(x^2)``. Parsing goes through Python's own
``ast`` module and rejects every node outside this whitelist; evaluation
is vectorized with numpy.
"""

from __future__ import annotations

import ast
import math
from dataclasses import dataclass

import numpy as np

from .errors import SymbolSyntaxError

FUNCTIONS = {"cos": np.cos, "sin": np.sin, "exp": np.exp, "sqrt": np.sqrt}
CONSTANTS = {"pi": math.pi, "e": math.e}
MAX_LENGTH = 500

_BINOPS = {ast.Add: np.add, ast.Sub: np.subtract, ast.Mult: np.multiply, ast.Div: np.divide, ast.Pow: np.power}
_UNARY = {ast.UAdd: np.positive, ast.USub: np.negative}


@dataclass(frozen=True)
class Symbol:
    text: str
    variable: str
    tree: ast.Expression

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = _eval(self.tree.body, self.variable, x)
        return np.broadcast_to(np.asarray(out, dtype=float), x.shape).copy() if x.shape else float(out)


def _check(node, variable):
    if isinstance(node, ast.Expression):
        return _check(node.body, variable)
    if isinstance(node, ast.BinOp):
        if type(node.op) not in _BINOPS:
            raise SymbolSyntaxError(f"operator {type(node.op).__name__} not allowed")
        _check(node.left, variable)
        _check(node.right, variable)
    elif isinstance(node, ast.UnaryOp):
        if type(node.op) not in _UNARY:
            raise SymbolSyntaxError(f"operator {type(node.op).__name__} not allowed")
        _check(node.operand, variable)
    elif isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in FUNCTIONS:
            raise SymbolSyntaxError("unknown function")
        if len(node.args) != 1 or node.keywords:
            raise SymbolSyntaxError(f"{node.func.id} takes exactly one argument")
        _check(node.args[0], variable)
    elif isinstance(node, ast.Name):
        if node.id != variable and node.id not in CONSTANTS:
            raise SymbolSyntaxError(f"unknown name {node.id!r}")
    elif isinstance(node, ast.Constant):
        if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
            raise SymbolSyntaxError(f"literal {node.value!r} not allowed")
    else:
        raise SymbolSyntaxError(f"{type(node).__name__} not allowed")


def _eval(node, variable, x):
    if isinstance(node, ast.BinOp):
        return _BINOPS[type(node.op)](_eval(node.left, variable, x), _eval(node.right, variable, x))
    if isinstance(node, ast.UnaryOp):
        return _UNARY[type(node.op)](_eval(node.operand, variable, x))
    if isinstance(node, ast.Call):
        return FUNCTIONS[node.func.id](_eval(node.args[0], variable, x))
    if isinstance(node, ast.Name):
        return x if node.id == variable else CONSTANTS[node.id]
    return float(node.value)


def parse_symbol(text: str, variable: str = "theta") -> Symbol:
    """Parse ``text`` into a vectorized callable of ``variable``.

    Raises ``SymbolSyntaxError`` on anything outside the grammar.
    """
    if variable not in ("theta", "u"):
        raise ValueError("variable must be 'theta' or 'u'")
    if not isinstance(text, str) or not text.strip():
        raise SymbolSyntaxError("empty symbol")
    if len(text) > MAX_LENGTH:
        raise SymbolSyntaxError("symbol too long")
    try:
        tree = ast.parse(text.replace("^", "**").strip(), mode="eval")
    except SyntaxError as exc:
        raise SymbolSyntaxError(f"cannot parse {text!r}: {exc.msg}") from None
    _check(tree, variable)
    return Symbol(text, variable, tree)
