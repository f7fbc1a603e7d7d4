"""Tiny arithmetic expression grammar for inline scenario maps.

Only numbers, variable names, + - * / **, unary minus and a fixed set of
functions are accepted; everything else is rejected at parse time.  The
compiled callables work on floats and on seeded jets.
"""
from __future__ import annotations

import ast
import math
import operator
from typing import Callable, Sequence

from . import jets as J
from .errors import ScenarioError

FUNCTIONS = {
    "sin": J.sin, "cos": J.cos, "tan": J.tan, "exp": J.exp, "log": J.log, "sqrt": J.sqrt,
    "sinh": J.sinh, "cosh": J.cosh, "tanh": J.tanh, "arctan": J.arctan, "arcsinh": J.arcsinh,
}
CONSTANTS = {"pi": math.pi, "e": math.e}

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}


def _check(node: ast.AST, names: set) -> None:
    if isinstance(node, ast.Expression):
        _check(node.body, names)
    elif isinstance(node, ast.BinOp):
        if type(node.op) not in _BINOPS:
            raise ScenarioError(f"operator {type(node.op).__name__} not allowed")
        _check(node.left, names)
        _check(node.right, names)
    elif isinstance(node, ast.UnaryOp):
        if not isinstance(node.op, (ast.USub, ast.UAdd)):
            raise ScenarioError("only unary + and - are allowed")
        _check(node.operand, names)
    elif isinstance(node, ast.Constant):
        if not isinstance(node.value, (int, float)) or isinstance(node.value, bool):
            raise ScenarioError(f"constant {node.value!r} not allowed")
    elif isinstance(node, ast.Name):
        if node.id not in names and node.id not in CONSTANTS:
            raise ScenarioError(f"unknown name {node.id!r}")
    elif isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in FUNCTIONS:
            raise ScenarioError("only sin, cos, tan, exp, log, sqrt, sinh, cosh, tanh, arctan, arcsinh may be called")
        if len(node.args) != 1 or node.keywords:
            raise ScenarioError(f"{node.func.id} takes exactly one argument")
        _check(node.args[0], names)
    else:
        raise ScenarioError(f"syntax {type(node).__name__} not allowed")


def _eval(node: ast.AST, env: dict):
    if isinstance(node, ast.BinOp):
        return _BINOPS[type(node.op)](_eval(node.left, env), _eval(node.right, env))
    if isinstance(node, ast.UnaryOp):
        v = _eval(node.operand, env)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.Constant):
        return float(node.value)
    if isinstance(node, ast.Name):
        return env[node.id] if node.id in env else CONSTANTS[node.id]
    if isinstance(node, ast.Call):
        return FUNCTIONS[node.func.id](_eval(node.args[0], env))
    raise ScenarioError("unreachable")


def compile_expr(text: str, variables: Sequence[str]) -> Callable:
    """Compile ``text`` into ``fn(values)`` with ``values`` indexed like ``variables``."""
    try:
        tree = ast.parse(str(text), mode="eval")
    except SyntaxError as exc:
        raise ScenarioError(f"cannot parse expression {text!r}: {exc.msg}") from None
    names = list(variables)
    _check(tree, set(names))
    body = tree.body

    def fn(values):
        if len(values) != len(names):
            raise ScenarioError(f"expression expects {len(names)} variables")
        return _eval(body, dict(zip(names, values)))

    fn.source = text
    return fn


def compile_vector(texts: Sequence[str], variables: Sequence[str]) -> Callable:
    import numpy as np

    parts = [compile_expr(t, variables) for t in texts]

    def fn(values):
        out = [p(values) for p in parts]
        obj = any(isinstance(v, J.Jet) for v in out)
        return np.array(out, dtype=object if obj else float)

    return fn


def compile_matrix(rows, variables: Sequence[str]) -> Callable:
    import numpy as np

    parts = [[compile_expr(t, variables) for t in row] for row in rows]
    k = len(parts)
    if any(len(r) != k for r in parts):
        raise ScenarioError("metric expression must be a square matrix")

    def fn(values):
        out = [[p(values) for p in row] for row in parts]
        obj = any(isinstance(v, J.Jet) for row in out for v in row)
        return np.array(out, dtype=object if obj else float)

    return fn
