"""Tiny arithmetic expression grammar for coefficient functions in configs.

Grammar (evaluated with numpy over the grid variable):

    expr    := number | name | expr (+|-|*|/|**) expr | (+|-) expr | (expr)
             | sin(expr) | cos(expr)
    name    := one of the declared variables (x; also y in 2D, t for forcings)
             | pi | e

Nothing else parses: no attribute access, no general calls, no comparisons.
Expressions are parsed once with the ast module and evaluated against a
whitelist, so config files cannot run arbitrary code.
"""

from __future__ import annotations

import ast

import numpy as np

__all__ = ["ExpressionError", "compile_expression", "GRAMMAR_HELP"]

GRAMMAR_HELP = (
    "numbers, the grid variable(s), pi, e, + - * / ** parentheses, sin(), cos()"
)

_CONSTANTS = {"pi": np.pi, "e": np.e}
_FUNCTIONS = {"sin": np.sin, "cos": np.cos}
_BINOPS = {
    ast.Add: np.add,
    ast.Sub: np.subtract,
    ast.Mult: np.multiply,
    ast.Div: np.divide,
    ast.Pow: np.power,
}
_UNARYOPS = {ast.UAdd: lambda v: v, ast.USub: np.negative}


class ExpressionError(ValueError):
    """The expression does not fit the documented grammar."""


def compile_expression(text: str, variables: tuple[str, ...] = ("x",)):
    """Parse ``text`` and return a callable of the named variables.

    The callable accepts arrays (or scalars) positionally in the order of
    ``variables`` and evaluates vectorized.
    """
    if not isinstance(text, str) or not text.strip():
        raise ExpressionError("expression must be a non-empty string")
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse {text!r}: {exc.msg}") from None

    def check(node):
        if isinstance(node, ast.Expression):
            check(node.body)
        elif isinstance(node, ast.Constant):
            if not isinstance(node.value, (int, float)):
                raise ExpressionError(f"non-numeric constant {node.value!r}")
        elif isinstance(node, ast.Name):
            if node.id not in variables and node.id not in _CONSTANTS:
                raise ExpressionError(f"unknown name {node.id!r} in {text!r}")
        elif isinstance(node, ast.BinOp):
            if type(node.op) not in _BINOPS:
                raise ExpressionError(f"operator {type(node.op).__name__} not allowed")
            check(node.left)
            check(node.right)
        elif isinstance(node, ast.UnaryOp):
            if type(node.op) not in _UNARYOPS:
                raise ExpressionError(f"operator {type(node.op).__name__} not allowed")
            check(node.operand)
        elif isinstance(node, ast.Call):
            if (not isinstance(node.func, ast.Name) or node.func.id not in _FUNCTIONS
                    or node.keywords or len(node.args) != 1):
                raise ExpressionError(f"only {sorted(_FUNCTIONS)} calls of one argument allowed")
            check(node.args[0])
        else:
            raise ExpressionError(f"{type(node).__name__} not allowed in {text!r}")

    check(tree)

    def evaluate(*args):
        if len(args) != len(variables):
            raise TypeError(f"expected {len(variables)} argument(s) {variables}")
        env = dict(zip(variables, args))

        def ev(node):
            if isinstance(node, ast.Expression):
                return ev(node.body)
            if isinstance(node, ast.Constant):
                return node.value
            if isinstance(node, ast.Name):
                return env.get(node.id, _CONSTANTS.get(node.id))
            if isinstance(node, ast.BinOp):
                return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
            if isinstance(node, ast.UnaryOp):
                return _UNARYOPS[type(node.op)](ev(node.operand))
            if isinstance(node, ast.Call):
                return _FUNCTIONS[node.func.id](ev(node.args[0]))
            raise AssertionError("unreachable: node survived the check pass")

        return ev(tree)

    evaluate.source = text
    return evaluate
