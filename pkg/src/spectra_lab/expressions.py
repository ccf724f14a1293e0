"""Arithmetic expressions in one variable ``y`` for custom nonlinearities.

Only numbers, ``y``, ``+ - * / **``, unary minus and a short list of numpy
functions are accepted; anything else is rejected before evaluation.
Derivatives are taken by central differences and antiderivatives by
Gauss-Legendre quadrature, and building a function from an expression emits
an :class:`ApproximateDerivativeWarning` to say so.
"""

from __future__ import annotations

import ast
import warnings
from typing import Callable

import numpy as np

from spectra_lab.errors import DomainError
from spectra_lab.stability_rd import ReactionFn
from spectra_lab.stability_tf import FilmCoefficient

FUNCTIONS: dict[str, Callable] = {
    "sin": np.sin, "cos": np.cos, "tan": np.tan, "exp": np.exp, "log": np.log,
    "sqrt": np.sqrt, "tanh": np.tanh, "sinh": np.sinh, "cosh": np.cosh, "abs": np.abs,
}
CONSTANTS = {"pi": np.pi, "e": np.e}
_BINOPS = {ast.Add: np.add, ast.Sub: np.subtract, ast.Mult: np.multiply,
           ast.Div: np.divide, ast.Pow: np.power}
# step sizes balance truncation against roundoff for each derivative order
_STEPS = {1: 1e-5, 2: 1e-4, 3: 1e-3}
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)


class ApproximateDerivativeWarning(UserWarning):
    """Derivatives of a parsed expression are finite-difference approximations."""


def _compile(node: ast.AST) -> Callable[[np.ndarray], np.ndarray]:
    if isinstance(node, ast.Expression):
        return _compile(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
            and not isinstance(node.value, bool):
        c = float(node.value)
        return lambda y: c + 0.0 * y
    if isinstance(node, ast.Name):
        if node.id == "y":
            return lambda y: y
        if node.id in CONSTANTS:
            c = CONSTANTS[node.id]
            return lambda y: c + 0.0 * y
        raise DomainError(f"unknown name {node.id!r} (the variable is 'y')")
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        inner = _compile(node.operand)
        sign = -1.0 if isinstance(node.op, ast.USub) else 1.0
        return lambda y: sign * inner(y)
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        op, left, right = _BINOPS[type(node.op)], _compile(node.left), _compile(node.right)
        return lambda y: op(left(y), right(y))
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) \
            and node.func.id in FUNCTIONS and len(node.args) == 1 and not node.keywords:
        fn, arg = FUNCTIONS[node.func.id], _compile(node.args[0])
        return lambda y: fn(arg(y))
    raise DomainError(f"unsupported syntax in expression: {ast.dump(node)[:40]}")


def parse_expression(text: str) -> Callable[[np.ndarray], np.ndarray]:
    """Compile ``text`` into a vectorized function of ``y``.

    Examples
    --------
    >>> f = parse_expression("y + y**3")
    >>> float(f(np.array(2.0)))
    10.0
    """
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise DomainError(f"cannot parse expression {text!r}: {exc.msg}") from None
    fn = _compile(tree)

    def wrapped(y):
        with np.errstate(all="ignore"):
            return np.asarray(fn(np.asarray(y, dtype=float)), dtype=float)

    probe = wrapped(np.linspace(-1.0, 1.0, 5))
    if probe.shape != (5,):
        raise DomainError(f"expression {text!r} does not map arrays to arrays")
    return wrapped


def derivative(fn: Callable, order: int) -> Callable[[np.ndarray], np.ndarray]:
    """Central-difference derivative of order 1, 2 or 3."""
    d = _STEPS[order]
    if order == 1:
        return lambda y: (fn(y + d) - fn(y - d)) / (2 * d)
    if order == 2:
        return lambda y: (fn(y + d) - 2 * fn(y) + fn(y - d)) / d**2
    return lambda y: (fn(y + 2 * d) - 2 * fn(y + d) + 2 * fn(y - d) - fn(y - 2 * d)) / (2 * d**3)


def antiderivative(fn: Callable) -> Callable[[np.ndarray], np.ndarray]:
    """``F(y) = int_0^y fn`` by 24-point Gauss-Legendre on ``[0, y]``."""
    def F(y):
        y = np.asarray(y, dtype=float)
        t = 0.5 * (_GL_NODES + 1.0)
        vals = fn(y[..., None] * t)
        return 0.5 * y * np.sum(_GL_WEIGHTS * vals, axis=-1)
    return F


def _warn(text: str) -> None:
    warnings.warn(f"derivatives of {text!r} are approximated by finite differences",
                  ApproximateDerivativeWarning, stacklevel=3)


def reaction_from_expression(text: str) -> ReactionFn:
    f = parse_expression(text)
    _warn(text)
    return ReactionFn(f, derivative(f, 1), derivative(f, 2), derivative(f, 3), antiderivative(f),
                      name=text)


def film_from_expression(text: str) -> FilmCoefficient:
    g = parse_expression(text)
    _warn(text)
    return FilmCoefficient(g, derivative(g, 1), derivative(g, 2), antiderivative(g), name=text)


__all__ = ["ApproximateDerivativeWarning", "antiderivative", "derivative", "film_from_expression",
           "parse_expression", "reaction_from_expression"]
