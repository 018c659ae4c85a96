"""Bracketed bisection for monotone scalar root problems.

The threshold and scaling equations solved here are continuous with g(0+) < 0
and g -> +infinity, so a sign change is always reachable by doubling; the
level crossings are unique by monotonicity of the underlying profiles, hence
any sign-change bracket contains the root.
"""

from __future__ import annotations

__all__ = ["NoRootError", "expand_bracket", "bisect"]


class NoRootError(RuntimeError):
    """No sign change found within the expansion budget."""


def expand_bracket(g, x0: float = 1.0, max_doublings: int = 200) -> tuple[float, float]:
    """Find (a, b) with g(a) < 0 < g(b) by doubling/halving from x0 > 0."""
    if x0 <= 0:
        raise ValueError("x0 must be positive")
    g0 = g(x0)
    if g0 == 0.0:
        return x0, x0
    if g0 < 0.0:
        a, b = x0, 2.0 * x0
        for _ in range(max_doublings):
            if g(b) > 0.0:
                return a, b
            a, b = b, 2.0 * b
        raise NoRootError(f"no sign change up to x = {b:.3e}")
    a, b = 0.5 * x0, x0
    for _ in range(max_doublings):
        if g(a) < 0.0:
            return a, b
        a, b = 0.5 * a, a
    raise NoRootError(f"no sign change down to x = {a:.3e}")


def bisect(g, a: float, b: float, rel_tol: float = 1e-13, max_iter: int = 200) -> float:
    """Bisection on [a, b] with g(a) <= 0 <= g(b), to relative width rel_tol."""
    if a == b:
        return a
    ga, gb = g(a), g(b)
    if ga == 0.0:
        return a
    if gb == 0.0:
        return b
    if ga > 0.0 or gb < 0.0:
        raise ValueError(f"not a sign-change bracket: g({a})={ga}, g({b})={gb}")
    for _ in range(max_iter):
        mid = 0.5 * (a + b)
        gm = g(mid)
        if gm == 0.0:
            return mid
        if gm < 0.0:
            a = mid
        else:
            b = mid
        if b - a <= rel_tol * max(abs(a), abs(b)):
            break
    return 0.5 * (a + b)
