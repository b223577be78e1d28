"""Real dynamics of the quadratic map x -> x^2 - x - 3.

The bounded-orbit set is a Cantor set in [-2, 3] coded over the alphabet
{-2, 3}: symbol -2 when the iterate falls in the left interval
[-2, (1-sqrt5)/2], symbol 3 for the right interval [(1+sqrt5)/2, 3].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

GOLDEN = (1 + math.sqrt(5)) / 2
LEFT_INTERVAL = (-2.0, (1 - math.sqrt(5)) / 2)
RIGHT_INTERVAL = (GOLDEN, 3.0)
SYMBOLS = (-2, 3)
VERTEX_MIN = Fraction(-13, 4)  # minimum of the parabola, at x = 1/2
CONTRACTION = 1 / math.sqrt(5)  # sup of |1/f'| over both coding intervals


class NotInJuliaError(ValueError):
    pass


class NoRealPreimageError(ValueError):
    pass


@dataclass
class BranchPoint:
    value: float
    branch_word: tuple[int, ...]
    residual_bound: float


def f_eval(x):
    """x^2 - x - 3, exact on int/Fraction input."""
    return x * x - x - 3


def f_preimages(y):
    """Ordered real preimages (x-, x+) of y; x- <= 1/2 <= x+ and x- + x+ = 1."""
    if y < VERTEX_MIN:
        raise NoRealPreimageError(f"{y} below the parabola vertex value -13/4")
    s = math.sqrt(float(4 * y + 13))
    return (1 - s) / 2, (1 + s) / 2


def _symbol_of(x: float, tol: float = 1e-9) -> int:
    if LEFT_INTERVAL[0] - tol <= x <= LEFT_INTERVAL[1] + tol:
        return -2
    if RIGHT_INTERVAL[0] - tol <= x <= RIGHT_INTERVAL[1] + tol:
        return 3
    raise NotInJuliaError(f"{x} lies in the gap or outside [-2, 3]")


def point_to_code(x: float, n: int, tol: float = 1e-9) -> tuple[int, ...]:
    """First n symbols of the itinerary of x."""
    out = []
    cur = float(x)
    for _ in range(n):
        out.append(_symbol_of(cur, tol))
        cur = f_eval(cur)
    return tuple(out)


def code_to_point(code, tol: float = 1e-12) -> BranchPoint:
    """Backward-iterate inverse branches along the reversed code.

    The inverse branches contract uniformly, so the seed (the midpoint of the
    last symbol's interval) washes out; the achievable accuracy is the
    contraction factor to the code length.
    """
    code = tuple(code)
    if not code:
        raise ValueError("empty code")
    if any(s not in SYMBOLS for s in code):
        raise ValueError("symbols must be -2 or 3")
    if tol <= 0:
        raise ValueError("tol must be positive")
    # push the whole symbol interval through the inverse branches: its final
    # width bounds the distance from the midpoint to the coded point
    lo, hi = LEFT_INTERVAL if code[-1] == -2 else RIGHT_INTERVAL
    for sym in reversed(code):
        pick = 0 if sym == -2 else 1
        lo = f_preimages(lo)[pick]
        hi = f_preimages(hi)[pick]
        lo, hi = min(lo, hi), max(lo, hi)
    bound = (hi - lo) + 1e-15
    if bound > tol:
        raise NotInJuliaError(
            f"code of length {len(code)} only reaches accuracy {bound:.3e} > tol; "
            "a longer code is needed"
        )
    return BranchPoint((lo + hi) / 2, code, bound)


def julia_membership(x: float, max_iter: int = 64, escape_bound: float = 3 + 1e-9) -> bool:
    """Semi-decision: False iff an iterate escapes the bound within max_iter."""
    cur = float(x)
    for _ in range(max_iter):
        if abs(cur) > escape_bound:
            return False
        cur = f_eval(cur)
    return abs(cur) <= escape_bound


class BranchDiesError(ValueError):
    def __init__(self, partial):
        super().__init__("a branch fell below the vertex value -13/4")
        self.partial = partial


def preimage_tree(y0: float, depth: int) -> list[float]:
    """Sorted n-fold preimages of y0 (complete binary tree of branches)."""
    level = [float(y0)]
    for _ in range(depth):
        nxt = []
        for y in level:
            try:
                lo, hi = f_preimages(y)
            except NoRealPreimageError as exc:
                raise BranchDiesError(sorted(level)) from exc
            if lo == hi:
                nxt.append(lo)
            else:
                nxt.extend((lo, hi))
        level = nxt
    return sorted(level)


def sample_points(count_exponent: int = 6, base: float = 3.0) -> list[float]:
    """2^k backward samples of the Cantor set (preimages of a fixed point)."""
    return preimage_tree(base, count_exponent)


POLE_GUARDS = (0.5, 1.0, 1.5)


def assert_poles_avoided(points, radius: float = 1e-6) -> None:
    for x in points:
        for p in POLE_GUARDS:
            if abs(x - p) < radius:
                raise AssertionError(f"sample {x} within {radius} of pole {p}")
