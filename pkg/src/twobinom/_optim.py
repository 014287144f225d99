"""Grid-plus-refinement maximization over a bounded interval.

Used for every supremum over a null boundary: evaluate on a uniform grid,
then golden-section refine around the top local maxima.  The returned
value is a certified lower bound on the true supremum; ``grid_modulus``
(the largest neighbor-to-neighbor jump) diagnoses the grid resolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

_GR = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class MaxResult:
    value: float
    arg: float
    grid_modulus: float


def golden_max(f: Callable[[float], float], a: float, b: float, xtol: float) -> tuple[float, float]:
    """Golden-section maximization of a scalar function on [a, b]."""
    c = b - _GR * (b - a)
    d = a + _GR * (b - a)
    fc = f(c)
    fd = f(d)
    while (b - a) > xtol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GR * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GR * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def refine_max(
    xs: np.ndarray,
    vals: np.ndarray,
    fn_scalar: Callable[[float], float] | None = None,
    refine: bool = True,
    top: int = 3,
    xtol: float = 1e-6,
) -> MaxResult:
    """Maximum of precomputed grid values plus local golden refinement.

    ``fn_scalar`` evaluates the underlying function at a single point;
    refinement runs around the ``top`` strongest local maxima.
    """
    n = len(xs)
    vals = np.asarray(vals, dtype=float)
    i_best = int(np.argmax(vals))
    best_v = float(vals[i_best])
    best_x = float(xs[i_best])
    modulus = float(np.max(np.abs(np.diff(vals)))) if n > 1 else 0.0

    if refine and fn_scalar is not None and n > 2:
        interior = np.zeros(n, dtype=bool)
        interior[0] = vals[0] >= vals[1]
        interior[-1] = vals[-1] >= vals[-2]
        interior[1:-1] = (vals[1:-1] >= vals[:-2]) & (vals[1:-1] >= vals[2:])
        peaks = np.flatnonzero(interior)
        if peaks.size:
            order = peaks[np.argsort(vals[peaks])[::-1][:top]]
            for i in order:
                lo = xs[max(i - 1, 0)]
                hi = xs[min(i + 1, n - 1)]
                x, v = golden_max(fn_scalar, lo, hi, xtol)
                if v > best_v:
                    best_v, best_x = float(v), float(x)
    return MaxResult(best_v, best_x, modulus)


def grid_max(
    fn_vec: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    n_grid: int,
    fn_scalar: Callable[[float], float] | None = None,
    refine: bool = True,
    top: int = 3,
    xtol: float = 1e-6,
) -> MaxResult:
    """Maximize ``fn_vec`` over [a, b] on a uniform grid, refining locally."""
    if b < a:
        raise ValueError(f"empty interval [{a}, {b}]")
    if b == a:
        v = float(fn_vec(np.array([a]))[0])
        return MaxResult(v, a, 0.0)
    xs = np.linspace(a, b, n_grid)
    vals = np.asarray(fn_vec(xs), dtype=float)
    return refine_max(xs, vals, fn_scalar=fn_scalar, refine=refine, top=top, xtol=xtol)
