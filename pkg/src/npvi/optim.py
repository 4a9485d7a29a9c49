"""Limited-memory quasi-Newton ascent with Armijo backtracking.

The public surface is maximize-only; internally the routine minimizes the
negated objective with the standard two-loop recursion over stored
curvature pairs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .modelcore import ConfigurationError

CONVERGED = "converged"
MAX_ITERS = "max-iters"
LINE_SEARCH_FAILURE = "line-search-failure"


@dataclass
class OptimOptions:
    """Knobs for :func:`maximize`.

    ``gradient_tolerance`` is an infinity-norm threshold. The line search is
    backtracking Armijo: start at unit step, require the sufficient-decrease
    fraction ``sufficient_decrease`` of the predicted gain, contract by
    ``contraction`` otherwise, give up after ``max_step_halvings`` tries.
    """

    memory: int = 10
    max_iterations: int = 100
    gradient_tolerance: float = 1e-6
    sufficient_decrease: float = 1e-4
    contraction: float = 0.5
    max_step_halvings: int = 60

    def __post_init__(self):
        if self.memory < 1:
            raise ConfigurationError("memory must be at least 1")
        if self.gradient_tolerance <= 0:
            raise ConfigurationError("gradient_tolerance must be positive")
        if not 0.0 < self.sufficient_decrease < 1.0:
            raise ConfigurationError("sufficient_decrease must lie in (0, 1)")
        if not 0.0 < self.contraction < 1.0:
            raise ConfigurationError("contraction must lie in (0, 1)")


@dataclass
class OptimReport:
    """Result of one ascent run; ``value`` is the objective at ``argmax``."""

    argmax: np.ndarray
    value: float
    iterations: int
    status: str


def _two_loop(g, s_hist, y_hist, rho_hist):
    """Approximate inverse-Hessian action on the descent gradient -g.

    Returns an ascent direction for the objective whose gradient is ``g``.
    """
    q = -g
    alphas = []
    for s, y, rho in zip(reversed(s_hist), reversed(y_hist), reversed(rho_hist)):
        a = rho * (s @ q)
        q = q - a * y
        alphas.append(a)
    if y_hist:
        s, y = s_hist[-1], y_hist[-1]
        q = ((s @ y) / (y @ y)) * q
    for (s, y, rho), a in zip(
        zip(s_hist, y_hist, rho_hist), reversed(alphas)
    ):
        b = rho * (y @ q)
        q = q + (a - b) * s
    return -q


def maximize(objective, gradient, x0, options: OptimOptions | None = None) -> OptimReport:
    """Maximize a smooth objective starting from ``x0``.

    The accepted-iterate objective sequence is non-decreasing. Termination:
    gradient infinity norm below tolerance (``converged``), iteration cap
    (``max-iters``), or no acceptable step after the configured number of
    halvings (``line-search-failure``). Non-finite trial values during the
    line search are handled by the same halving loop.

    Raises
    ------
    ValueError
        If the objective is not finite at ``x0``.
    """
    opts = options if options is not None else OptimOptions()
    x = np.asarray(x0, dtype=float).copy()
    fx = float(objective(x))
    if not np.isfinite(fx):
        raise ValueError("objective is not finite at the initial point")
    g = np.asarray(gradient(x), dtype=float)
    if np.max(np.abs(g)) <= opts.gradient_tolerance:
        return OptimReport(x, fx, 0, CONVERGED)

    s_hist: list[np.ndarray] = []
    y_hist: list[np.ndarray] = []
    rho_hist: list[float] = []
    status = MAX_ITERS
    iterations = 0

    for _ in range(opts.max_iterations):
        d = _two_loop(g, s_hist, y_hist, rho_hist)
        slope = float(d @ g)
        if not np.isfinite(slope) or slope <= 0.0:
            d = g.copy()
            slope = float(g @ g)

        step = 1.0
        accepted = False
        for _ in range(opts.max_step_halvings + 1):
            x_new = x + step * d
            f_new = float(objective(x_new))
            if np.isfinite(f_new) and f_new >= fx + opts.sufficient_decrease * step * slope:
                accepted = True
                break
            step *= opts.contraction
        if not accepted:
            status = LINE_SEARCH_FAILURE
            break

        g_new = np.asarray(gradient(x_new), dtype=float)
        s = x_new - x
        y = g - g_new  # curvature pair in minimization convention
        sy = float(s @ y)
        if np.isfinite(sy) and sy > 1e-10 * np.linalg.norm(s) * np.linalg.norm(y):
            s_hist.append(s)
            y_hist.append(y)
            rho_hist.append(1.0 / sy)
            if len(s_hist) > opts.memory:
                s_hist.pop(0)
                y_hist.pop(0)
                rho_hist.pop(0)

        x, fx, g = x_new, f_new, g_new
        iterations += 1
        if not np.all(np.isfinite(g)):
            status = LINE_SEARCH_FAILURE
            break
        if np.max(np.abs(g)) <= opts.gradient_tolerance:
            status = CONVERGED
            break

    return OptimReport(x, fx, iterations, status)
