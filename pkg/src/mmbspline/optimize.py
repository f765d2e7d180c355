"""Golden-section maximization of the profile likelihood over log10(lambda)."""
import math
from dataclasses import dataclass

from .exceptions import NonFiniteLikelihoodError

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
INV_PHI2 = (3.0 - math.sqrt(5.0)) / 2.0

DEFAULT_BRACKET = (-8.0, 8.0)
DEFAULT_TOL = 1e-4


@dataclass(frozen=True)
class OptResult:
    """
    Outcome of a one-dimensional search.

    ``bracket`` is the final search interval in log10(lambda); ``converged``
    is False when the best point lies within `tol` of an end of the initial
    interval.
    """

    lambda_max: float
    loglik_max: float
    evaluations: int
    converged: bool
    bracket: tuple
    iterations: int
    initial_bracket: tuple

    @property
    def log10_lambda(self):
        return math.log10(self.lambda_max)


def golden_section_max(f, lo, hi, tol, trace=None):
    """
    Maximize ``f`` on ``[lo, hi]`` by golden-section search.

    Returns ``(t_best, f_best, a, b, n_evals, iterations)`` where ``[a, b]`` is
    the final bracket, of width ``(hi - lo) * INV_PHI**iterations`` up to
    rounding of the endpoints. If `trace` is a list, the bracket ``(a, b)``
    is appended after every iteration.
    """
    a, b = lo, hi
    width = b - a
    c = a + INV_PHI2 * width
    d = a + INV_PHI * width
    fc = f(c)
    fd = f(d)
    evals = 2
    iterations = 0
    while True:
        width *= INV_PHI
        iterations += 1
        if fc >= fd:
            b, d, fd = d, c, fc
            c = a + INV_PHI2 * width
            t_best, f_best = d, fd
            if trace is not None:
                trace.append((a, b))
            if width < tol and evals >= 3:
                break
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * width
            t_best, f_best = c, fc
            if trace is not None:
                trace.append((a, b))
            if width < tol and evals >= 3:
                break
            fd = f(d)
        evals += 1
    return t_best, f_best, a, b, evals, iterations


def maximize(eval_fn, lo_log10=DEFAULT_BRACKET[0], hi_log10=DEFAULT_BRACKET[1], tol=DEFAULT_TOL):
    """
    Find the penalty maximizing ``eval_fn(lam)``.

    The search runs on ``t = log10(lam)`` over ``[lo_log10, hi_log10]`` and
    stops once the bracket is narrower than `tol`.

    Raises
    ------
    NonFiniteLikelihoodError
        If `eval_fn` returns a non-finite value at any probe.

    """
    if not lo_log10 < hi_log10:
        raise ValueError(f"empty bracket [{lo_log10}, {hi_log10}]")
    if not tol > 0:
        raise ValueError(f"tolerance must be positive, got {tol!r}")

    def objective(t):
        lam = 10.0**t
        value = float(eval_fn(lam))
        if not math.isfinite(value):
            raise NonFiniteLikelihoodError(f"likelihood is {value} at lambda={lam!r}")
        return value

    t_best, f_best, a, b, evals, iterations = golden_section_max(objective, lo_log10, hi_log10, tol)
    on_edge = t_best - lo_log10 < tol or hi_log10 - t_best < tol
    return OptResult(
        10.0**t_best, f_best, evals, not on_edge, (a, b), iterations, (lo_log10, hi_log10)
    )
