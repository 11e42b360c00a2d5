"""Polynomial fits that minimize the relative error ``f/p - 1``.

Writing ``f/p`` as ``sum' a_n T_n`` (from the banded system), a polynomial
of degree k is relatively optimal to first order when ``a_0 = 2`` and
``a_1 = ... = a_k = 0``.  :func:`newton_fit` drives ``a_1..a_k`` to zero by
Newton's method with ``b_0 = f_0/2`` held fixed; :func:`equilibrate` then
nudges the coefficients so that the extrema of the relative error approach
a common magnitude.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .core import Basis, ChebSeries, cheb_eval
from .errors import (
    BasisMismatchError,
    ContractError,
    NonEquioscillatingError,
    SingularPointError,
    StalledFitError,
)
from .truncation import _two_product, build_matrix, divide

__all__ = [
    "FitConfig",
    "FitResult",
    "newton_fit",
    "jacobian",
    "relative_error_curve",
    "equilibrate",
    "locate_extrema",
    "deviation_series",
]

REFINE_STEPS = 3


@dataclass(frozen=True)
class FitConfig:
    """Settings for :func:`newton_fit` and :func:`equilibrate`.

    ``N`` defaults to ``2k + 8`` and must be at least ``2k``.
    """

    k: int
    N: int = None
    newton_tol: float = 1e-14
    max_newton_iters: int = 8
    equilibrate_iters: int = 4
    extremum_grid: int = 4001

    def __post_init__(self):
        if self.k < 0:
            raise ContractError(f"degree k must be >= 0, got {self.k}")
        if self.N is None:
            object.__setattr__(self, "N", 2 * self.k + 8)
        if self.N < 2 * self.k:
            raise ContractError(f"N={self.N} must be at least 2k={2 * self.k}")
        if not self.newton_tol > 0:
            raise ContractError("newton_tol must be positive")
        if self.max_newton_iters < 0 or self.equilibrate_iters < 0:
            raise ContractError("iteration counts must be non-negative")
        if self.extremum_grid < 2:
            raise ContractError("extremum_grid needs at least 2 points")


@dataclass(frozen=True)
class FitResult:
    """Outcome of a fit.

    ``residual`` holds ``a_0..a_N`` of ``f/p`` (``a_0`` near 2).
    ``deviation`` represents ``f/p - 1`` with its ``a_0 - 2`` entry computed
    without cancellation.  ``history`` lists ``max|a_1..a_k|`` at the start
    of each Newton cycle and at the end.  ``trajectory`` lists the measured
    ``max|R|`` before and after each accepted equilibration step, and
    ``max_abs_error`` is its final value.
    """

    b: ChebSeries
    residual: ChebSeries
    deviation: ChebSeries
    history: tuple
    relerr_estimate: float
    trajectory: tuple = field(default=())
    max_abs_error: float = None


def _check_target(f, cfg):
    if not isinstance(f, ChebSeries):
        raise ContractError("target must be a ChebSeries")
    if f.coeffs[0] == 0:
        raise ContractError("target needs f_0 != 0")
    if len(f) < cfg.k + 1:
        raise ContractError(f"target has {len(f)} coefficients, fewer than k+1={cfg.k + 1}")


def _evaluate(f, b, N):
    """Solve for a_hat with refinement and package the derived quantities."""
    fac = build_matrix(b, N).factor()
    a_hat = divide(f, b, N, factored=fac, refine_steps=REFINE_STEPS)
    dev = deviation_series(b, a_hat)
    return fac, a_hat, dev


def deviation_series(b, a_hat):
    """Series of ``f/p - 1``: ``(a_0 - 2, a_1, ..., a_N)``.

    Row 0 of the system reads ``b_0 a_0 + sum_c b_c a_c = f_0`` and
    ``b_0 = f_0/2``, so ``a_0 - 2 = -sum_{c>=1} b_c a_c / b_0``, which avoids
    subtracting 2 from a rounded ``a_0``.
    """
    bb = b.unprimed()
    a = np.asarray(a_hat.coeffs, dtype=float)
    k = min(len(bb) - 1, len(a) - 1)
    hi, lo = _two_product(np.asarray(bb[1 : k + 1], dtype=float), a[1 : k + 1])
    delta0 = -math.fsum(np.concatenate((hi, lo))) / bb[0] if k else a[0] - 2.0
    out = a.copy()
    out[0] = delta0
    return ChebSeries(out, a_hat.basis)


def _estimate(dev):
    """``sum'|a_n| - 1`` written in terms of the deviation series."""
    d = dev.coeffs
    head = abs(2.0 + d[0]) / 2 - 1 if d[0] < -2.0 else d[0] / 2
    return float(head + math.fsum(np.abs(d[1:])))


def jacobian(b, a_hat, N, k, factored=None):
    """``J[r, j-1] = d a_r / d b_j`` for r = 0..N, j = 1..k.

    Differentiating ``B a = F`` gives ``B J_j = -(dB/db_j) a``; row 0 of the
    right-hand side is ``a_j`` and row r is ``a_{r+j} + a_{|r-j|}`` with
    entries beyond N dropped.
    """
    if k == 0:
        return np.zeros((N + 1, 0))
    fac = factored if factored is not None else build_matrix(b, N).factor()
    a = np.asarray(a_hat.coeffs, dtype=float)

    def av(i):
        return a[i] if i <= N else 0.0

    rhs = np.zeros((N + 1, k))
    for j in range(1, k + 1):
        rhs[0, j - 1] = -av(j)
        for r in range(1, N + 1):
            rhs[r, j - 1] = -(av(r + j) + av(abs(r - j)))
    return fac.solve(rhs)


def _max_head(a_hat, k):
    return float(np.max(np.abs(a_hat.coeffs[1 : k + 1]))) if k else 0.0


def _result(b, a_hat, dev, history, trajectory=(), max_abs=None):
    return FitResult(b, a_hat, dev, tuple(history), _estimate(dev), tuple(trajectory), max_abs)


def newton_fit(f, cfg):
    """Newton iteration for ``a_1 = ... = a_k = 0`` with ``b_0 = f_0/2`` fixed.

    Starts from ``b_j = f_j``.  Each cycle solves the banded system and
    records ``max|a_1..a_k|``.  Iteration stops after ``cfg.max_newton_iters``
    updates, or earlier once that maximum is at most ``cfg.newton_tol`` and
    the last update moved every coefficient by no more than a few ulps of
    itself.  The target must not vanish on
    the domain; zeros have to be divided out beforehand.
    """
    _check_target(f, cfg)
    k, N = cfg.k, cfg.N
    # Stored coefficient 0 is f_0, so the unprimed b_0 is f_0/2 exactly.
    b = ChebSeries(np.array(f.coeffs[: k + 1], dtype=float), f.basis)
    history = []
    settled = False
    for it in range(cfg.max_newton_iters + 1):
        fac, a_hat, dev = _evaluate(f, b, N)
        history.append(_max_head(a_hat, k))
        done = history[-1] == 0.0 or (history[-1] <= cfg.newton_tol and settled)
        if done or it == cfg.max_newton_iters or k == 0:
            break
        jac = jacobian(b, a_hat, N, k, factored=fac)[1 : k + 1]
        if not np.all(np.isfinite(jac)) or np.linalg.cond(jac) * np.finfo(float).eps >= 1:
            raise StalledFitError("Newton system is singular", last=_result(b, a_hat, dev, history))
        delta = np.linalg.solve(jac, -a_hat.coeffs[1 : k + 1])
        coeffs = b.coeffs.copy()
        coeffs[1:] += delta
        # Tiny trailing b_j need updates that are small in absolute terms yet
        # large relative to b_j, so convergence is judged per coefficient.
        settled = bool(np.all(np.abs(delta) <= 4 * np.finfo(float).eps * np.abs(coeffs[1:])))
        b = ChebSeries(coeffs, b.basis)
    return _result(b, a_hat, dev, history)


def _difference_series(f, b, N):
    """Coefficients of ``f - p`` with f cut after index N."""
    if f.basis is not b.basis:
        raise BasisMismatchError("target and polynomial use different bases")
    fc = np.asarray(f.coeffs[: N + 1], dtype=float)
    bc = np.asarray(b.coeffs, dtype=float)
    n = max(len(fc), len(bc))
    diff = np.zeros(n)
    diff[: len(fc)] += fc
    diff[: len(bc)] -= bc
    return ChebSeries(diff, b.basis)


def relative_error_curve(f, b, N, xs):
    """``R(x) = f(x)/p(x) - 1`` at the abscissae ``xs``.

    ``f`` is either a series (cut after index N; ``R`` is then formed as
    ``(f - p)/p`` so small errors are not lost to cancellation) or a
    callable giving the exact target.
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    p = cheb_eval(b, xs)
    guard = 64 * np.finfo(float).eps * float(np.sum(np.abs(b.unprimed())))
    bad = np.nonzero(np.abs(p) <= guard)[0]
    if bad.size:
        x0 = float(xs[bad[0]])
        raise SingularPointError(f"denominator vanishes at x = {x0!r}", x=x0)
    if callable(f) and not isinstance(f, ChebSeries):
        return np.asarray(f(xs), dtype=float) / p - 1.0
    return cheb_eval(_difference_series(f, b, N), xs) / p


def locate_extrema(func, lo, hi, n_grid):
    """Local extrema of ``func`` on a uniform grid, endpoints included.

    Interior extrema are refined by a parabola through the three bracketing
    samples.  Returns abscissae and values.
    """
    xs = np.linspace(lo, hi, n_grid)
    ys = func(xs)
    idx = [0]
    for i in range(1, n_grid - 1):
        left, right = ys[i] - ys[i - 1], ys[i + 1] - ys[i]
        if left * right < 0 or (left != 0 and right == 0):
            idx.append(i)
    idx.append(n_grid - 1)
    px = []
    for i in idx:
        if 0 < i < n_grid - 1:
            y0, y1, y2 = ys[i - 1], ys[i], ys[i + 1]
            den = y0 - 2 * y1 + y2
            h = xs[1] - xs[0]
            shift = 0.5 * h * (y0 - y2) / den if den != 0 else 0.0
            px.append(xs[i] + float(np.clip(shift, -h, h)))
        else:
            px.append(xs[i])
    px = np.array(px)
    return px, func(px)


def _alternating(xs, ys):
    """Merge runs of same-sign extrema, keeping the largest magnitude."""
    keep_x, keep_y = [], []
    for x, y in zip(xs, ys):
        if keep_y and np.sign(y) == np.sign(keep_y[-1]):
            if abs(y) > abs(keep_y[-1]):
                keep_x[-1], keep_y[-1] = x, y
            continue
        keep_x.append(x)
        keep_y.append(y)
    return np.array(keep_x), np.array(keep_y)


def _active_indices(f, k):
    """Indices j = 1..k allowed to move: same parity as f if f has one."""
    c = np.asarray(f.coeffs, dtype=float)
    if f.basis is Basis.STANDARD and len(c) > 1:
        if not np.any(c[1::2]):
            return [j for j in range(1, k + 1) if j % 2 == 0]
        if not np.any(c[0::2]):
            return [j for j in range(1, k + 1) if j % 2 == 1]
    return list(range(1, k + 1))


def _chebT(j, u):
    return np.cos(j * np.arccos(np.clip(u, -1.0, 1.0)))


def equilibrate(f, start, cfg):
    """Adjust ``b_1..b_k`` so the alternating extrema of R approach a common size.

    Each step locates the extrema of R on ``cfg.extremum_grid`` points,
    takes the mean absolute extremum E, and solves the first-order system
    ``R_i + sum_j dR/db_j(x_i) delta_j = sign(R_i) E`` in least squares with
    the abscissae frozen.  A step (or a halved version of it) is accepted
    only if the measured ``max|R|`` does not grow.  The coefficient-sum
    estimate ``sum'|a_n| - 1`` is only an upper bound and may rise while the
    true maximum falls, so it is reported but not used to accept steps.
    """
    _check_target(f, cfg)
    k, N = cfg.k, cfg.N
    lo, hi = f.basis.domain
    active = _active_indices(f, k)
    b = start.b

    def curve(bs):
        return lambda x: relative_error_curve(f, bs, N, x)

    def max_abs(bs):
        _, ys = locate_extrema(curve(bs), lo, hi, cfg.extremum_grid)
        return float(np.max(np.abs(ys)))

    fac, a_hat, dev = _evaluate(f, b, N)
    peak = max_abs(b)
    trajectory = [peak]
    for _ in range(cfg.equilibrate_iters):
        xe, ye = _alternating(*locate_extrema(curve(b), lo, hi, cfg.extremum_grid))
        if len(xe) < len(active) + 1:
            raise NonEquioscillatingError(
                f"found {len(xe)} alternating extrema, need at least {len(active) + 1}")
        target = np.sign(ye) * np.mean(np.abs(ye))
        p = cheb_eval(b, xe)
        u = f.basis.to_unit(xe)
        amat = np.column_stack([-(1 + ye) * _chebT(j, u) / p for j in active])
        delta, *_ = np.linalg.lstsq(amat, target - ye, rcond=None)
        accepted = False
        for _halving in range(6):
            coeffs = b.coeffs.copy()
            coeffs[active] += delta
            trial = ChebSeries(coeffs, b.basis)
            try:
                t_fac, t_hat, t_dev = _evaluate(f, trial, N)
            except ArithmeticError:
                delta = delta / 2
                continue
            t_peak = max_abs(trial)
            if t_peak <= peak:
                b, a_hat, dev, peak = trial, t_hat, t_dev, t_peak
                accepted = True
                break
            delta = delta / 2
        if not accepted:
            break
        trajectory.append(peak)
    return _result(b, a_hat, dev, start.history, trajectory, peak)
