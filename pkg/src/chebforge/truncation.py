"""Leading Chebyshev coefficients of 1/B and f/B from a banded linear system.

Multiplying ``B(x) = sum_j b_j T_j`` by the unknown series ``sum' a_n T_n``
and matching coefficients of ``T_0 .. T_N`` (dropping ``a_n`` beyond N)
gives a symmetric system of bandwidth ``2k + 1``.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgWarning, lapack, lu_factor, lu_solve

from .core import ChebSeries, MonomialPoly, from_monomial
from .errors import BasisMismatchError, ContractError, NearRootError, TruncatedInputWarning

__all__ = [
    "BandedSystem",
    "FactoredSystem",
    "build_matrix",
    "reciprocal",
    "divide",
    "reciprocal_via_power_series",
    "exact_residual",
]

MAX_CONDITION = 1e14


@dataclass(frozen=True)
class BandedSystem:
    """Matrix ``B_{r,c}``, r, c = 0..N, kept in LAPACK upper-band storage.

    ``band[k + r - c, c]`` holds ``B_{r,c}`` for ``max(0, c - k) <= r <= c``;
    the lower triangle follows by symmetry.
    """

    N: int
    b: ChebSeries
    band: np.ndarray = field(repr=False)

    @property
    def k(self):
        return self.band.shape[0] - 1

    def dense(self):
        size = self.N + 1
        out = np.zeros((size, size))
        k = self.k
        for c in range(size):
            for r in range(max(0, c - k), c + 1):
                out[r, c] = out[c, r] = self.band[k + r - c, c]
        return out

    def factor(self):
        """LU-factor the system and estimate its condition number."""
        mat = self.dense()
        anorm = np.max(np.sum(np.abs(mat), axis=0))
        with warnings.catch_warnings():
            # singularity is reported as NearRootError below
            warnings.simplefilter("ignore", LinAlgWarning)
            lu, piv = lu_factor(mat, check_finite=True)
        if np.any(np.diag(lu) == 0):
            raise NearRootError("banded system is singular", rcond=0.0)
        rcond, info = lapack.dgecon(lu, anorm, norm="1")
        if info != 0 or not rcond * MAX_CONDITION >= 1.0:
            raise NearRootError(
                f"banded system condition estimate {1 / max(rcond, 1e-300):.3g} exceeds "
                f"{MAX_CONDITION:g}; the denominator has a root near the domain",
                rcond=rcond,
            )
        return FactoredSystem(self, lu, piv, float(rcond))


@dataclass(frozen=True)
class FactoredSystem:
    system: BandedSystem
    lu: np.ndarray = field(repr=False)
    piv: np.ndarray = field(repr=False)
    rcond: float

    def solve(self, rhs):
        return lu_solve((self.lu, self.piv), np.asarray(rhs, dtype=float))

    def solve_refined(self, rhs, steps=3):
        """Solve, then refine with residuals computed without rounding error.

        The refined solution is accurate relative to each component, which
        matters when the solution spans many orders of magnitude.
        """
        rhs = np.asarray(rhs, dtype=float)
        x = self.solve(rhs)
        for _ in range(steps):
            r = exact_residual(self.system, x, rhs)
            if not np.any(r):
                break
            x = x + self.solve(r)
        return x


def _two_product(a, b):
    """Error-free product: a*b == hi + lo exactly (Dekker)."""
    hi = a * b
    ca, cb = 134217729.0 * a, 134217729.0 * b
    ah = ca - (ca - a)
    bh = cb - (cb - b)
    al, bl = a - ah, b - bh
    lo = ((ah * bh - hi) + ah * bl + al * bh) + al * bl
    return hi, lo


def _product_terms(k, N):
    """Index triples (row, b index, column, factor) expanding B @ x."""
    rows, bidx, cols, fac = [], [], [], []

    def add(r, i, c, f=1.0):
        if 0 <= i <= k:
            rows.append(r)
            bidx.append(i)
            cols.append(c)
            fac.append(f)

    for c in range(min(k, N) + 1):
        add(0, c, c)
    for r in range(1, N + 1):
        for c in range(max(0, r - k), min(N, r + k) + 1):
            if c == 0:
                add(r, r, 0)
            elif c == r:
                add(r, 0, r, 2.0)
                add(r, 2 * r, r)
            else:
                add(r, abs(r - c), c)
                add(r, r + c, c)
    return tuple(np.array(v) for v in (rows, bidx, cols, fac))


def exact_residual(system, x, rhs):
    """``rhs - B @ x`` correctly rounded from exact products and sums."""
    bb = np.asarray(system.b.unprimed(), dtype=float)
    rows, bidx, cols, fac = _product_terms(system.k, system.N)
    hi, lo = _two_product(bb[bidx] * fac, np.asarray(x, dtype=float)[cols])
    out = np.empty(system.N + 1)
    order = np.argsort(rows, kind="stable")
    bounds = np.searchsorted(rows[order], np.arange(system.N + 2))
    for r in range(system.N + 1):
        sel = order[bounds[r] : bounds[r + 1]]
        out[r] = math.fsum(np.concatenate(([rhs[r]], -hi[sel], -lo[sel])))
    return out


def build_matrix(b, N):
    """Assemble the symmetric matrix for denominator ``b`` and truncation N."""
    bb = np.asarray(b.unprimed(), dtype=float)
    k = len(bb) - 1
    if N < k:
        raise ContractError(f"truncation index N={N} is below the denominator degree {k}")

    def bv(i):
        return bb[i] if i <= k else 0.0

    band = np.zeros((k + 1, N + 1))
    for c in range(N + 1):
        for r in range(max(0, c - k), c + 1):
            if r == 0:
                val = bv(c)
            elif r == c:
                val = 2 * bb[0] + bv(2 * r)
            else:
                val = bv(c - r) + bv(r + c)
            band[k + r - c, c] = val
    return BandedSystem(N, b, band)


def reciprocal(b, N):
    """Coefficients ``a_0..a_N`` of ``1/B`` from the truncated system."""
    fac = build_matrix(b, N).factor()
    rhs = np.zeros(N + 1)
    rhs[0] = 2.0
    return ChebSeries(fac.solve(rhs), b.basis)


def _division_rhs(f, N):
    coeffs = np.asarray(f.coeffs, dtype=float)
    if len(coeffs) < N + 1:
        warnings.warn(
            f"numerator has {len(coeffs)} coefficients, fewer than N+1={N + 1}; "
            "missing ones taken as zero",
            TruncatedInputWarning,
            stacklevel=3,
        )
        coeffs = np.concatenate([coeffs, np.zeros(N + 1 - len(coeffs))])
    rhs = 2 * coeffs[: N + 1]
    rhs[0] = coeffs[0]
    return rhs


def divide(f, b, N, factored=None, refine_steps=0):
    """Coefficients ``a_0..a_N`` of ``f/B`` from the truncated system.

    ``factored`` may pass a :class:`FactoredSystem` for ``b`` to skip the
    factorization; ``refine_steps > 0`` switches on iterative refinement
    with exact residuals.
    """
    if f.basis is not b.basis:
        raise BasisMismatchError(f"numerator basis {f.basis.value} != denominator basis {b.basis.value}")
    fac = factored if factored is not None else build_matrix(b, N).factor()
    rhs = _division_rhs(f, N)
    sol = fac.solve_refined(rhs, refine_steps) if refine_steps else fac.solve(rhs)
    return ChebSeries(sol, b.basis)


def reciprocal_via_power_series(d, n_max):
    """Cross-check: invert the power series of ``1/p`` and convert to Chebyshev.

    Only valid when the Taylor series of ``1/p`` at 0 converges on the whole
    interval, which the caller has to ensure.
    """
    if not isinstance(d, MonomialPoly):
        d = MonomialPoly(d)
    dd = np.asarray(d.coeffs, dtype=float)
    if dd[0] == 0:
        raise ContractError("power-series reciprocal needs d_0 != 0")
    c = np.zeros(n_max + 1)
    c[0] = 1 / dd[0]
    for n in range(1, n_max + 1):
        m = min(n, len(dd) - 1)
        c[n] = -sum(dd[j] * c[n - j] for j in range(1, m + 1)) / dd[0]
    return from_monomial(MonomialPoly(c))
