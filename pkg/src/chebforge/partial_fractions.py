"""Chebyshev coefficients of 1/(z - x)^s and of inverse polynomials.

For a root ``z`` off the interval, ``a_{n,s}(z)`` is the coefficient of
``T_n`` in the expansion of ``1/(z - x)^s``.  Summing those over the
partial-fraction decomposition of ``1/p(x)`` gives the Chebyshev series of
the inverse polynomial without any quadrature.
"""

import math
from dataclasses import dataclass

import numpy as np

from .core import Basis, ChebSeries, MonomialPoly, chebyshev_points
from .errors import (
    ContractError,
    DomainError,
    InconsistentDecompositionError,
    IterationLimitError,
    UnboundedFunctionError,
)

__all__ = [
    "PartialFractionTerm",
    "PFDecomposition",
    "principal_w",
    "a_n1",
    "a_ns_table",
    "a0s",
    "decompose",
    "expand_inverse",
    "expand_inverse_shifted",
    "moment",
    "sensitivity",
]

ROOT_STEP_TOL = 1e-14
ROOT_MAX_ITERS = 500
# The first entry is the default; later ones only apply on reconstruction failure.
CLUSTER_RTOLS = (1e-7, 1e-5, 1e-4, 1e-3, 3e-3, 1e-2, 3e-2)
DOMAIN_MARGIN = 1e-8
RECONSTRUCTION_RTOL = 1e-9
CANCELLATION_ULPS = 64
NATIVE_EPS = float(np.finfo(float).eps)
IMAG_RTOL = 1e-12
MAX_TAIL = 200000


@dataclass(frozen=True)
class PartialFractionTerm:
    """One summand ``weight / (z - x)**s``."""

    z: complex
    s: int
    weight: complex

    def __post_init__(self):
        if self.s < 1:
            raise ContractError(f"multiplicity exponent must be >= 1, got {self.s}")
        object.__setattr__(self, "z", complex(self.z))
        object.__setattr__(self, "weight", complex(self.weight))

    def __call__(self, x):
        return self.weight / (self.z - x) ** self.s


@dataclass(frozen=True)
class PFDecomposition:
    """``scale * sum(term(x))`` equals ``1/p(x)``."""

    terms: tuple
    scale: complex = 1.0
    basis: Basis = Basis.STANDARD

    def __call__(self, x):
        x = np.asarray(x, dtype=complex)
        return self.scale * sum(t(x) for t in self.terms)


def _branch_root(z):
    """(z^2 - 1)^(1/2) on the sheet that makes |z + r| > 1."""
    z = complex(z)
    if z.imag == 0.0 and -1.0 <= z.real <= 1.0:
        raise DomainError(f"z = {z.real!r} lies on the cut [-1, 1]")
    r = np.sqrt((z - 1) * (z + 1))
    w = z + r
    if abs(w) < 1.0 or (abs(w) == 1.0 and abs(z - r) > 1.0):
        r = -r
    return r


def principal_w(z):
    """``w = z + (z^2 - 1)^(1/2)`` with the branch chosen so ``|w| > 1``."""
    return complex(z) + _branch_root(z)


def a_n1(z, n):
    """Coefficient of ``T_n`` in ``1/(z - x)``: ``2 / (r w^n)``."""
    if n < 0:
        raise ContractError(f"n must be >= 0, got {n}")
    r = _branch_root(z)
    w = complex(z) + r
    return 2.0 / r * (1.0 / w) ** n


def _poch_half(m):
    return math.gamma(m + 0.5) / math.gamma(0.5)


def a0s(z, s):
    """Closed form (finite Pochhammer sum) for ``a_{0,s}(z)``, s >= 1."""
    z = complex(z)
    r = _branch_root(z)
    return 2.0 / r if s == 1 else _a0s(z, r, s)


def _a0s(z, r, s):
    """Closed form for ``a_{0,s}``, s >= 2."""
    sp = s - 1
    z2m1 = (z - 1) * (z + 1)
    total = 0j
    for l in range(sp // 2 + 1):
        term = (-1) ** l / (math.factorial(l) * math.factorial(sp - 2 * l))
        term *= _poch_half(sp - l) * (2 * z) ** (sp - 2 * l)
        total += term / (r * z2m1 ** (sp - l))
    return 2 * total


def _start_index(w, n_max, s_max):
    """Index beyond which |a_{n,s}| has fallen below eps relative to index n_max."""
    decay = math.log(abs(w))
    extra = int(math.ceil((40.0 + 4.0 * s_max) / decay)) + 4 if decay > 0 else MAX_TAIL
    return n_max + min(extra, MAX_TAIL)


def a_ns_table(z, n_max, s_max):
    """Table ``A[n, s-1] = a_{n,s}(z)`` for ``0 <= n <= n_max, 1 <= s <= s_max``.

    Row s = 1 is the closed form.  For s >= 2 the relation
    ``a_{n+1,s} = a_{n-1,s} - 2n/(s-1) a_{n,s-1}`` loses relative accuracy
    like ``|w|^n`` when run upward, so it is run downward from an index where
    the coefficients are negligible, starting from zeros.  The closed form
    :func:`a0s` for ``a_{0,s}`` serves as an independent check.
    """
    if s_max < 1 or n_max < 0:
        raise ContractError("need n_max >= 0 and s_max >= 1")
    z = complex(z)
    r = _branch_root(z)
    w = z + r
    top = _start_index(w, max(n_max, 1), s_max) if s_max > 1 else n_max
    inv_w = 1.0 / w
    table = np.zeros((top + 2, s_max), dtype=complex)
    table[:, 0] = 2.0 / r * inv_w ** np.arange(top + 2)
    for s in range(2, s_max + 1):
        col = table[:, s - 1]
        prev = table[:, s - 2]
        for n in range(top, 0, -1):
            col[n - 1] = col[n + 1] + 2 * n / (s - 1) * prev[n]
    return table[: n_max + 1].copy()


def moment(l, n, z, s_opt=0):
    """``(2/pi) int x^l T_{s_opt}(x) / (z - x)^n dx / sqrt(1 - x^2)`` for l < n."""
    if n < 1 or l < 0 or l >= n:
        raise ContractError(f"moment needs 0 <= l < n, got l={l}, n={n}")
    if s_opt < 0:
        raise ContractError(f"s_opt must be >= 0, got {s_opt}")
    table = a_ns_table(z, l + s_opt, n)
    col = table[:, n - 1]
    total = 0j
    for i in range(l % 2, l + 1, 2):
        term = math.comb(l, (l - i) // 2) * (col[abs(i - s_opt)] + col[i + s_opt])
        total += term / 2 if i == 0 else term
    return total / 2**l


def sensitivity(z, n):
    """Amplification of relative root error into relative error of ``a_{n,1}``."""
    z = complex(z)
    r = _branch_root(z)
    return abs(z * z / (r * r) + n * z / r)


def _aberth(d):
    """All roots of ``sum d_j x^j`` by simultaneous (Aberth-Ehrlich) iteration."""
    k = len(d) - 1
    coeffs = np.asarray(d[::-1], dtype=complex)
    dcoeffs = np.polyder(coeffs)
    absd = np.abs(coeffs)
    # Geometric mean of the root moduli; the offset angle avoids symmetric stalls.
    radius = abs(coeffs[-1] / coeffs[0]) ** (1.0 / k) or 1.0
    angles = 2 * np.pi * np.arange(k) / k + 0.4
    roots = radius * np.exp(1j * angles)
    for _ in range(ROOT_MAX_ITERS):
        pv = np.polyval(coeffs, roots)
        dv = np.polyval(dcoeffs, roots)
        bound = 8 * np.finfo(float).eps * np.polyval(absd, np.abs(roots))
        if np.all(np.abs(pv) <= bound):
            return roots
        ratio = np.where(dv != 0, pv / np.where(dv != 0, dv, 1), 0)
        diff = roots[:, None] - roots[None, :]
        np.fill_diagonal(diff, 1.0)
        repulsion = (1.0 / diff).sum(axis=1) - 1.0
        step = ratio / (1 - ratio * repulsion)
        step[np.abs(pv) <= bound] = 0
        roots = roots - step
        if np.max(np.abs(step) / (1 + np.abs(roots))) < ROOT_STEP_TOL:
            return roots
    raise IterationLimitError(f"root finder did not converge in {ROOT_MAX_ITERS} iterations")


def _cluster(roots, rtol):
    """Group roots closer than ``rtol`` relative (single linkage)."""
    groups = []
    for z in roots:
        hits = [g for g in groups
                if any(abs(z - y) <= rtol * max(1.0, abs(z)) for y in g)]
        merged = [z]
        for g in hits:
            merged.extend(g)
            groups.remove(g)
        groups.append(merged)
    return [(complex(np.mean(g)), len(g)) for g in groups]


def _refine_multiple(coeffs, z, m):
    """Newton on the (m-1)-th derivative, where a root of order m is simple."""
    q = np.polyder(coeffs, m - 1) if m > 1 else coeffs
    dq = np.polyder(q)
    for _ in range(20):
        dv = np.polyval(dq, z)
        if dv == 0:
            break
        step = np.polyval(q, z) / dv
        z = z - step
        if abs(step) <= 4 * np.finfo(float).eps * max(1.0, abs(z)):
            break
    return z


def _inverse_series(g, length):
    """First ``length`` Taylor coefficients of ``1/G(t)`` given those of G."""
    h = np.zeros(length, dtype=complex)
    h[0] = 1 / g[0]
    for r in range(1, length):
        acc = sum(g[j] * h[r - j] for j in range(1, min(r, len(g) - 1) + 1))
        h[r] = -acc / g[0]
    return h


def _check_domain(z, basis):
    lo, hi = Basis(basis).domain
    near_real = abs(z.imag) <= DOMAIN_MARGIN
    if near_real and lo - DOMAIN_MARGIN <= z.real <= hi + DOMAIN_MARGIN:
        raise UnboundedFunctionError(
            f"root {z} lies in or within {DOMAIN_MARGIN:g} of [{lo:g}, {hi:g}]")


def _weights(clusters, lead, basis):
    terms = []
    for i, (zi, mi) in enumerate(clusters):
        # 1/p = (-1)^m t^-m / G(t) with t = zi - x and
        # G(t) = d_k prod_{j != i} (zi - zj - t)^mj.
        g = np.array([lead], dtype=complex)
        for j, (zj, mj) in enumerate(clusters):
            if j != i:
                for _ in range(mj):
                    g = np.convolve(g, [zi - zj, -1.0])
        h = _inverse_series(g, mi)
        sign = (-1) ** mi
        for s in range(1, mi + 1):
            terms.append(PartialFractionTerm(zi, s, sign * h[mi - s]))
    return PFDecomposition(tuple(terms), 1.0, basis)


def decompose(p, basis=Basis.STANDARD):
    """Partial-fraction decomposition of ``1/p(x)`` over the complex roots of p.

    Returns terms ``w / (z - x)**s``.  Roots are found by Aberth iteration,
    clustered into multiple roots, and the weights follow from the Taylor
    expansion of the cofactor about each root.  Roots of order m >= 3 scatter
    by about eps^(1/m) in floating point, so when the default clustering
    tolerance leaves a decomposition that fails its reconstruction check the
    clustering is retried with looser tolerances.
    """
    basis = Basis(basis)
    d = np.asarray(p.normalized().coeffs, dtype=float)
    k = len(d) - 1
    if k < 1:
        raise ContractError("denominator must have degree >= 1")
    coeffs = d[::-1].astype(complex)
    raw = np.array([-d[0] / d[1]], dtype=complex) if k == 1 else _aberth(d)
    xs = chebyshev_points(32, basis)
    exact = 1.0 / np.polyval(d[::-1], xs)
    best = None
    for rtol in CLUSTER_RTOLS:
        clusters = [(_refine_multiple(coeffs, z, m), m) for z, m in _cluster(raw, rtol)]
        for z, _ in clusters:
            _check_domain(z, basis)
        result = _weights(clusters, d[-1], basis)
        err = np.max(np.abs(result(xs) - exact) / np.abs(exact))
        if err <= RECONSTRUCTION_RTOL:
            return result
        if best is None or err < best[0]:
            best = (err, result)
    # Summing the terms cancels when poles crowd together, so the best grouping
    # may miss the fixed bound by rounding alone.
    err, result = best
    cond = np.max(sum(np.abs(t(xs)) for t in result.terms) * np.abs(np.polyval(d[::-1], xs)))
    if err <= CANCELLATION_ULPS * NATIVE_EPS * cond:
        return result
    raise InconsistentDecompositionError(
        f"partial fractions reproduce 1/p only to relative {err:.3g}")


def _recombine(pieces, n_max, basis):
    total = np.zeros(n_max + 1, dtype=complex)
    scale = np.zeros(n_max + 1)
    for piece in pieces:
        total += piece
        scale += np.abs(piece)
    tol = IMAG_RTOL * max(np.max(scale), np.finfo(float).tiny)
    worst = np.max(np.abs(total.imag))
    if worst > tol:
        raise InconsistentDecompositionError(
            f"imaginary residue {worst:.3g} exceeds {tol:.3g}; roots not conjugate-closed")
    return ChebSeries(total.real.copy(), basis)


def expand_inverse(d, n_max):
    """Chebyshev series ``a_0..a_{n_max}`` (T basis) of a decomposed inverse polynomial."""
    if n_max < 0:
        raise ContractError(f"n_max must be >= 0, got {n_max}")
    pieces = []
    for t in d.terms:
        table = a_ns_table(t.z, n_max, t.s)
        pieces.append(d.scale * t.weight * table[:, t.s - 1])
    return _recombine(pieces, n_max, Basis.STANDARD)


def expand_inverse_shifted(d, n_max):
    """Same as :func:`expand_inverse` in the shifted basis on [0, 1]."""
    if n_max < 0:
        raise ContractError(f"n_max must be >= 0, got {n_max}")
    pieces = []
    for t in d.terms:
        # 1/(z - x)^s = 2^s / (2z - 1 - u)^s with u = 2x - 1
        table = a_ns_table(2 * t.z - 1, n_max, t.s)
        pieces.append(d.scale * t.weight * 2**t.s * table[:, t.s - 1])
    return _recombine(pieces, n_max, Basis.SHIFTED)
