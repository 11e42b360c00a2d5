"""Division of T_n by a Chebyshev-basis polynomial and coefficient extension.

For a denominator ``B(x) = sum_{j<=k} b_j T_j(x)`` every ``T_n`` splits as

    T_n = (sum_j d_j T_j) B + c_0/2 + sum_{1<=j<k} c_j T_j ,

and because ``T_{n+1} = 2 T_1 T_n - T_{n-1}`` the pair ``(d, c)`` at n+1
follows from the pairs at n and n-1.  Integrating against the Chebyshev
weight turns the split into ``a_n = 2 d_0 + sum' c_i a_i``, which extends
the first k coefficients of ``1/B`` to any index.

Arithmetic is generic: float inputs stay float, ``fractions.Fraction``
inputs give exact states.
"""

from dataclasses import dataclass

import numpy as np

from .core import ChebSeries
from .errors import ContractError, DegenerateDenominatorError, IndexMismatchError

__all__ = [
    "DivisionState",
    "trivial_state",
    "divide_Tn_oracle",
    "division_step",
    "extend",
    "iterate_states",
]

DEGENERATE_TOL = 1e-300


@dataclass(frozen=True)
class DivisionState:
    """Quotient ``d_0..d_{n-k}`` and remainder ``c_0..c_{k-1}`` of T_n.

    ``c[0]`` is stored unhalved, like the leading coefficient of a series.
    """

    n: int
    d: tuple
    c: tuple

    @property
    def k(self):
        return len(self.c)

    def quotient(self, basis="T"):
        """Quotient as a series (its T_0 coefficient is d_0, not d_0/2)."""
        if not self.d:
            return ChebSeries([0.0], basis)
        arr = np.array(self.d, dtype=_dtype(self.d))
        return ChebSeries.from_unprimed(arr, basis)

    def remainder(self, basis="T"):
        return ChebSeries(np.array(self.c, dtype=_dtype(self.c)), basis)


def _dtype(values):
    return float if all(isinstance(v, (float, int, np.floating, np.integer)) for v in values) else object


def _plain(v):
    return float(v) if isinstance(v, np.floating) else v


def _unprimed(b):
    if not isinstance(b, ChebSeries):
        raise ContractError("denominator must be a ChebSeries")
    vals = [_plain(v) for v in b.coeffs]
    vals[0] = vals[0] / 2
    k = len(vals) - 1
    if k < 1:
        raise ContractError("denominator must have degree >= 1")
    if abs(vals[k]) < DEGENERATE_TOL:
        raise DegenerateDenominatorError(f"leading coefficient b_{k} = {vals[k]!r} vanishes")
    return vals


def trivial_state(n, k, one=1.0):
    """State for n < k: T_n is its own remainder and the quotient is empty.

    ``one`` fixes the number type (pass ``Fraction(1)`` for exact states).
    """
    if not 0 <= n < k:
        raise ContractError(f"trivial state needs 0 <= n < k, got n={n}, k={k}")
    c = [one * 0] * k
    c[n] = 2 * one if n == 0 else one
    return DivisionState(n, (), tuple(c))


def divide_Tn_oracle(n, b):
    """Solve the triangular system for ``(d, c)`` at index n by back substitution.

    Unknowns are ordered ``c_0..c_{k-1}, d_0..d_{n-k}``.  Row m >= 1 matches
    the T_m coefficient, row 0 twice the T_0 coefficient, so the diagonal
    holds 1 for the c's, ``b_k`` for d_0 and ``b_k/2`` for the other d's.
    """
    bb = _unprimed(b)
    k = len(bb) - 1
    if n < k:
        return trivial_state(n, k, bb[k] * 0 + 1)

    def bv(i):
        return bb[i] if 0 <= i <= k else 0

    size = n + 1
    zero = bb[k] * 0
    rows = [[zero] * size for _ in range(size)]
    for m in range(size):
        if m < k:
            rows[m][m] = zero + 1
        for j in range(n - k + 1):
            if m == 0:
                entry = bv(j) + (bv(0) if j == 0 else 0)
            else:
                entry = (bv(j + m) + (bv(j - m) if j >= m else 0)
                         + (bv(m - j) if m >= j else 0)) / 2
            rows[m][k + j] = entry
    rhs = [zero] * size
    rhs[n] = zero + 1
    x = [zero] * size
    for m in range(size - 1, -1, -1):
        acc = rhs[m]
        for col in range(m + 1, size):
            if rows[m][col]:
                acc = acc - rows[m][col] * x[col]
        x[m] = acc / rows[m][m]
    return DivisionState(n, tuple(x[k:]), tuple(x[:k]))


def division_step(prev, prev2, b):
    """Advance ``(d, c)`` from indices n and n-1 to n+1."""
    bb = _unprimed(b)
    k = len(bb) - 1
    if prev.n != prev2.n + 1:
        raise IndexMismatchError(f"states at n={prev.n} and n={prev2.n} are not consecutive")
    if prev2.n < 0 or prev.k != k or prev2.k != k:
        raise IndexMismatchError("states do not belong to this denominator")
    n = prev.n
    d, c = list(prev.d), list(prev.c)
    d2, c2 = list(prev2.d), list(prev2.c)

    def at(seq, i):
        return seq[i] if 0 <= i < len(seq) else 0

    lead = c[k - 1] / bb[k]
    new_d = []
    for j in range(n + 1 - k + 1):
        if j == 0:
            val = at(d, 1) + lead
        elif j == 1:
            val = 2 * at(d, 0) + at(d, 2)
        else:
            val = at(d, j - 1) + at(d, j + 1)
        new_d.append(val - at(d2, j))
    new_c = []
    for j in range(k):
        if j == 0:
            val = 2 * at(c, 1) - 2 * bb[0] * lead - c2[0]
        else:
            val = at(c, j - 1) + at(c, j + 1) - bb[j] * lead - c2[j]
        new_c.append(val)
    return DivisionState(n + 1, tuple(new_d), tuple(new_c))


def iterate_states(b, n_max):
    """Yield division states for n = 0 .. n_max, starting from trivial states."""
    bb = _unprimed(b)
    k = len(bb) - 1
    prev2 = prev = None
    for n in range(n_max + 1):
        if n < k:
            state = trivial_state(n, k, bb[k] * 0 + 1)
        elif n == 0 or prev2 is None:
            state = divide_Tn_oracle(n, b)
        else:
            state = division_step(prev, prev2, b)
        yield state
        prev2, prev = prev, state


def extend(a_seed, b, n_max):
    """Extend ``a_0..a_{k-1}`` of ``1/B`` to ``a_0..a_{n_max}``.

    The seed has to come from elsewhere (partial fractions or the banded
    system); the recurrence amplifies seed and rounding errors as n grows.
    """
    bb = _unprimed(b)
    k = len(bb) - 1
    seed = [_plain(v) for v in np.asarray(a_seed).ravel()] if not isinstance(a_seed, (list, tuple)) \
        else list(a_seed)
    if len(seed) != k:
        raise ContractError(f"seed must hold exactly k={k} coefficients, got {len(seed)}")
    out = seed[: n_max + 1]
    for state in iterate_states(b, n_max):
        if state.n < k:
            continue
        a_n = 2 * state.d[0] + state.c[0] * seed[0] / 2
        for i in range(1, k):
            a_n = a_n + state.c[i] * seed[i]
        out.append(a_n)
    return ChebSeries(np.array(out, dtype=_dtype(out)), b.basis)
