"""Chebyshev series on [-1, 1] (T_n) and [0, 1] (shifted T*_n).

A :class:`ChebSeries` holds coefficients ``a_0 .. a_N`` of the primed sum

    f(x) = a_0/2 + a_1 T_1(x) + ... + a_N T_N(x)

so ``a_0`` is stored unhalved and the factor 1/2 is applied at evaluation.
Polynomial *denominators* in the rest of the package are written without the
prime, ``sum_j b_j T_j``; :meth:`ChebSeries.unprimed` gives that view.

Coefficients are numpy arrays.  Float64 is the default; object arrays of
``mpmath.mpf`` also pass through every routine here unchanged.
"""

import enum
import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import BasisMismatchError, ContractError

__all__ = [
    "Basis",
    "ChebSeries",
    "MonomialPoly",
    "cheb_eval",
    "product",
    "integrate",
    "differentiate",
    "from_monomial",
    "to_monomial",
    "divide_by_x",
    "tail_bound",
    "chebyshev_points",
]


class Basis(str, enum.Enum):
    STANDARD = "T"
    SHIFTED = "Tstar"

    @property
    def domain(self):
        return (-1.0, 1.0) if self is Basis.STANDARD else (0.0, 1.0)

    def to_unit(self, x):
        """Map an abscissa of this basis' domain onto [-1, 1]."""
        if self is Basis.STANDARD:
            return x
        return 2 * x - 1


def _coeff_array(values):
    arr = np.array(values, copy=True)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise ContractError("coefficients must be a one-dimensional sequence")
    if arr.dtype.kind in "biu":
        arr = arr.astype(float)
    elif arr.dtype.kind == "c":
        raise ContractError("complex coefficients are not supported")
    elif arr.dtype.kind not in "fO":
        raise ContractError(f"unsupported coefficient dtype {arr.dtype}")
    return arr


@dataclass(frozen=True, eq=False)
class ChebSeries:
    """Immutable Chebyshev series with the primed-sum convention."""

    coeffs: np.ndarray
    basis: Basis = Basis.STANDARD

    def __post_init__(self):
        arr = _coeff_array(self.coeffs)
        if arr.size == 0:
            raise ContractError("a series needs at least one coefficient")
        if arr.dtype.kind == "f" and not np.all(np.isfinite(arr)):
            raise ContractError("series coefficients must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)
        object.__setattr__(self, "basis", Basis(self.basis))

    @classmethod
    def from_unprimed(cls, b, basis=Basis.STANDARD):
        """Build the series equal to ``sum_j b_j T_j`` (no halving of b_0)."""
        arr = _coeff_array(b)
        arr[0] = arr[0] * 2
        return cls(arr, basis)

    def unprimed(self):
        """Coefficients b_j with ``sum_j b_j T_j`` equal to this series."""
        arr = self.coeffs.copy()
        arr[0] = arr[0] / 2
        return arr

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, n):
        return self.coeffs[n]

    def __call__(self, x):
        return cheb_eval(self, x)

    def __repr__(self):
        return f"ChebSeries({self.coeffs.tolist()!r}, basis={self.basis.value!r})"

    def __eq__(self, other):
        if not isinstance(other, ChebSeries):
            return NotImplemented
        return self.basis is other.basis and np.array_equal(self.coeffs, other.coeffs)

    __hash__ = None

    def _check(self, other):
        if self.basis is not other.basis:
            raise BasisMismatchError(
                f"cannot combine {self.basis.value} and {other.basis.value} series"
            )

    def __add__(self, other):
        if not isinstance(other, ChebSeries):
            return NotImplemented
        self._check(other)
        n = max(len(self), len(other))
        return ChebSeries(self.padded(n).coeffs + other.padded(n).coeffs, self.basis)

    def __sub__(self, other):
        if not isinstance(other, ChebSeries):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        return ChebSeries(-self.coeffs, self.basis)

    def __mul__(self, other):
        if isinstance(other, ChebSeries):
            return product(self, other)
        return ChebSeries(self.coeffs * other, self.basis)

    def __rmul__(self, other):
        return ChebSeries(other * self.coeffs, self.basis)

    def padded(self, length):
        """Zero-pad (never truncate) to ``length`` coefficients."""
        if length <= len(self):
            return self
        out = np.zeros(length, dtype=self.coeffs.dtype)
        if out.dtype == object:
            out[:] = 0 * self.coeffs[0]
        out[: len(self)] = self.coeffs
        return ChebSeries(out, self.basis)

    def truncated(self, n_max):
        """Keep coefficients a_0 .. a_{n_max}."""
        return ChebSeries(self.coeffs[: n_max + 1], self.basis)

    def normalized(self, atol=1e-300):
        """Drop trailing coefficients with magnitude below ``atol``."""
        c = self.coeffs
        last = len(c) - 1
        while last > 0 and abs(c[last]) < atol:
            last -= 1
        return ChebSeries(c[: last + 1], self.basis)

    def to_json(self):
        body = ", ".join(format(float(c), ".17g") for c in self.coeffs)
        return f'{{"basis": "{self.basis.value}", "coeffs": [{body}]}}'

    @classmethod
    def from_json(cls, text):
        obj = json.loads(text) if isinstance(text, str) else text
        try:
            return cls(np.asarray(obj["coeffs"], dtype=float), Basis(obj.get("basis", "T")))
        except (KeyError, ValueError, TypeError) as exc:
            raise ContractError(f"malformed series document: {exc}") from exc


@dataclass(frozen=True, eq=False)
class MonomialPoly:
    """Power-basis polynomial ``d_0 + d_1 x + ... + d_k x^k``."""

    coeffs: np.ndarray

    def __post_init__(self):
        arr = _coeff_array(self.coeffs)
        if arr.size == 0:
            raise ContractError("a polynomial needs at least one coefficient")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __len__(self):
        return len(self.coeffs)

    def __call__(self, x):
        acc = 0 * x + self.coeffs[-1]
        for d in self.coeffs[-2::-1]:
            acc = acc * x + d
        return acc

    def __repr__(self):
        return f"MonomialPoly({self.coeffs.tolist()!r})"

    def __eq__(self, other):
        if not isinstance(other, MonomialPoly):
            return NotImplemented
        return np.array_equal(self.coeffs, other.coeffs)

    __hash__ = None

    def normalized(self, atol=0.0):
        c = self.coeffs
        last = len(c) - 1
        while last > 0 and abs(c[last]) <= atol:
            last -= 1
        return MonomialPoly(c[: last + 1])


def cheb_eval(s, x):
    """Evaluate ``s`` at ``x`` (scalar or array) by Clenshaw's recurrence."""
    u = s.basis.to_unit(np.asarray(x) if not np.isscalar(x) else x)
    a = s.coeffs
    b1 = 0 * u
    b2 = 0 * u
    for n in range(len(a) - 1, 0, -1):
        b1, b2 = a[n] + 2 * u * b1 - b2, b1
    return a[0] / 2 + u * b1 - b2


def product(s1, s2):
    """Product of two series via ``T_m T_n = (T_{m+n} + T_{|m-n|}) / 2``."""
    s1._check(s2)
    p, q = s1.unprimed(), s2.unprimed()
    outer = np.multiply.outer(p, q) / 2
    i, j = np.indices(outer.shape)
    full = np.zeros(len(p) + len(q) - 1, dtype=np.result_type(p, q))
    if full.dtype == object:
        full[:] = 0 * p[0]
    np.add.at(full, (i + j).ravel(), outer.ravel())
    np.add.at(full, np.abs(i - j).ravel(), outer.ravel())
    return ChebSeries.from_unprimed(full, s1.basis)


def integrate(s):
    """Antiderivative, returned with a_0 = 0 (callers choose the constant)."""
    a = s.padded(len(s) + 2).coeffs
    out = np.zeros(len(s) + 1, dtype=a.dtype)
    if out.dtype == object:
        out[:] = 0 * a[0]
    for n in range(1, len(s) + 1):
        out[n] = (a[n - 1] - a[n + 1]) / (2 * n)
    if s.basis is Basis.SHIFTED:
        out = out / 2
    return ChebSeries(out, s.basis)


def differentiate(s):
    """Exact derivative; the shifted basis picks up the chain-rule factor 2."""
    a = s.coeffs
    n_out = max(len(a) - 1, 1)
    out = np.zeros(n_out + 2, dtype=a.dtype)
    if out.dtype == object:
        out[:] = 0 * a[0]
    for n in range(len(a) - 1, 0, -1):
        out[n - 1] = out[n + 1] + 2 * n * a[n]
    out = out[:n_out]
    if s.basis is Basis.SHIFTED:
        out = out * 2
    return ChebSeries(out, s.basis)


def _binomial_substitute(d, scale, shift):
    """Coefficients of q(u) = p(scale*u + shift) given those of p."""
    d = list(d)
    out = [0 * d[0]] * len(d)
    for n, dn in enumerate(d):
        for m in range(n + 1):
            out[m] = out[m] + dn * math.comb(n, m) * scale**m * shift ** (n - m)
    return np.array(out, dtype=np.asarray(d).dtype)


def from_monomial(p, basis=Basis.STANDARD):
    """Convert a power-basis polynomial to a Chebyshev series."""
    d = p.coeffs
    if Basis(basis) is Basis.SHIFTED:
        # x = (u + 1) / 2 on [0, 1]
        d = _binomial_substitute(d, Fraction(1, 2), Fraction(1, 2)) if d.dtype == object \
            else _binomial_substitute(d, 0.5, 0.5)
    out = np.zeros(len(d), dtype=d.dtype)
    exact = out.dtype == object
    if exact:
        out[:] = 0 * d[0]
    for n, dn in enumerate(d):
        # x^n = 2^(1-n) sum' binom(n, (n-j)/2) T_j, with the j = 0 halving
        # absorbed by the stored-unhalved convention.
        for j in range(n % 2, n + 1, 2):
            scale = Fraction(2) ** (1 - n) if exact else 2.0 ** (1 - n)
            out[j] = out[j] + dn * (math.comb(n, (n - j) // 2) * scale)
    return ChebSeries(out, basis)


def _monomial_matrix(k):
    """Exact rationals M[l][j]: coefficient of x^l in T_j, j, l <= k."""
    m = [[Fraction(0)] * (k + 1) for _ in range(k + 1)]
    m[0][0] = Fraction(1)
    for l in range(k + 1):
        for j in range(max(l, 1), k + 1):
            if (j - l) % 2:
                continue
            half_sum, half_diff = (j + l) // 2, (j - l) // 2
            val = Fraction(2 ** l, 2 * math.factorial(l)) * j
            val *= Fraction(math.factorial(half_sum - 1), math.factorial(half_diff))
            m[l][j] = -val if half_diff % 2 else val
    return m


def to_monomial(s):
    """Convert a Chebyshev series to power-basis coefficients."""
    b = s.unprimed()
    k = len(b) - 1
    m = _monomial_matrix(k)
    zero = 0 * b[0]
    d = []
    for l in range(k + 1):
        acc = zero
        for j in range(l, k + 1):
            if m[l][j]:
                acc = acc + b[j] * (m[l][j] if b.dtype == object else float(m[l][j]))
        d.append(acc)
    d = np.array(d, dtype=b.dtype)
    if s.basis is Basis.SHIFTED:
        # u = 2x - 1
        d = _binomial_substitute(d, 2, -1)
    return MonomialPoly(d)


def divide_by_x(s, anchor_h0):
    """Coefficients of f(x)/x from those of f(x).

    Uses ``h_1 = f_0`` and ``h_n = 2 f_{n-1} - h_{n-2}`` upward from the
    independently known ``h_0 = anchor_h0``.  The result has as many
    coefficients as ``s``.
    """
    f = s.coeffs
    h = np.zeros(len(f), dtype=np.result_type(f, np.asarray(anchor_h0)))
    h[0] = anchor_h0
    if len(f) > 1:
        h[1] = f[0]
    for n in range(2, len(f)):
        h[n] = 2 * f[n - 1] - h[n - 2]
    return ChebSeries(h, s.basis)


def tail_bound(s, from_n):
    """Sum of |a_n| for n >= from_n: the usual truncation error estimate."""
    if from_n < 0 or from_n > len(s):
        raise ContractError(f"from_n={from_n} outside 0..{len(s)}")
    return sum(abs(c) for c in s.coeffs[from_n:]) if from_n < len(s) else 0.0


def chebyshev_points(n, basis=Basis.STANDARD):
    """``n`` Chebyshev points of the first kind in the basis domain."""
    u = np.cos(np.pi * (np.arange(n) + 0.5) / n)
    if Basis(basis) is Basis.SHIFTED:
        return (u + 1) / 2
    return u
