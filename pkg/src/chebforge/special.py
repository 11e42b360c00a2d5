"""Special-function helpers behind the catalog expansions.

Everything here runs in double precision and favours the numerically
stable direction of each recurrence: Bessel sequences by Miller's backward
recurrence, the elliptic moments ``G_s`` by backward recurrence normalized
to an AGM value, and the digamma sums ``K_n`` through positive zeta series.
"""

import math
from fractions import Fraction

import numpy as np
from scipy import integrate, special

from .errors import ContractError

__all__ = [
    "CATALAN",
    "bessel_j",
    "bessel_i",
    "bessel_j_sequence",
    "bessel_i_sequence",
    "elliptic_KE",
    "elliptic_G",
    "elliptic_G_exact",
    "alpha_table",
    "zeta_minus_one",
    "digamma_K",
    "digamma_K_pair_sums",
    "appendixE_identities",
    "appendixE_terms",
]

CATALAN = 0.915965594177219015054603515
BESSEL_MAX_X = 4.0
_BIG = 1e250
MILLER_MIN_START = 256


def _miller_start(n_max, x):
    # A fixed minimum start keeps shorter sequences exact prefixes of longer ones.
    m = max(int(max(n_max, abs(x))) + 40, MILLER_MIN_START)
    return m + (m % 2)


def bessel_j_sequence(n_max, x):
    """``J_0(x) .. J_{n_max}(x)`` by Miller's backward recurrence.

    Normalized with ``J_0 + 2 sum_m J_{2m} = 1``; valid for ``|x| <= 4``.
    """
    _check_bessel(n_max, x)
    out = np.zeros(n_max + 1)
    if x == 0:
        out[0] = 1.0
        return out
    ax = abs(x)
    top = _miller_start(n_max, ax)
    vals = np.zeros(top + 2)
    vals[top] = 1e-300
    for n in range(top, 0, -1):
        vals[n - 1] = 2 * n / ax * vals[n] - vals[n + 1]
        if abs(vals[n - 1]) > _BIG:
            vals[n - 1 :] /= _BIG
    norm = vals[0] + 2 * math.fsum(vals[2 : top + 1 : 2])
    out[:] = vals[: n_max + 1] / norm
    if x < 0:
        out[1::2] *= -1
    return out


def bessel_i_sequence(n_max, x):
    """``I_0(x) .. I_{n_max}(x)`` by Miller's backward recurrence.

    Normalized with ``I_0 + 2 sum_m I_m = exp(x)``; valid for ``|x| <= 4``.
    """
    _check_bessel(n_max, x)
    out = np.zeros(n_max + 1)
    if x == 0:
        out[0] = 1.0
        return out
    ax = abs(x)
    top = _miller_start(n_max, ax)
    vals = np.zeros(top + 2)
    vals[top] = 1e-300
    for n in range(top, 0, -1):
        vals[n - 1] = 2 * n / ax * vals[n] + vals[n + 1]
        if vals[n - 1] > _BIG:
            vals[n - 1 :] /= _BIG
    norm = (vals[0] + 2 * math.fsum(vals[1 : top + 1])) / math.exp(ax)
    out[:] = vals[: n_max + 1] / norm
    if x < 0:
        out[1::2] *= -1
    return out


def _check_bessel(n, x):
    if n < 0:
        raise ContractError(f"Bessel order must be >= 0, got {n}")
    if not abs(x) <= BESSEL_MAX_X:
        raise ContractError(f"Bessel argument {x!r} outside |x| <= {BESSEL_MAX_X:g}")


def bessel_j(n, x):
    return float(bessel_j_sequence(n, x)[n])


def bessel_i(n, x):
    return float(bessel_i_sequence(n, x)[n])


def elliptic_KE(k):
    """Complete elliptic integrals K(k), E(k) of modulus k by the AGM."""
    if not 0 <= k < 1:
        raise ContractError(f"modulus must lie in [0, 1), got {k!r}")
    a, b, c = 1.0, math.sqrt(1 - k * k), k
    total, power = c * c / 2, 0.5
    for _ in range(64):
        a, b, c = (a + b) / 2, math.sqrt(a * b), (a - b) / 2
        power *= 2
        total += power * c * c
        if abs(c) <= 1e-10 * a:
            break
    kk = math.pi / (2 * a)
    return kk, kk * (1 - total)


def _legendre_ratio_backward(m_max, extra=60):
    """Minimal solution of (m+1/2) I_{m+1} = 6m I_m - (m-1/2) I_{m-1}, unnormalized."""
    top = max(m_max + extra, MILLER_MIN_START)
    vals = np.zeros(top + 2)
    vals[top] = 1e-300
    for m in range(top, 0, -1):
        vals[m - 1] = (6 * m * vals[m] - (m + 0.5) * vals[m + 1]) / (m - 0.5)
        if abs(vals[m - 1]) > _BIG:
            vals[m - 1 :] /= _BIG
    return vals[: m_max + 1]


def elliptic_G(s_max):
    """``G_s = int T_s(x) / sqrt((2-x^2)(1-x^2)) dx`` over [-1, 1], s = 0..s_max.

    Odd entries vanish.  Writing ``G_{2m} = sqrt(2) I_m``, the ``I_m`` obey a
    three-term recurrence whose wanted solution decays like ``(3-2sqrt2)^m``;
    it is run backward and scaled to ``G_0 = sqrt(2) K(1/sqrt2)``.
    """
    if s_max < 0:
        raise ContractError(f"s_max must be >= 0, got {s_max}")
    kk, _ = elliptic_KE(1 / math.sqrt(2))
    g0 = math.sqrt(2) * kk
    vals = _legendre_ratio_backward(s_max // 2)
    out = np.zeros(s_max + 1)
    out[0::2] = g0 * vals / vals[0]
    return out


def elliptic_G_exact(m_max):
    """Rational pairs (p_m, q_m) with ``G_{2m} = sqrt(2) (p_m K + q_m E)``."""
    p = [Fraction(1), Fraction(3)]
    q = [Fraction(0), Fraction(-4)]
    for m in range(1, m_max):
        half = Fraction(1, 2)
        p.append((6 * m * p[m] - (m - half) * p[m - 1]) / (m + half))
        q.append((6 * m * q[m] - (m - half) * q[m - 1]) / (m + half))
    return list(zip(p[: m_max + 1], q[: m_max + 1]))


def alpha_table(n_max):
    """Exact ``(alpha_1, alpha_2, alpha_3, alpha_4)`` for even n = 2..n_max.

    With ``c = sqrt(2)/pi``: ``k_{n-1} = c (alpha_1 K + alpha_2 E)`` and
    ``f_n = c (alpha_3 K + alpha_4 E) + (-1)^(n/2) f_0`` at modulus 1/sqrt2.
    """
    pq = elliptic_G_exact(n_max // 2)
    rows = {}
    prev3 = prev4 = Fraction(0)
    for n in range(2, n_max + 1, 2):
        (p_lo, q_lo), (p_hi, q_hi) = pq[n // 2 - 1], pq[n // 2]
        a1 = (p_lo - p_hi) / (n - 1)
        a2 = (q_lo - q_hi) / (n - 1)
        a3 = 2 * a1 - prev3
        a4 = 2 * a2 - prev4
        rows[n] = (a1, a2, a3, a4)
        prev3, prev4 = a3, a4
    return rows


def zeta_minus_one(m):
    """``zeta(m) - 1`` without cancellation (scipy's ``zetac``)."""
    return special.zetac(m)


def _half_power_coeffs(count):
    """Taylor coefficients of 1 + sqrt(1 - t)."""
    c = np.zeros(count)
    c[0] = 2.0
    for j in range(1, count):
        # binom(1/2, j) (-1)^j
        c[j] = float(special.binom(0.5, j)) * (-1) ** j
    return c


def _power_series_pow(a, alpha, count):
    """Taylor coefficients of A(t)^alpha from those of A (A_0 != 0)."""
    out = np.zeros(count)
    out[0] = a[0] ** alpha
    for m in range(1, count):
        acc = 0.0
        for j in range(1, m + 1):
            acc += ((alpha + 1) * j - m) * a[j] * out[m - j]
        out[m] = acc / (m * a[0])
    return out


def digamma_K(n_max, terms=80):
    """``K_n = sum_{k>=2} 1/(k sqrt(k^2-1) (k+sqrt(k^2-1))^n)`` for n = 0..n_max.

    With ``t = 1/k^2`` each summand is ``k^-(n+2) (1-t)^(-1/2) (1+sqrt(1-t))^(-n)``;
    expanding in t gives ``K_n = sum_j g_j(n) (zeta(n+2+2j) - 1)`` with all
    ``g_j(n) > 0``, so there is no cancellation at any n.
    """
    if n_max < 0:
        raise ContractError(f"n_max must be >= 0, got {n_max}")
    base = _half_power_coeffs(terms)
    inv_sqrt = np.array([float(special.binom(2 * j, j)) / 4.0**j for j in range(terms)])
    out = np.zeros(n_max + 1)
    for n in range(n_max + 1):
        g = np.convolve(inv_sqrt, _power_series_pow(base, -n, terms))[:terms]
        z = zeta_minus_one(n + 2 + 2 * np.arange(terms))
        out[n] = math.fsum(g * z)
    return out


def _gen_binom(a, l):
    """Generalized binomial coefficient binom(a, l) for rational a."""
    out = Fraction(1)
    for i in range(l):
        out = out * (a - i) / (i + 1)
    return out


def digamma_K_pair_sums(n_max, terms=120):
    """``K_n + K_{n+2}`` from the alternating binomial-zeta series, n = 0..n_max.

    The inner binomial sums are exact rationals; the outer series alternates
    with growing cancellation, so this is a cross-check for small n only.
    """
    out = np.zeros(n_max + 1)
    for n in range(n_max + 1):
        lo = (n + 3) // 2
        acc = []
        for l in range(lo, lo + terms):
            inner = sum(math.comb(n + 1, s) * _gen_binom(Fraction(s - 1, 2), l)
                        for s in range(n + 2))
            acc.append((-1) ** l * float(inner) * zeta_minus_one(2 * l - n))
        out[n] = 2 * math.fsum(acc)
    return out


def _root(k):
    return np.sqrt((k - 1.0) * (k + 1.0))


def appendixE_terms():
    """Summands (as vectorized callables of k >= 2) of the five identities."""

    def s_half(k):
        r = _root(k)
        return (k - 1 + r) / ((k + 1 + r) * k * r)

    def s_one(k):
        r = _root(k)
        return (k + 1 + r) / ((k - 1 + r) * k * r)

    def s_zero(k):
        r = _root(k)
        w = k + r
        return (k - 3) * w / (k * r * (w * w - 1))

    def s_eighth(k):
        r = _root(k)
        w = k + r
        return w / (k * r * (w * w - 1))

    def s_three_eighths(k):
        r = _root(k)
        w = k + r
        return w / (r * (w * w - 1))

    return {
        "half": (s_half, 0.5),
        "one": (s_one, 1.0),
        "zero": (s_zero, 0.0),
        "eighth": (s_eighth, 0.125),
        "three_eighths": (s_three_eighths, 0.375),
    }


def _sum_with_tail(term, cutoff=4000):
    """Direct sum over k = 2..cutoff-1 plus an Euler-Maclaurin tail from cutoff."""
    ks = np.arange(2, cutoff, dtype=float)
    head = math.fsum(term(ks))
    integral, _ = integrate.quad(lambda x: float(term(np.array([x]))[0]), cutoff, np.inf,
                                 epsabs=0.0, epsrel=1e-13, limit=200)
    h = 0.5
    m = float(cutoff)
    deriv = (term(np.array([m + h]))[0] - term(np.array([m - h]))[0]) / (2 * h)
    tail = integral + term(np.array([m]))[0] / 2 - deriv / 12
    return head + tail


def appendixE_identities(cutoff=4000):
    """Evaluate the sums equal to 1/2, 1, 1/8 and 3/8 (in that order)."""
    terms = appendixE_terms()
    return tuple(_sum_with_tail(terms[key][0], cutoff)
                 for key in ("half", "one", "eighth", "three_eighths"))
