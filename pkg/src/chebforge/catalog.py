"""Built-in Chebyshev expansions of the worked-example functions.

Each generator returns stored coefficients ``f_0..f_{n_max}`` in the primed
convention (``f_0`` unhalved).  Where a printed forward recurrence loses
digits as n grows, the generator runs the equivalent stable tail sum and the
recurrence is kept only as a consistency check in the tests.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import special as sp

from . import special
from .core import Basis, ChebSeries
from .errors import ContractError, UnknownFunctionError

__all__ = ["CatalogEntry", "catalog", "catalog_entry", "catalog_names", "EULER_GAMMA"]

EULER_GAMMA = 0.5772156649015328606065121
SQRT2 = math.sqrt(2.0)
SILVER = 1.0 + SQRT2
_PAD = 60
_BLOCK = 64


@dataclass(frozen=True)
class CatalogEntry:
    """A named expansion with its generator and the target function itself."""

    name: str
    basis: Basis
    generator: Callable[[int], np.ndarray] = field(repr=False)
    function: Callable = field(repr=False)
    anchor_constants: dict = field(default_factory=dict)
    parity: Optional[str] = None
    description: str = ""

    def series(self, n_max):
        if n_max < 0:
            raise ContractError(f"n_max must be >= 0, got {n_max}")
        # Generators run on whole blocks so that a shorter request returns an
        # exact prefix of a longer one.
        work = _BLOCK * (n_max // _BLOCK + 1) - 1
        coeffs = np.asarray(self.generator(work), dtype=float)[: n_max + 1].copy()
        if self.parity == "even":
            coeffs[1::2] = 0.0
        elif self.parity == "odd":
            coeffs[0::2] = 0.0
        return ChebSeries(coeffs, self.basis)


def _even_only(values):
    out = np.array(values, dtype=float)
    out[1::2] = 0.0
    return out


def _sinc_pi2(n_max):
    top = n_max + 2
    j = special.bessel_j_sequence(top + _PAD, math.pi / 2)
    odd = j[1::2]
    tails = np.cumsum(odd[::-1])[::-1]
    out = np.zeros(n_max + 1)
    for n in range(0, n_max + 1, 2):
        out[n] = 4 * (-1) ** (n // 2) * tails[n // 2]
    return out


def _cos_pi2_raw(n_max):
    j = special.bessel_j_sequence(n_max, math.pi / 2)
    signs = np.array([(-1) ** (n // 2) for n in range(n_max + 1)], dtype=float)
    return _even_only(2 * signs * j)


def _cos_pi2(n_max):
    return _cos_pi2_raw(n_max)


def _cos_pi2_lifted(n_max):
    # f_n = -2 sum_{j >= n+2, j even} (j - n) g_j: the decaying solution of
    # f_{n+2} - 2 f_n + f_{n-2} = -4 g_n.
    g = _cos_pi2_raw(n_max + _PAD)
    out = np.zeros(n_max + 1)
    for n in range(0, n_max + 1, 2):
        js = np.arange(n + 2, len(g), 2)
        out[n] = -2 * math.fsum((js - n) * g[js])
    return out


def _exp_std(n_max):
    return 2 * special.bessel_i_sequence(n_max, 1.0)


def _exp_shifted(n_max):
    return 2 * math.sqrt(math.e) * special.bessel_i_sequence(n_max, 0.5)


def _j0_pi2(n_max):
    j = special.bessel_j_sequence(n_max // 2, math.pi / 4)
    out = np.zeros(n_max + 1)
    for n in range(0, n_max + 1, 2):
        out[n] = 2 * (-1) ** (n // 2) * j[n // 2] ** 2
    return out


LOG1P_F0 = 2 * math.log((3 + 2 * SQRT2) / 4)


def _log1p_shifted(n_max):
    out = np.zeros(n_max + 1)
    out[0] = LOG1P_F0
    q = 3 + 2 * SQRT2
    for n in range(1, n_max + 1):
        out[n] = 2 * (-1) ** (n + 1) / (n * q**n)
    return out


def _atan(n_max):
    out = np.zeros(n_max + 1)
    for j in range(1, n_max + 1, 2):
        out[j] = 2 * (-1) ** (j // 2) / (j * SILVER**j)
    return out


ATAN_OVER_X_G0 = 2 * math.log(SILVER)


def _atan_over_x(n_max):
    # g_n = 2 sum_j (-1)^j f_{n+1+2j} from 2 f_{n-1} = g_{n-2} + g_n; every
    # summand has the same sign, so the tail sum is free of cancellation.
    out = np.zeros(n_max + 1)
    out[0] = ATAN_OVER_X_G0
    for n in range(2, n_max + 1, 2):
        js = np.arange(n + 1, n + 1 + 2 * _PAD, 2, dtype=float)
        out[n] = 4 * (-1) ** (n // 2) * math.fsum(1.0 / (js * SILVER**js))
    return out


def _asin(n_max):
    out = np.zeros(n_max + 1)
    for n in range(1, n_max + 1, 2):
        out[n] = 4 / (math.pi * n * n)
    return out


ASIN_OVER_X_H0 = 8 * special.CATALAN / math.pi


def _asin_over_x(n_max):
    out = np.zeros(n_max + 1)
    out[0] = ASIN_OVER_X_H0
    for n in range(0, n_max - 1, 2):
        out[n + 2] = -out[n] + 8 / (math.pi * (n + 1) ** 2)
    return out


def asin_sqrt2_k(n_max):
    """Coefficients ``k_n`` of arcsin(x/sqrt2) (odd n) from the moments G_s."""
    g = special.elliptic_G(n_max + 2)
    out = np.zeros(n_max + 1)
    for n in range(1, n_max + 1, 2):
        out[n] = (g[n - 1] - g[n + 1]) / (n * math.pi)
    return out


def asin_sqrt2_f0(terms=40):
    """``f_0 = pi/2 - (4/pi) sum_q (G_{4q-2} - G_{4q}) / (4q - 1)``."""
    g = special.elliptic_G(4 * terms)
    parts = [(g[4 * q - 2] - g[4 * q]) / (4 * q - 1) for q in range(1, terms + 1)]
    return math.pi / 2 - 4 / math.pi * math.fsum(parts)


def _asin_sqrt2_over_x(n_max):
    # f_n = 2 sum_j (-1)^j k_{n+1+2j}, the decaying form of f_n = 2 k_{n-1} - f_{n-2}.
    k = asin_sqrt2_k(n_max + 2 * _PAD + 1)
    out = np.zeros(n_max + 1)
    out[0] = asin_sqrt2_f0()
    for n in range(2, n_max + 1, 2):
        idx = np.arange(n + 1, len(k), 2)
        signs = (-1.0) ** np.arange(len(idx))
        out[n] = 2 * math.fsum(signs * k[idx])
    return out


def _digamma_plus2(n_max):
    kk = special.digamma_K(n_max + 1)
    out = np.zeros(n_max + 1)
    out[0] = 2 * (1 - EULER_GAMMA - kk[1])
    for n in range(1, n_max + 1):
        out[n] = -((-1) ** n) * (kk[n - 1] + kk[n + 1])
    return out


TANH_POLES = 10**6


def _tanh_pi2_over_x(n_max, poles=TANH_POLES):
    # Poles of tanh(pi x/2)/x at x = +-i y, y = 2m - 1, each with residue 2/(pi y);
    # the pair contributes (8/pi) (-1)^(n/2) / (y sqrt(y^2+1) rho^n), rho = y + sqrt(y^2+1).
    y = 2.0 * np.arange(1, poles + 1) - 1.0
    root = np.sqrt(y * y + 1.0)
    base = 8 / math.pi / (y * root)
    log_rho = np.log(y + root)
    out = np.zeros(n_max + 1)
    y_end = 2.0 * poles
    for n in range(0, n_max + 1, 2):
        # beyond m ~ 10^(20/(n+1)) the summands fall below 1e-20 relative
        count = poles if n == 0 else min(poles, int(10 ** (20 / (n + 1))) + 10)
        terms = base[:count] * np.exp(-n * log_rho[:count])
        if n == 0:
            tail = 4 / math.pi * math.asinh(1 / y_end)
        else:
            tail = 4 / math.pi * 2 / (n + 1) * (2 * y_end) ** -(n + 1)
        out[n] = (-1) ** (n // 2) * (math.fsum(terms[::-1]) + tail)
    return out


def _at_zero(fn, limit):
    def wrapped(x):
        x = np.asarray(x, dtype=float)
        safe = np.where(x == 0, 1.0, x)
        return np.where(x == 0, limit, fn(safe))

    return wrapped


def _cos_lifted_value(x):
    x = np.abs(np.asarray(x, dtype=float))
    return (math.pi / 2) * np.sinc((1 - x) / 2) / (1 + x)


_ENTRIES = [
    CatalogEntry("sinc_pi2", Basis.STANDARD, _sinc_pi2,
                 lambda x: (math.pi / 2) * np.sinc(np.asarray(x, dtype=float) / 2),
                 {}, "even", "sin(pi x/2)/x on [-1, 1]"),
    CatalogEntry("cos_pi2", Basis.STANDARD, _cos_pi2,
                 lambda x: np.cos(math.pi / 2 * np.asarray(x, dtype=float)),
                 {}, "even", "cos(pi x/2) on [-1, 1]"),
    CatalogEntry("cos_pi2_lifted", Basis.STANDARD, _cos_pi2_lifted, _cos_lifted_value,
                 {"f0": (math.pi * special.bessel_j(1, math.pi / 2), "pi J_1(pi/2)")},
                 "even", "cos(pi x/2)/(1 - x^2) on [-1, 1]"),
    CatalogEntry("exp_std", Basis.STANDARD, _exp_std, np.exp, {}, None, "exp(x) on [-1, 1]"),
    CatalogEntry("exp_shifted", Basis.SHIFTED, _exp_shifted, np.exp, {}, None,
                 "exp(x) on [0, 1]"),
    CatalogEntry("j0_pi2", Basis.STANDARD, _j0_pi2,
                 lambda x: sp.j0(math.pi / 2 * np.asarray(x, dtype=float)),
                 {}, "even", "J_0(pi x/2) on [-1, 1]"),
    CatalogEntry("log1p_shifted", Basis.SHIFTED, _log1p_shifted, np.log1p,
                 {"f0": (LOG1P_F0, "2 ln((3 + 2 sqrt2)/4)")}, None, "ln(1 + x) on [0, 1]"),
    CatalogEntry("atan", Basis.STANDARD, _atan, np.arctan, {}, "odd", "arctan(x) on [-1, 1]"),
    CatalogEntry("atan_over_x", Basis.STANDARD, _atan_over_x,
                 _at_zero(lambda x: np.arctan(x) / x, 1.0),
                 {"g0": (ATAN_OVER_X_G0, "2 ln(1 + sqrt2)")}, "even",
                 "arctan(x)/x on [-1, 1]"),
    CatalogEntry("asin", Basis.STANDARD, _asin, np.arcsin, {}, "odd", "arcsin(x) on [-1, 1]"),
    CatalogEntry("asin_over_x", Basis.STANDARD, _asin_over_x,
                 _at_zero(lambda x: np.arcsin(x) / x, 1.0),
                 {"h0": (ASIN_OVER_X_H0, "8 beta(2)/pi, Catalan's constant beta(2)")},
                 "even", "arcsin(x)/x on [-1, 1]"),
    CatalogEntry("asin_sqrt2_over_x", Basis.STANDARD, _asin_sqrt2_over_x,
                 _at_zero(lambda x: np.arcsin(x / SQRT2) / x, 1 / SQRT2),
                 {"f0": (asin_sqrt2_f0(), "pi/2 minus a series in the moments G_s")},
                 "even", "arcsin(x/sqrt2)/x on [-1, 1]"),
    CatalogEntry("digamma_plus2", Basis.STANDARD, _digamma_plus2,
                 lambda x: sp.psi(np.asarray(x, dtype=float) + 2),
                 {"gamma": (EULER_GAMMA, "Euler's constant")}, None, "psi(x + 2) on [-1, 1]"),
    CatalogEntry("tanh_pi2_over_x", Basis.STANDARD, _tanh_pi2_over_x,
                 _at_zero(lambda x: np.tanh(math.pi / 2 * x) / x, math.pi / 2),
                 {}, "even", "tanh(pi x/2)/x on [-1, 1], from its pole sum"),
]

_REGISTRY = {e.name: e for e in _ENTRIES}


def catalog_names():
    return tuple(_REGISTRY)


def catalog_entry(name):
    try:
        return _REGISTRY[name]
    except KeyError:
        raise UnknownFunctionError(
            f"unknown catalog function {name!r}; known: {', '.join(_REGISTRY)}"
        ) from None


def catalog(name, n_max):
    """Coefficients ``f_0..f_{n_max}`` of the named expansion."""
    return catalog_entry(name).series(n_max)
