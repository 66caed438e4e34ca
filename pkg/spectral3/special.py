# Copyright 2026 The Spectral3 Authors
#
# Licensed under the Apache License, Version 2.0 (the "License"); you may
# not use this file except in compliance with the License. You may obtain
# a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
# WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
# License for the specific language governing permissions and limitations
# under the License.

"""Complex Gamma, zeta, xi, Hurwitz zeta and K-Bessel of complex order.

All functions accept scalars or numpy arrays.  Scalars come back as
Python complex (float for k_bessel_it).
"""

import dataclasses
import functools
import logging
import math

import numpy as np
import sympy

from spectral3.errors import PoleError, PreconditionError, RangeError

log = logging.getLogger('spectral3.special')

LOG_2PI = math.log(2 * math.pi)
LOG_PI = math.log(math.pi)
STIRLING_MIN_ABS = 10.0
STIRLING_TERMS = 10
ZETA_MIN_TERMS = 20
EULER_MACLAURIN_ORDER = 12
STIRLING_MIN_T = 10.0


@functools.lru_cache(maxsize=None)
def bernoulli(n):
    return float(sympy.bernoulli(n))


@functools.lru_cache(maxsize=None)
def bernoulli_poly_coeffs(n):
    x = sympy.Symbol('x')
    return tuple(float(c) for c in sympy.Poly(sympy.bernoulli(n, x), x).all_coeffs())


def bernoulli_poly(n, x):
    return np.polyval(bernoulli_poly_coeffs(n), x)


@functools.lru_cache(maxsize=None)
def _em_coefficients(order):
    return tuple(bernoulli(2 * k) / math.factorial(2 * k) for k in range(1, order + 1))


def _as_complex(z):
    arr = np.asarray(z, dtype=complex)
    return arr, arr.ndim == 0


def _restore(arr, scalar):
    if scalar:
        return complex(arr.reshape(()))
    return arr


def _nonpositive_integers(z):
    return (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))


def log_gamma(z):
    """Principal branch of log Gamma.

    Shifts upward until Re z >= 10, then sums the Stirling series.
    """
    z, scalar = _as_complex(z)
    bad = _nonpositive_integers(z)
    if bad.any():
        point = int(np.atleast_1d(z)[np.atleast_1d(bad)][0].real)
        raise PoleError(point, 'log_gamma pole at %s' % (point,))
    z = np.atleast_1d(z)
    shifts = np.maximum(0, np.ceil(STIRLING_MIN_ABS - z.real)).astype(int)
    correction = np.zeros_like(z)
    w = z.copy()
    for k in range(int(shifts.max()) if shifts.size else 0):
        active = shifts > k
        correction[active] += np.log(w[active])
        w[active] += 1
    result = (w - 0.5) * np.log(w) - w + 0.5 * LOG_2PI
    inv = 1.0 / w
    inv2 = inv * inv
    power = inv
    for k in range(1, STIRLING_TERMS + 1):
        result += bernoulli(2 * k) / (2 * k * (2 * k - 1)) * power
        power = power * inv2
    result = result - correction
    if scalar:
        return complex(result[0])
    return result


def gamma(z):
    z, scalar = _as_complex(z)
    return _restore(np.exp(log_gamma(z)), scalar)


def log_sin(w):
    """log sin(w) up to a multiple of 2 pi i, without overflow for large Im w."""
    w = np.asarray(w, dtype=complex)
    upper = w.imag >= 0
    with np.errstate(divide='ignore'):
        up = -1j * w + np.log((np.exp(2j * w) - 1) / 2j)
        down = 1j * w + np.log((1 - np.exp(-2j * w)) / 2j)
    return np.where(upper, up, down)


def _zeta_euler_maclaurin(s, shift=None):
    """Sum_{n>=0} (n + q)^(-s) for q = shift (default 1) by Euler-Maclaurin."""
    q = 1.0 if shift is None else shift
    terms = np.maximum(ZETA_MIN_TERMS, np.ceil(2 * np.abs(s.imag))).astype(int)
    n_max = int(terms.max())
    total = np.zeros_like(s)
    for n in range(n_max):
        active = n < terms
        total[active] += (n + q) ** (-s[active])
    big = terms + q
    total += big ** (1 - s) / (s - 1) + 0.5 * big ** (-s)
    fact = s * big ** (-s - 1)
    for k, coeff in enumerate(_em_coefficients(EULER_MACLAURIN_ORDER), start=1):
        if k > 1:
            fact = fact * (s + 2 * k - 3) * (s + 2 * k - 2) / (big * big)
        total += coeff * fact
    return total


def zeta(s):
    s, scalar = _as_complex(s)
    s = np.atleast_1d(s)
    if np.any(s == 1):
        raise PoleError(1, 'zeta pole at s=1')
    result = np.empty_like(s)
    left = s.real < 0
    right = ~left
    if right.any():
        result[right] = _zeta_euler_maclaurin(s[right])
    if left.any():
        sl = s[left]
        logfac = (sl * math.log(2) + (sl - 1) * LOG_PI + log_sin(np.pi * sl / 2)
                  + log_gamma(1 - sl))
        result[left] = np.exp(logfac) * _zeta_euler_maclaurin(1 - sl)
    if scalar:
        return complex(result[0])
    return result


def _check_xi_poles(s):
    if np.any((s == 0) | (s == 1)):
        point = 0 if np.any(s == 0) else 1
        raise PoleError(point, 'xi pole at s=%s' % (point,))


def log_xi(s):
    """log xi(s) = -(s/2) log pi + log Gamma(s/2) + log zeta(s), any branch."""
    s, scalar = _as_complex(s)
    s = np.atleast_1d(s)
    _check_xi_poles(s)
    with np.errstate(divide='ignore'):
        result = -0.5 * s * LOG_PI + log_gamma(s / 2) + np.log(zeta(s))
    if scalar:
        return complex(result[0])
    return result


def xi(s):
    """Completed Riemann zeta function."""
    s, scalar = _as_complex(s)
    s = np.atleast_1d(s)
    _check_xi_poles(s)
    result = np.exp(-0.5 * s * LOG_PI + log_gamma(s / 2)) * zeta(s)
    if scalar:
        return complex(result[0])
    return result


def inv_xi(s):
    """1/xi(s), extended by zero at the poles s = 0, 1."""
    s, scalar = _as_complex(s)
    s = np.atleast_1d(s)
    poles = (s == 0) | (s == 1)
    result = np.zeros_like(s)
    if (~poles).any():
        result[~poles] = 1.0 / xi(s[~poles])
    if scalar:
        return complex(result[0])
    return result


def hurwitz_zeta(s, a, c):
    """Sum over n = a mod c, n >= 1, of n^(-s), continued to s != 1."""
    if not 1 <= a <= c:
        raise PreconditionError('hurwitz_zeta needs 1 <= a <= c, got a=%s c=%s' % (a, c))
    s, scalar = _as_complex(s)
    s = np.atleast_1d(s)
    if np.any(s == 1):
        raise PoleError(1, 'hurwitz_zeta pole at s=1')
    result = c ** (-s) * _zeta_euler_maclaurin(s, shift=a / c)
    if scalar:
        return complex(result[0])
    return result


def k_bessel(nu, y):
    """K_nu(y) for complex order nu and y > 0.

    The representation (1/2) * integral over R of exp(-y cosh w + nu w) is
    moved to the line Im w = theta near the saddle, where the integrand no
    longer cancels, and summed with the trapezoid rule (exponentially
    convergent for this entire, doubly-exponentially decaying integrand).
    """
    if y <= 0:
        raise PreconditionError('k_bessel needs y > 0, got %s' % (y,))
    nu = complex(nu)
    if nu.imag < 0:
        # K_nu = K_{-nu}
        nu = -nu
    sigma = abs(nu.real)
    t = nu.imag
    y = float(y)
    delta = max(1.0 / (1.0 + t), 0.05)
    theta = min(math.asin(min(t / y, 1.0)), math.pi / 2 - delta)
    ct = math.cos(theta)
    peak = math.asinh(sigma / (y * ct))
    half_width = max(math.acosh(1.0 + 45.0 / (y * ct)), peak + 0.5)
    while (y * ct * (math.cosh(half_width) - math.cosh(peak))
           - sigma * (half_width - peak)) < 45.0:
        half_width += 0.5
    fmax = t + y * math.cosh(half_width) * math.sin(theta) + 1.0
    h = min(0.25, math.pi / fmax)
    shift = 1j * theta

    def trapezoid(step):
        n = int(math.ceil(half_width / step))
        u = np.arange(-n, n + 1) * step + shift
        vals = np.exp(-y * np.cosh(u) + nu * u)
        return 0.5 * step * complex(vals.sum()), 0.5 * step * np.abs(vals).sum()

    prev, scale = trapezoid(h)
    for _ in range(12):
        h /= 2
        cur, scale = trapezoid(h)
        if abs(cur - prev) <= 1e-13 * scale:
            return cur
        prev = cur
    log.debug('k_bessel(%s, %s) stopped at step %s' % (nu, y, h))
    return cur


def k_bessel_it(t, y):
    """K_{it}(y) for real t and y > 0, as a float."""
    if y <= 0:
        raise PreconditionError('k_bessel_it needs y > 0, got %s' % (y,))
    return k_bessel(1j * float(t), y).real


@dataclasses.dataclass(frozen=True)
class StirlingExpansion(object):
    """Stirling form of Gamma(sigma + it) with J - 1 correction terms.

    The remainder after truncation is O(|t|^-J).
    """
    sigma: float
    J: int

    def __post_init__(self):
        if self.J < 1:
            raise PreconditionError('Stirling order must be >= 1, got %s' % (self.J,))

    @property
    def coefficients(self):
        # Coefficient of (it)^-(n-1) in log Gamma(sigma + it), n = 2..J.
        return tuple((-1) ** n * bernoulli_poly(n, self.sigma) / (n * (n - 1))
                     for n in range(2, self.J + 1))

    def _check(self, t):
        if abs(t) < STIRLING_MIN_T:
            raise RangeError('Stirling expansion needs |t| >= %s, got %s' % (
                STIRLING_MIN_T, t))

    def correction(self, t):
        self._check(t)
        z = 1j * t
        return sum(c * z ** (-(n + 1)) for n, c in enumerate(self.coefficients))

    def log_gamma(self, t):
        self._check(t)
        z = 1j * t
        logz = math.log(abs(t)) + 0.5j * math.pi * math.copysign(1.0, t)
        return (self.sigma + z - 0.5) * logz - z + 0.5 * LOG_2PI + self.correction(t)

    def gamma(self, t):
        return complex(np.exp(self.log_gamma(t)))

    def error(self, t):
        # Size of the first omitted terms.
        sizes = [abs(bernoulli_poly(n, self.sigma) / (n * (n - 1))) * abs(t) ** (1 - n)
                 for n in (self.J + 1, self.J + 2)]
        return max(sizes)


def stirling_ratio(sigma_num, sigma_den, t, J):
    """Gamma(sigma_num + it) / Gamma(sigma_den + it) and an error estimate."""
    if abs(t) < STIRLING_MIN_T:
        raise RangeError('stirling_ratio needs |t| >= %s, got %s' % (STIRLING_MIN_T, t))
    num = StirlingExpansion(sigma_num, J)
    den = StirlingExpansion(sigma_den, J)
    value = complex(np.exp(num.log_gamma(t) - den.log_gamma(t)))
    error = abs(value) * (num.error(t) + den.error(t))
    return value, error
