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

"""Smooth windows W(x) = w(log(x/N)) and their Mellin transforms.

Shapes are written in the logarithmic variable v = log(x/N):

  gauss   exp(-v^2 / (2 sigma^2))
  cos     exp(-v^2 / (2 sigma^2)) cos(kappa v)
  bump    exp(1 - 1/(1 - (v/sigma)^2)) on |v| < sigma
  dyadic  rho(v/log 2) - rho(v/log 2 + 1), a Littlewood-Paley piece on [N/2, 2N]
  cutoff  rho(v/log 2), equal to 1 for x <= N and 0 for x >= 2N

where rho is the smooth step from 1 (u <= 0) to 0 (u >= 1).  A window may
carry the oscillation e(u x / (Y T)).
"""

import dataclasses
import functools
import logging
import math

import numpy as np
import sympy

from spectral3.errors import AccuracyError, PreconditionError

log = logging.getLogger('spectral3.windows')

SHAPES = ('gauss', 'cos', 'bump', 'dyadic', 'cutoff')
LOG2 = math.log(2.0)
# exp(-v^2/2) < 1e-18 beyond |v| = GAUSS_REACH.
GAUSS_REACH = 9.1
MELLIN_TOL = 1e-12
MELLIN_MAX_NODES = 2 ** 17
MELLIN_BLOCK = 2 ** 22


def _smooth_step(u):
    """1 for u <= 0, 0 for u >= 1, C-infinity in between."""
    u = np.asarray(u, dtype=float)
    a = np.clip(1.0 - u, 0.0, None)
    b = np.clip(u, 0.0, None)
    with np.errstate(divide='ignore', over='ignore'):
        fa = np.where(a > 0, np.exp(-1.0 / np.where(a > 0, a, 1.0)), 0.0)
        fb = np.where(b > 0, np.exp(-1.0 / np.where(b > 0, b, 1.0)), 0.0)
    return fa / (fa + fb)


def _symbolic_step(u):
    f = lambda z: sympy.exp(-1 / z)
    return f(1 - u) / (f(1 - u) + f(u))


@dataclasses.dataclass(frozen=True)
class SmoothWindow(object):
    shape: str
    scale: float
    sigma: float = 0.5
    kappa: float = 2.0
    u: float = 0.0
    Y: float = 1.0
    T: float = 1.0

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise PreconditionError('Unknown window shape %s' % (self.shape,))
        if self.scale <= 0 or self.sigma <= 0:
            raise PreconditionError('Window scale and width must be positive')
        if self.Y <= 0 or self.T <= 0:
            raise PreconditionError('Oscillation parameters Y, T must be positive')

    @property
    def oscillating(self):
        return self.u != 0

    def withOscillation(self, u, Y, T):
        return dataclasses.replace(self, u=u, Y=Y, T=T)

    def withScale(self, scale):
        return dataclasses.replace(self, scale=scale)

    def logSupport(self):
        """Interval of v = log(x/N) outside which the profile vanishes (or is < 1e-18)."""
        if self.shape in ('gauss', 'cos'):
            return (-GAUSS_REACH * self.sigma, GAUSS_REACH * self.sigma)
        if self.shape == 'bump':
            return (-self.sigma, self.sigma)
        if self.shape == 'dyadic':
            return (-LOG2, LOG2)
        return (-math.inf, LOG2)

    def support(self):
        lo, hi = self.logSupport()
        return (self.scale * math.exp(lo), self.scale * math.exp(hi))

    def profile(self, v):
        v = np.asarray(v, dtype=float)
        if self.shape == 'gauss':
            return np.exp(-v * v / (2 * self.sigma ** 2))
        if self.shape == 'cos':
            return np.exp(-v * v / (2 * self.sigma ** 2)) * np.cos(self.kappa * v)
        if self.shape == 'bump':
            r = np.clip(np.abs(v) / self.sigma, 0.0, 1.0)
            inside = r < 1
            with np.errstate(divide='ignore'):
                val = np.exp(1.0 - 1.0 / np.where(inside, 1.0 - r * r, 1.0))
            return np.where(inside, val, 0.0)
        if self.shape == 'dyadic':
            return _smooth_step(v / LOG2) - _smooth_step(v / LOG2 + 1)
        return _smooth_step(v / LOG2)

    def oscillation(self, x):
        return np.exp(2j * math.pi * self.u * np.asarray(x) / (self.Y * self.T))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        positive = x > 0
        v = np.log(np.where(positive, x, self.scale) / self.scale)
        out = np.where(positive, self.profile(v), 0.0)
        if self.oscillating:
            out = out * self.oscillation(x)
        return out

    def closedMellin(self):
        return self.shape in ('gauss', 'cos') and not self.oscillating

    def mellin(self, s):
        """Integral of W(x) x^(s-1) over (0, infinity)."""
        s = np.asarray(s, dtype=complex)
        if self.shape == 'cutoff' and np.any(s.real <= 0):
            raise PreconditionError('Mellin transform of the cutoff needs Re s > 0')
        if self.closedMellin():
            sig2 = self.sigma ** 2
            base = self.sigma * math.sqrt(2 * math.pi)
            ns = np.exp(s * math.log(self.scale))
            if self.shape == 'gauss':
                return ns * base * np.exp(sig2 * s * s / 2)
            return ns * base / 2 * (np.exp(sig2 * (s + 1j * self.kappa) ** 2 / 2)
                                    + np.exp(sig2 * (s - 1j * self.kappa) ** 2 / 2))
        return mellin_numeric(self, s)

    @functools.lru_cache(maxsize=None)
    def _symbolicProfile(self):
        v = sympy.Symbol('v', real=True)
        sigma = sympy.nsimplify(self.sigma)
        if self.shape == 'gauss':
            expr = sympy.exp(-v ** 2 / (2 * sigma ** 2))
        elif self.shape == 'cos':
            expr = sympy.exp(-v ** 2 / (2 * sigma ** 2)) * sympy.cos(sympy.nsimplify(self.kappa) * v)
        elif self.shape == 'bump':
            expr = sympy.exp(1 - 1 / (1 - (v / sigma) ** 2))
        elif self.shape == 'dyadic':
            w = v / sympy.log(2)
            expr = sympy.Piecewise((1 - _symbolic_step(w + 1), w < 0), (_symbolic_step(w), True))
        else:
            expr = _symbolic_step(v / sympy.log(2))
        return v, expr

    def logDerivativeBounds(self, j_max, nodes=4001):
        """sup |d^j w / dv^j| for j = 0..j_max, from the closed form on a dense grid."""
        v, expr = self._symbolicProfile()
        lo, hi = self.logSupport()
        if self.shape == 'cutoff':
            lo = 0.0
        eps = 1e-6 * (hi - lo)
        grid = np.linspace(lo + eps, hi - eps, nodes)
        if self.shape == 'dyadic':
            grid = grid[np.abs(grid) > eps]
        bounds = []
        for j in range(j_max + 1):
            f = sympy.lambdify(v, sympy.diff(expr, v, j), 'numpy')
            with np.errstate(all='ignore'):
                vals = np.nan_to_num(np.asarray(f(grid), dtype=float) * np.ones_like(grid))
            bounds.append(float(np.max(np.abs(vals))))
        return bounds


@dataclasses.dataclass(frozen=True)
class WindowCombination(object):
    """A finite linear combination of windows."""
    terms: tuple

    def __call__(self, x):
        return sum(c * w(x) for c, w in self.terms)

    def mellin(self, s):
        return sum(c * w.mellin(s) for c, w in self.terms)

    def support(self):
        supports = [w.support() for c, w in self.terms]
        return (min(a for a, b in supports), max(b for a, b in supports))

    @property
    def oscillating(self):
        return any(w.oscillating for c, w in self.terms)

    @property
    def scale(self):
        return max(w.scale for c, w in self.terms)


def _trapezoid_mellin(window, s, lo, hi, n):
    v = np.linspace(lo, hi, n + 1)
    h = (hi - lo) / n
    x = window.scale * np.exp(v)
    f = window.profile(v).astype(complex)
    if window.oscillating:
        f = f * window.oscillation(x)
    f[0] *= 0.5
    f[-1] *= 0.5
    value = np.empty(len(s), dtype=complex)
    scale = np.empty(len(s))
    step = max(1, MELLIN_BLOCK // (n + 1))
    for i in range(0, len(s), step):
        kernel = np.exp(np.multiply.outer(s[i:i + step], v))
        value[i:i + step] = h * (kernel @ f)
        scale[i:i + step] = h * (np.abs(kernel) @ np.abs(f))
    return value, scale


def mellin_numeric(window, s):
    """Trapezoid rule in v = log(x/N), halving the step until it settles.

    Every profile is smooth and flat at both ends of its log support, so the
    rule converges faster than any power of the step.
    """
    s = np.asarray(s, dtype=complex)
    scalar = s.ndim == 0
    s = np.atleast_1d(s)
    lo, hi = window.logSupport()
    if lo == -math.inf:
        lo = -40.0 / float(np.min(s.real))
    freq = float(np.max(np.abs(s.imag)))
    if window.oscillating:
        freq += 2 * math.pi * abs(window.u) * window.scale * math.exp(hi) / (window.Y * window.T)
    n = max(64, int(math.ceil((hi - lo) * (freq + 1.0) / 2.0)))
    prev, scale = _trapezoid_mellin(window, s, lo, hi, n)
    cur = prev
    while True:
        n *= 2
        if n > MELLIN_MAX_NODES:
            err = float(np.max(np.abs(cur - prev) / np.maximum(scale, 1e-300)))
            raise AccuracyError(err, 'Mellin quadrature did not settle (%g)' % (err,))
        cur, scale = _trapezoid_mellin(window, s, lo, hi, n)
        if np.all(np.abs(cur - prev) <= MELLIN_TOL * np.maximum(scale, 1e-300)):
            break
        prev = cur
    log.debug('Mellin of %s window on %s nodes' % (window.shape, n))
    result = cur * np.exp(s * math.log(window.scale))
    if scalar:
        return complex(result[0])
    return result


def dyadic_partition(x_max, x_min=1.0):
    """Dyadic windows whose sum is 1 on [x_min, x_max].

    The pieces are W(x/2^k) for 2^k between x_min/2 and the first power of
    two at or above x_max; their sum is the cutoff at that power of two
    minus the cutoff at 2^(k-1) for the smallest k.
    """
    if x_max < x_min or x_min <= 0:
        raise PreconditionError('dyadic_partition needs 0 < x_min <= x_max')
    k_lo = int(math.floor(math.log2(x_min)))
    k_hi = int(math.ceil(math.log2(x_max)))
    return [SmoothWindow('dyadic', 2.0 ** k) for k in range(k_lo, k_hi + 1)]


def partition_of_unity(windows, x):
    x = np.asarray(x, dtype=float)
    return sum(w(x) for w in windows)
