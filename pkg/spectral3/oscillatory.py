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

"""Oscillatory integrals: quadrature, integration by parts, stationary phase.

Every integral here is I = int w(x) exp(i h(x)) dx with the phase in
radians; a phase written with e(h) = exp(2 pi i h) enters as 2 pi h.

The second half specialises to the GL(4) transform W_+ of a window
w(y/N) e(u y / (Y T)).  With lambda = N U / (Y T),
gamma = t_phi / (2 pi lambda) and alpha = (N X / v) (Y T / (N |U|))^4 the
stationary point xi0 solves (xi0^2 - gamma^2)^2 = alpha xi0 and the phase
there is

    h1(xi0) = lambda (-3 xi0 + 4 gamma artanh(gamma / xi0)).

Two conventions exist for its gamma expansion.  'exact' expands the line
above.  'printed' reproduces the published constant list, which carries an
extra pi^-4 in alpha, the opposite sign on the artanh term and an extra
alpha^(1/3) on it.
"""

import dataclasses
import fractions
import functools
import logging
import math

import numpy as np
import scipy.optimize
import scipy.special
import sympy

from spectral3 import voronoi
from spectral3.errors import (AccuracyError, NumericalError, PreconditionError,
                              RangeError, RegimeError)
from spectral3.windows import GAUSS_REACH, SmoothWindow

log = logging.getLogger('spectral3.oscillatory')

QUAD_ORDER = 16
QUAD_TOL = 1e-12
MAX_PANELS = 200000
BRACKET_NODES = 257
FD_STEP = 1e-3
ERROR_MARGIN = 1.5
XI0_TOL = 1e-13
XI0_MAX_STEPS = 50
XI0_COEFFICIENTS = tuple(fractions.Fraction(*p) for p in
                         ((1, 1), (2, 3), (-1, 3), (28, 81), (-110, 243), (2, 3)))
PRINTED_PHASE_CONSTANTS = ((0, 3), (4, 2), (fractions.Fraction(-4, 3), -1))
PHASE_CONVENTIONS = ('exact', 'printed')
MAX_SCALED_GAMMA = 0.3
REGIME_BAND = 4.0
MIN_FREQUENCY = 8.0
THETA_STEP = 0.02
LOG_STEP = 1e-3
DECAY_ORDER = 4
EPSILON = 0.01
EPSILON1_FACTOR = 26
DIRECT_NODES = 24
DIRECT_TOL = 1e-8
DIRECT_ABSCISSA = 0.5
SERIES_TOL = 1e-10
REGIMES = ('stationary', 'ambiguous', 'negligible')


@dataclasses.dataclass
class OscillatoryValue(object):
    """value, error estimate and the regime that produced them."""
    value: complex
    error: float
    regime: str
    corrected: complex = None
    details: dict = dataclasses.field(default_factory=dict)

    def asDict(self):
        d = {'value': [self.value.real, self.value.imag],
             'error': self.error,
             'regime': self.regime,
             'details': dict(self.details)}
        if self.corrected is not None:
            d['corrected'] = [self.corrected.real, self.corrected.imag]
        return d


class Amplitude(object):
    """A compactly supported amplitude w on [lo, hi]."""

    def __init__(self, function, lo, hi):
        if not hi > lo:
            raise PreconditionError('Amplitude support [%s, %s] is empty' % (lo, hi))
        self.function = function
        self.lo = lo
        self.hi = hi

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x >= self.lo) & (x <= self.hi)
        return np.where(inside, self.function(np.where(inside, x, self.lo)), 0.0)

    def support(self):
        return (self.lo, self.hi)

    @classmethod
    def raisedCosine(cls, lo, hi):
        k = 2 * math.pi / (hi - lo)
        return cls(lambda x: 0.5 * (1 - np.cos(k * (x - lo))), lo, hi)

    @classmethod
    def gaussian(cls, center, width):
        reach = GAUSS_REACH * width
        return cls(lambda x: np.exp(-(x - center) ** 2 / (2 * width ** 2)),
                   center - reach, center + reach)

    @classmethod
    def box(cls, lo, hi):
        return cls(lambda x: np.ones_like(x), lo, hi)


def _evaluate(f, x):
    x = np.asarray(x, dtype=float)
    return np.asarray(f(x), dtype=float) + np.zeros(np.shape(x))


@dataclasses.dataclass(frozen=True)
class PhaseSpec(object):
    """A phase h with derivative oracles h, h', h'', ... and envelope scales.

    R, Q, Y_bound describe h (h' >= R, |h^(j)| <= Y_bound Q^-j for j >= 2);
    X_bound and V describe the amplitude (|w^(j)| <= X_bound V^-j).
    """
    derivatives: tuple
    support: tuple = None
    params: dict = dataclasses.field(default_factory=dict, compare=False)
    R: float = None
    Q: float = None
    V: float = None
    Y_bound: float = None
    X_bound: float = None

    @classmethod
    def fromExpr(cls, expr, symbol, support=None, order=4, params=None, **scales):
        derivs = tuple(sympy.lambdify(symbol, sympy.diff(expr, symbol, j), 'numpy')
                       for j in range(order + 1))
        return cls(derivs, support, params or {}, **scales)

    @classmethod
    def linear(cls, lam, support=None, **scales):
        x = sympy.Symbol('x', real=True)
        return cls.fromExpr(sympy.nsimplify(lam) * x, x, support, params={'lam': lam}, **scales)

    @classmethod
    def quadratic(cls, lam, x0, support=None, cubic=0.0, **scales):
        x = sympy.Symbol('x', real=True)
        y = x - sympy.nsimplify(x0)
        expr = sympy.nsimplify(lam) * y ** 2 + sympy.nsimplify(cubic) * y ** 3
        return cls.fromExpr(expr, x, support, params={'lam': lam, 'x0': x0, 'cubic': cubic},
                            **scales)

    @property
    def order(self):
        return len(self.derivatives) - 1

    def h(self, x):
        return _evaluate(self.derivatives[0], x)

    def dh(self, x):
        return _evaluate(self.derivatives[1], x)

    def derivative(self, j, x):
        if j > self.order:
            raise PreconditionError('Phase carries derivatives up to order %s' % (self.order,))
        return _evaluate(self.derivatives[j], x)

    def finiteDifferenceGap(self, points, step=1e-5):
        """Largest relative gap between each oracle and a central difference of the one below."""
        points = np.asarray(points, dtype=float)
        gap = 0.0
        for j in range(1, self.order + 1):
            fd = (self.derivative(j - 1, points + step)
                  - self.derivative(j - 1, points - step)) / (2 * step)
            exact = self.derivative(j, points)
            gap = max(gap, float(np.max(np.abs(fd - exact) / (1 + np.abs(exact)))))
        return gap


def _support(phase, amplitude):
    lo, hi = amplitude.support()
    if phase.support is not None:
        lo, hi = max(lo, phase.support[0]), min(hi, phase.support[1])
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        raise PreconditionError('Oscillatory integrals need a compactly supported amplitude')
    return lo, hi


@functools.lru_cache(maxsize=None)
def _gauss_legendre(order):
    return np.polynomial.legendre.leggauss(order)


def _panels(f, a, b, order):
    """Gauss-Legendre sums of f over the panels [a_i, b_i] at once."""
    nodes, weights = _gauss_legendre(order)
    half = (b - a) / 2
    x = a[:, None] + half[:, None] * (nodes + 1)
    vals = np.asarray(f(x.ravel())).reshape(x.shape)
    return half * (vals @ weights), half * (np.abs(vals) @ weights)


def _initial_edges(phase, lo, hi, max_panels):
    """Panel edges with width at most 2 pi / (local |h'| + 1)."""
    edges = [lo]
    x = lo
    while x < hi:
        width = 2 * math.pi / (abs(float(phase.dh(x))) + 1)
        ahead = min(x + width, hi)
        width = 2 * math.pi / (max(abs(float(phase.dh(x))), abs(float(phase.dh(ahead)))) + 1)
        x = min(x + width, hi)
        edges.append(x)
        if len(edges) > max_panels:
            raise AccuracyError(float('inf'), 'Phase needs more than %s panels on [%s, %s]'
                                % (max_panels, lo, hi))
    return np.array(edges)


def oscillatory_quad(phase, amplitude, tol=QUAD_TOL, max_panels=MAX_PANELS):
    """int w(x) exp(i h(x)) dx by adaptive Gauss-Legendre panels.

    Each panel compares the rules of order QUAD_ORDER and 2 QUAD_ORDER and
    is bisected until the difference is below its share of tol times
    int |w|.  The error estimate is the sum of those differences.
    """
    lo, hi = _support(phase, amplitude)

    def f(x):
        return amplitude(x) * np.exp(1j * phase.h(x))

    edges = _initial_edges(phase, lo, hi, max_panels)
    a, b = edges[:-1], edges[1:]
    fine, mass = _panels(f, a, b, 2 * QUAD_ORDER)
    coarse, _ = _panels(f, a, b, QUAD_ORDER)
    norm = max(float(mass.sum()), 1e-300)
    target = tol * norm / (hi - lo)
    stack = list(zip(a, b, fine, np.abs(fine - coarse)))
    parts = []
    errors = []
    count = len(stack)
    while stack:
        p, q, value, err = stack.pop()
        if err <= target * (q - p):
            parts.append(value)
            errors.append(err)
            continue
        count += 1
        if count > max_panels:
            raise AccuracyError(err / norm, 'Oscillation unresolved after %s panels' % (max_panels,))
        m = 0.5 * (p + q)
        sub_a, sub_b = np.array([p, m]), np.array([m, q])
        sub_fine, _ = _panels(f, sub_a, sub_b, 2 * QUAD_ORDER)
        sub_coarse, _ = _panels(f, sub_a, sub_b, QUAD_ORDER)
        for i in range(2):
            stack.append((sub_a[i], sub_b[i], sub_fine[i], abs(sub_fine[i] - sub_coarse[i])))
    parts = np.array(parts)
    value = complex(math.fsum(parts.real), math.fsum(parts.imag))
    log.debug('Oscillatory quadrature on [%s, %s]: %s panels' % (lo, hi, count))
    return OscillatoryValue(value, math.fsum(errors), 'quadrature',
                            details={'panels': count, 'norm': norm})


def ibp_envelope(phase, A):
    """(beta - alpha) X [(Q R / sqrt(Y))^-A + (R V)^-A], the repeated integration by parts bound."""
    missing = [name for name in ('R', 'Q', 'V', 'Y_bound', 'X_bound')
               if getattr(phase, name) is None]
    if phase.support is None:
        missing.append('support')
    if missing:
        raise PreconditionError('Envelope needs the scales %s' % (', '.join(missing),))
    lo, hi = phase.support
    first = (phase.Q * phase.R / math.sqrt(phase.Y_bound)) ** -A
    second = (phase.R * phase.V) ** -A
    return (hi - lo) * phase.X_bound * (first + second)


def _jet(f, x0, step):
    """f, f', f'' at x0 from five-point central differences."""
    vals = [complex(f(x0 + k * step)) for k in (-2, -1, 0, 1, 2)]
    d1 = (vals[0] - 8 * vals[1] + 8 * vals[3] - vals[4]) / (12 * step)
    d2 = (-vals[0] + 16 * vals[1] - 30 * vals[2] + 16 * vals[3] - vals[4]) / (12 * step ** 2)
    return vals[2], d1, d2


def _stationary_terms(h0, h2, h3, h4, w0, w1, w2):
    """Leading term and leading plus next term of int w exp(i h) at a stationary point."""
    prefactor = math.sqrt(2 * math.pi / abs(h2)) * np.exp(1j * (h0 + math.copysign(math.pi / 4, h2)))
    correction = 1j / (2 * h2) * (w2 - h3 * w1 / h2 - h4 * w0 / (4 * h2)
                                  + 5 * h3 ** 2 * w0 / (12 * h2 ** 2))
    return complex(prefactor * w0), complex(prefactor * (w0 + correction))


def stationary_phase(phase, amplitude):
    """Leading-order stationary phase with the second-order factor alongside.

    value is w(x0) sqrt(2 pi / |h''|) exp(i h(x0) +- i pi / 4); corrected adds
    the next term of the expansion and the error estimate is ERROR_MARGIN
    times their difference.
    """
    lo, hi = _support(phase, amplitude)
    if phase.order < 2:
        raise PreconditionError('stationary_phase needs h and its first two derivatives')
    grid = np.linspace(lo, hi, BRACKET_NODES)
    curvature = phase.derivative(2, grid)
    if not (np.all(curvature > 0) or np.all(curvature < 0)):
        raise PreconditionError("h'' changes sign on [%s, %s]" % (lo, hi))
    slope = phase.dh(grid)
    changes = np.nonzero(np.sign(slope[:-1]) * np.sign(slope[1:]) <= 0)[0]
    if len(changes) == 0:
        raise RegimeError('No stationary point in [%s, %s]; bound the integral with '
                          'ibp_envelope instead' % (lo, hi))
    i = changes[0]
    if slope[i] == 0:
        x0 = float(grid[i])
    else:
        x0 = scipy.optimize.brentq(lambda x: float(phase.dh(x)), grid[i], grid[i + 1],
                                   xtol=1e-15 * (hi - lo), rtol=4 * np.finfo(float).eps)
    h = [float(phase.derivative(j, x0)) if j <= phase.order else 0.0 for j in range(5)]
    w0, w1, w2 = _jet(amplitude, x0, FD_STEP * (hi - lo))
    value, corrected = _stationary_terms(h[0], h[2], h[3], h[4], w0, w1, w2)
    return OscillatoryValue(value, ERROR_MARGIN * abs(corrected - value), 'stationary',
                            corrected=corrected, details={'x0': x0, 'h2': h[2]})


@dataclasses.dataclass(frozen=True)
class StationaryPoint(object):
    xi0: float
    alpha: float
    gamma: float
    residual: float = 0.0
    iterations: int = 0


def _xi0_residual(xi, alpha, gamma):
    return (xi * xi - gamma * gamma) ** 2 - alpha * xi


def xi0_solve(alpha, gamma):
    """The root xi0 ~ alpha^(1/3) of (xi^2 - gamma^2)^2 = alpha xi, by Newton."""
    if not 0.1 <= alpha <= 10:
        raise RangeError('xi0_solve needs alpha in [0.1, 10], got %s' % (alpha,))
    if abs(gamma) > MAX_SCALED_GAMMA:
        raise RangeError('xi0_solve needs |gamma| <= %s, got %s' % (MAX_SCALED_GAMMA, gamma))
    xi = float(np.cbrt(alpha))
    if gamma == 0:
        return StationaryPoint(xi, alpha, gamma,
                               residual=abs(_xi0_residual(xi, alpha, gamma)) / alpha)
    for step in range(1, XI0_MAX_STEPS + 1):
        slope = 4 * xi * (xi * xi - gamma * gamma) - alpha
        xi -= _xi0_residual(xi, alpha, gamma) / slope
        residual = abs(_xi0_residual(xi, alpha, gamma)) / alpha
        if residual < XI0_TOL:
            return StationaryPoint(xi, alpha, gamma, residual=residual, iterations=step)
    raise NumericalError('xi0 Newton iteration did not converge for alpha=%s gamma=%s'
                         % (alpha, gamma))


@functools.lru_cache(maxsize=None)
def xi0_coefficients(order):
    """Exact coefficients a_k of xi0 / alpha^(1/3) = sum a_k (gamma / alpha^(1/3))^(2k)."""
    G = sympy.Symbol('G')
    coeffs = [sympy.Integer(1)]
    for k in range(1, order + 1):
        a = sympy.Symbol('a')
        z = sum(c * G ** i for i, c in enumerate(coeffs)) + a * G ** k
        equation = sympy.expand((z ** 2 - G) ** 2 - z).coeff(G, k)
        coeffs.append(sympy.solve(equation, a)[0])
    return tuple(coeffs)


def xi0_series(alpha, gamma, order=len(XI0_COEFFICIENTS) - 1):
    """Truncated series for xi0 / alpha^(1/3) in (gamma / alpha^(1/3))^2."""
    g2 = (gamma / np.cbrt(alpha)) ** 2
    if g2 > MAX_SCALED_GAMMA ** 2:
        raise RangeError('xi0_series needs |gamma / alpha^(1/3)| <= %s' % (MAX_SCALED_GAMMA,))
    if order < len(XI0_COEFFICIENTS):
        coeffs = XI0_COEFFICIENTS[:order + 1]
    else:
        coeffs = xi0_coefficients(order)
    return sum(float(c) * g2 ** k for k, c in enumerate(coeffs))


def _check_convention(convention):
    if convention not in PHASE_CONVENTIONS:
        raise PreconditionError('Phase convention must be exact or printed, got %s'
                                % (convention,))


@functools.lru_cache(maxsize=None)
def phase_constants(order, convention='exact'):
    """(c1_j, c2_j) for j <= order, derived symbolically.

    exact:   -h1(xi0) / lambda = alpha^(1/3) (3 z - 4 g artanh(g / z))
    printed: alpha^(1/3) 3 z + alpha^(2/3) 4 g artanh(g / z)
    with g = gamma / alpha^(1/3) and z = xi0 / alpha^(1/3).
    """
    _check_convention(convention)
    g = sympy.Symbol('g', positive=True)
    z = sum(c * g ** (2 * k) for k, c in enumerate(xi0_coefficients(order)))
    arc = sympy.series(4 * g * sympy.atanh(g / z), g, 0, 2 * order + 2).removeO()
    arc = sympy.expand(arc)
    z = sympy.expand(z)
    out = []
    for j in range(order + 1):
        a = sympy.nsimplify(arc.coeff(g, 2 * j))
        c2 = 3 * z.coeff(g, 2 * j)
        if convention == 'printed':
            out.append((a, c2))
        else:
            out.append((sympy.Integer(0), c2 - a))
    return tuple(out)


def phase_series(alpha, gamma, J=4, convention='exact'):
    """sum_{j <= J} (c1_j alpha^(-(2j-2)/3) + c2_j alpha^(-(2j-1)/3)) gamma^(2j)."""
    alpha = np.asarray(alpha, dtype=float)
    total = np.zeros_like(alpha)
    for j, (c1, c2) in enumerate(phase_constants(J, convention)):
        total = total + (float(c1) * alpha ** (-(2 * j - 2) / 3.0)
                         + float(c2) * alpha ** (-(2 * j - 1) / 3.0)) * gamma ** (2 * j)
    return total if total.ndim else float(total)


def _phase_series_dlog(alpha, gamma, J, convention):
    """alpha d/dalpha of phase_series."""
    alpha = np.asarray(alpha, dtype=float)
    total = np.zeros_like(alpha)
    for j, (c1, c2) in enumerate(phase_constants(J, convention)):
        e1 = -(2 * j - 2) / 3.0
        e2 = -(2 * j - 1) / 3.0
        total = total + (float(c1) * e1 * alpha ** e1 + float(c2) * e2 * alpha ** e2) * gamma ** (2 * j)
    return total


def h1_stationary(alpha, gamma, lam=1.0):
    """lambda (-3 xi0 + 4 gamma artanh(gamma / xi0)) at the Newton root xi0."""
    xi0 = xi0_solve(alpha, gamma).xi0
    return lam * (-3 * xi0 + 4 * gamma * math.atanh(gamma / xi0))


@dataclasses.dataclass(frozen=True)
class OscillatoryParams(object):
    """Scales of the W_+ and J analysis: window w(x/N), frequency U, height T."""
    N: float
    U: float
    T: float
    t_phi: float = 0.0
    m: int = 1
    kind: str = 'Phi'
    parity: str = 'even'
    window_shape: str = 'bump'
    window_sigma: float = 0.5
    g1_shape: str = 'gauss'
    g1_sigma: float = 0.1
    convention: str = 'exact'
    J: int = 4
    epsilon: float = EPSILON
    tol: float = DIRECT_TOL

    def __post_init__(self):
        _check_convention(self.convention)
        if self.kind not in voronoi.VORONOI_KINDS:
            raise PreconditionError('kind must be Phi or E4, got %s' % (self.kind,))
        if self.N <= 0 or self.T <= 0 or self.U == 0:
            raise PreconditionError('N and T must be positive and U nonzero')

    @property
    def window(self):
        return SmoothWindow(self.window_shape, float(self.N), sigma=self.window_sigma)

    @property
    def g1(self):
        return SmoothWindow(self.g1_shape, 1.0, sigma=self.g1_sigma)

    def X(self, n, r, d1=1, d2=1):
        return n * self.m ** 2 / (r ** 4 * d1 * d2 ** 2)

    def Y(self, r, d1=1, d2=1):
        return r * d1 * d2 / self.m

    def lam(self, Y, u=None):
        return self.N * (self.U if u is None else u) / (Y * self.T)

    def gamma(self, Y, u=None):
        return self.t_phi / (2 * math.pi * self.lam(Y, u))

    def alpha(self, X, Y, v=1.0, convention=None):
        base = Y * self.T / (self.N * abs(self.U))
        if (convention or self.convention) == 'printed':
            base /= math.pi
        return self.N * X / np.asarray(v, dtype=float) * base ** 4

    def largeX(self, X):
        return self.N * X >= self.T ** (EPSILON1_FACTOR * self.epsilon)


def phase_series_fJ(n, r, v, params, J=None, d1=1, d2=1, convention=None):
    """f_J(n, r, v) = (N U / Y T) phase_series(alpha, gamma, J); equals -h1(xi0) up to gamma^(2J+2)."""
    J = params.J if J is None else J
    convention = convention or params.convention
    Y = params.Y(r, d1, d2)
    alpha = params.alpha(params.X(n, r, d1, d2), Y, v, convention)
    return params.lam(Y) * phase_series(alpha, params.gamma(Y), J, convention)


def _theta1(shifts, tau):
    """d/dtau of arg G(1/2 + i tau), the real part of (log G)'(s)."""
    s = 0.5 + 1j * np.asarray(tau, dtype=float)
    total = np.zeros_like(s)
    for mu in shifts:
        total = total + (math.log(math.pi) - 0.5 * scipy.special.digamma((1 - s + mu) / 2)
                         - 0.5 * scipy.special.digamma((s + mu) / 2))
    return total.real


def _theta_jet(shifts, tau):
    """theta', theta'', theta''', theta'''' at tau; the higher ones by central differences."""
    step = THETA_STEP * max(1.0, abs(tau))
    f = _theta1(shifts, tau + step * np.arange(-2, 3))
    d1 = (f[0] - 8 * f[1] + 8 * f[3] - f[4]) / (12 * step)
    d2 = (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * step ** 2)
    d3 = (-f[0] + 2 * f[1] - 2 * f[3] + f[4]) / (2 * step ** 3)
    return f[2], d1, d2, d3


def _inner_root(shifts, target, direction, t_phi):
    """The tau with sign direction and theta'(tau) = target, |tau| > t_phi."""
    guess = math.sqrt(t_phi ** 2 + 4 * math.pi ** 2 * math.exp(-target / 2))

    def g(a):
        return float(_theta1(shifts, direction * a)) - target

    lo = max(guess / 2, abs(t_phi) + 1e-6 * (1 + abs(t_phi)))
    hi = 2 * guess
    for _ in range(60):
        if g(hi) < 0:
            break
        hi *= 2
    for _ in range(60):
        if g(lo) > 0 or lo <= abs(t_phi) * (1 + 1e-9):
            break
        lo = abs(t_phi) + (lo - abs(t_phi)) / 2
    return direction * scipy.optimize.brentq(g, lo, hi, xtol=1e-13 * hi, rtol=1e-15)


class _WPlusPhase(object):
    """W_+(X) as a double integral over v = log(y / N) and tau = Im s on Re s = 1/2.

        W_+ = (N X)^(1/2) / (2 pi) int int w(v) e^(v/2) |G| exp(i Phi) dv dtau
        Phi = 2 pi lambda e^v + tau (v + log N X) + theta(tau)

    The tau integral is done by stationary phase at each v, leaving a one
    dimensional integral with phase h(v) = Phi(v, tau*(v)).
    """

    def __init__(self, X, u, Y, params):
        self.params = params
        self.window = params.window
        self.lam = params.lam(Y, u)
        self.logNX = math.log(params.N * X)
        self.shifts = voronoi.g_shifts(params.kind, 1, params.t_phi, params.parity)
        self.direction = -1.0 if self.lam > 0 else 1.0

    def tau(self, v):
        return _inner_root(self.shifts, -(v + self.logNX), self.direction, self.params.t_phi)

    def slope(self, v):
        return 2 * math.pi * self.lam * math.exp(v) + self.tau(v)

    def amplitude(self, v):
        tau = self.tau(v)
        s = 0.5 + 1j * tau
        modulus = math.exp(float(np.real(voronoi.log_g_factor(
            self.params.kind, 1, s, self.params.t_phi, self.params.parity))))
        theta2 = _theta_jet(self.shifts, tau)[1]
        return (float(self.window.profile(v)) * math.exp(v / 2) * modulus
                * math.sqrt(2 * math.pi / abs(theta2)))

    def evaluate(self, v0, jet=True):
        tau0 = self.tau(v0)
        _, t2, t3, t4 = _theta_jet(self.shifts, tau0)
        e = 2 * math.pi * self.lam * math.exp(v0)
        h2 = e - 1 / t2
        h3 = e - t3 / t2 ** 3
        h4 = e + t4 / t2 ** 4 - 3 * t3 ** 2 / t2 ** 5
        theta = float(np.imag(voronoi.log_g_factor(
            self.params.kind, 1, 0.5 + 1j * tau0, self.params.t_phi, self.params.parity)))
        phase = e + tau0 * (v0 + self.logNX) + theta
        if jet:
            w0, w1, w2 = _jet(self.amplitude, v0, LOG_STEP)
        else:
            w0, w1, w2 = self.amplitude(v0), 0.0, 0.0
        leading, corrected = _stationary_terms(phase, h2, h3, h4, w0, w1, w2)
        scale = math.exp(self.logNX / 2) / (2 * math.pi) * np.exp(1j * math.copysign(math.pi / 4, t2))
        return complex(scale * leading), complex(scale * corrected), {
            'v0': v0, 'tau0': tau0, 'phase': phase, 'h2': h2}


def _regime(xi, window):
    lo, hi = window.logSupport()
    a, b = math.exp(lo), math.exp(hi)
    band = REGIME_BAND ** (1.0 / 3)
    if a * band <= xi <= b / band:
        return 'stationary'
    if xi < a / band or xi > b * band:
        return 'negligible'
    return 'ambiguous'


def _decay_certificate(X, lam, alpha, gamma, params):
    """ibp_envelope of the reduced xi-integral, whose phase derivative is
    2 pi lambda log((xi^2 - gamma^2)^2 / (alpha xi))."""
    lo, hi = params.window.logSupport()
    xi = np.exp(np.linspace(lo, hi, BRACKET_NODES))
    slope = 2 * math.pi * abs(lam) * np.abs(np.log(np.abs(xi * xi - gamma * gamma) ** 2 / (alpha * xi)))
    R = float(slope.min())
    phase = PhaseSpec((), support=(float(xi[0]), float(xi[-1])), R=R, Q=float(xi[0]),
                      V=float(xi[-1] - xi[0]) / 4, Y_bound=6 * math.pi * abs(lam),
                      X_bound=math.sqrt(params.N * X))
    return ibp_envelope(phase, DECAY_ORDER), R


def w_plus_asymptotic(X, u, Y, params):
    """Stationary-phase value of W_+(X; u, Y) for the window w(x/N) e(u x / (Y T)).

    The regime comes from xi0 against the window's support, with a factor
    REGIME_BAND on X on either side of each edge.  Outside, the value is 0
    and the error is the integration by parts envelope; in the band both
    are computed and reported.
    """
    if X <= 0:
        raise PreconditionError('w_plus_asymptotic needs X > 0')
    lo, hi = params.window.logSupport()
    if not math.isfinite(lo):
        raise PreconditionError('The window must be supported away from 0')
    lam = params.lam(Y, u)
    if 2 * math.pi * abs(lam) < MIN_FREQUENCY:
        raise RangeError('N u / (Y T) = %.3g is too small for the asymptotic' % (lam,))
    gamma = params.t_phi / (2 * math.pi * lam)
    alpha = params.N * X * (Y * params.T / (params.N * abs(u))) ** 4
    xi = xi0_series(alpha, gamma) * float(np.cbrt(alpha))
    regime = _regime(xi, params.window)
    details = {'alpha': alpha, 'gamma': gamma, 'lambda': lam, 'xi0': xi,
               'large_x': params.largeX(X)}
    bound = 0.0
    if regime != 'stationary':
        bound, R = _decay_certificate(X, lam, alpha, gamma, params)
        details['min_phase_derivative'] = R
        details['negligible_bound'] = bound
    if regime == 'negligible':
        return OscillatoryValue(0j, bound, regime, corrected=0j, details=details)
    problem = _WPlusPhase(X, u, Y, params)
    v_lo, v_hi = lo - 1.0, hi + 1.0
    s_lo, s_hi = problem.slope(v_lo), problem.slope(v_hi)
    if s_lo * s_hi > 0:
        if regime == 'ambiguous':
            return OscillatoryValue(0j, bound, regime, corrected=0j, details=details)
        raise NumericalError('No stationary point of the W_+ phase near the window')
    v0 = scipy.optimize.brentq(problem.slope, v_lo, v_hi, xtol=1e-14, rtol=1e-15)
    leading, corrected, extra = problem.evaluate(v0)
    details.update(extra)
    error = ERROR_MARGIN * abs(corrected - leading) + bound
    return OscillatoryValue(leading, error, regime, corrected=corrected, details=details)


def inert_factor(X, u, Y, params):
    """|W_+(X; u, Y)| / (N X)^(1/2) at leading order.

    From the Hessian of the double integral under Stirling's formula:
    w(log xi0) xi0^(1/2) ((xi0^2 - gamma^2) / (3 xi0^2 + gamma^2))^(1/2), with
    xi0, gamma normalised by u.  Zero when alpha leaves [0.1, 10].
    """
    lam = params.lam(Y, u)
    gamma = params.t_phi / (2 * math.pi * lam)
    alpha = params.N * X * (Y * params.T / (params.N * abs(u))) ** 4
    try:
        xi0 = xi0_solve(alpha, gamma).xi0
    except RangeError:
        return 0.0
    shape = (xi0 * xi0 - gamma * gamma) / (3 * xi0 * xi0 + gamma * gamma)
    return float(params.window.profile(math.log(xi0))) * math.sqrt(xi0 * shape)


def _frakj_series(X1, X2, Y, params):
    U = params.U
    lam = params.lam(Y)
    gamma = params.gamma(Y)
    J, convention = params.J, params.convention
    g1 = params.g1

    def phase_values(v, d):
        a1 = params.alpha(X1, Y, v, convention)
        a2 = params.alpha(X2, Y, v, convention)
        if d == 0:
            return 2 * math.pi * lam * (phase_series(a2, gamma, J, convention)
                                        - phase_series(a1, gamma, J, convention))
        # alpha is proportional to 1 / v.
        return -2 * math.pi * lam * (_phase_series_dlog(a2, gamma, J, convention)
                                     - _phase_series_dlog(a1, gamma, J, convention)) / v

    phase = PhaseSpec((lambda v: phase_values(v, 0), lambda v: phase_values(v, 1)),
                      support=g1.support())

    def amplitude_values(v):
        v = np.atleast_1d(np.asarray(v, dtype=float))
        out = np.array([inert_factor(X1, U * x, Y, params) * inert_factor(X2, U * x, Y, params)
                        for x in v])
        return g1(v) * out

    amplitude = Amplitude(amplitude_values, *g1.support())
    quad = oscillatory_quad(phase, amplitude, tol=SERIES_TOL)
    factor = params.N * math.sqrt(X1 * X2) * U
    following = phase_constants(J + 1, convention)[-1]
    alpha = params.alpha(max(X1, X2), Y, 1.0, convention)
    tail = 2 * math.pi * abs(lam) * (abs(float(following[0])) * alpha ** (-2 * J / 3.0)
                                      + abs(float(following[1])) * alpha ** (-(2 * J + 1) / 3.0)
                                      ) * abs(gamma) ** (2 * J + 2)
    value = factor * quad.value
    error = abs(factor) * quad.error + tail * abs(factor) * quad.details['norm']
    return OscillatoryValue(value, error, 'series',
                            details={'panels': quad.details['panels'], 'X1': X1, 'X2': X2,
                                     'Y': Y, 'lambda': lam, 'gamma': gamma})


def _frakj_direct(X1, X2, Y, params, nodes):
    """U int g1(v) W_+(X1; U v) conj(W_+(X2; U v)) dv with the contour transforms."""
    lo, hi = params.g1.logSupport()
    x, w = _gauss_legendre(nodes)
    ell = lo + (hi - lo) * (x + 1) / 2
    weights = (hi - lo) / 2 * w
    window = params.window
    total = 0j
    for l, weight in zip(ell, weights):
        v = math.exp(l)
        osc = window.withOscillation(params.U * v, Y, params.T)
        w1, w2 = voronoi.w_transform(params.kind, 1, [X1, X2], osc, params.t_phi,
                                     params.parity, abscissa=DIRECT_ABSCISSA, tol=params.tol)
        total += weight * v * float(params.g1(v)) * w1 * np.conj(w2)
    return OscillatoryValue(complex(params.U * total), float('nan'), 'direct',
                            details={'nodes': nodes, 'X1': X1, 'X2': X2, 'Y': Y})


def frakJ(n1, n2, r, d1, d2, params, mode='series', nodes=DIRECT_NODES):
    """J = int g1(u / U) W_+(X1; u, Y) conj(W_+(X2; u, Y)) du.

    series: N (X1 X2)^(1/2) U int g1(v) W5(v; X1) W5(v; X2) e(f_J(n2) - f_J(n1)) dv
    with W5 the inert factor.  direct: Gauss-Legendre in log v over the
    support of g1 with the exact contour transforms (slow).
    """
    Y = params.Y(r, d1, d2)
    X1 = params.X(n1, r, d1, d2)
    X2 = params.X(n2, r, d1, d2)
    if mode == 'series':
        return _frakj_series(X1, X2, Y, params)
    if mode == 'direct':
        return _frakj_direct(X1, X2, Y, params, nodes)
    raise PreconditionError('frakJ mode must be series or direct, got %s' % (mode,))


STUDIES = ('xi0', 'fj', 'wplus', 'frakj')


def _study_xi0(grid, alpha, J, params):
    rows = []
    cube = float(np.cbrt(alpha))
    for gamma in grid:
        root = xi0_solve(alpha, gamma)
        row = {'gamma': gamma, 'xi0': root.xi0, 'residual': root.residual}
        for order in range(J + 1):
            row['error_%s' % order] = abs(xi0_series(alpha, gamma, order) * cube - root.xi0)
        rows.append(row)
    return rows


def _study_fj(grid, alpha, J, params):
    rows = []
    for gamma in grid:
        h1 = h1_stationary(alpha, gamma)
        row = {'gamma': gamma, 'h1': h1}
        for convention in PHASE_CONVENTIONS:
            for j in range(J + 1):
                row['%s_%s' % (convention, j)] = abs(phase_series(alpha, gamma, j, convention) + h1)
        rows.append(row)
    return rows


def _study_wplus(grid, X, params):
    """grid runs over N; the exact side is the contour transform on Re s = 1/2."""
    rows = []
    for N in grid:
        scaled = dataclasses.replace(params, N=float(N))
        asymptotic = w_plus_asymptotic(X, scaled.U, 1.0, scaled)
        row = {'N': N, 'lambda': asymptotic.details['lambda'], 'regime': asymptotic.regime}
        if asymptotic.regime != 'negligible':
            exact = voronoi.w_transform(scaled.kind, 1, X,
                                        scaled.window.withOscillation(scaled.U, 1.0, scaled.T),
                                        scaled.t_phi, scaled.parity, abscissa=DIRECT_ABSCISSA,
                                        tol=scaled.tol)
            size = max(abs(exact), 1e-300)
            row['exact'] = [exact.real, exact.imag]
            row['leading_error'] = abs(asymptotic.value - exact) / size
            row['corrected_error'] = abs(asymptotic.corrected - exact) / size
            row['estimate'] = asymptotic.error / size
        rows.append(row)
    return rows


def _study_frakj(grid, X, params):
    """grid runs over X2 / X1 at X1 = X, r = d1 = d2 = 1."""
    rows = []
    n1 = X / params.X(1, 1)
    diagonal = frakJ(n1, n1, 1, 1, 1, params)
    for ratio in grid:
        value = frakJ(n1, n1 * ratio, 1, 1, 1, params)
        rows.append({'ratio': ratio, 'value': [value.value.real, value.value.imag],
                     'error': value.error,
                     'relative': abs(value.value) / max(abs(diagonal.value), 1e-300)})
    return rows


def convergence_study(study, grid, params=None, alpha=1.0, J=4, X=1.0):
    """Tables behind verify-stationary-phase --study: one row per grid point."""
    if study not in STUDIES:
        raise PreconditionError('Unknown study %s; choose from %s' % (study, ', '.join(STUDIES)))
    if study in ('wplus', 'frakj') and params is None:
        raise PreconditionError('The %s study needs OscillatoryParams' % (study,))
    log.info('Convergence study %s over %s points' % (study, len(grid)))
    if study == 'xi0':
        return _study_xi0(grid, alpha, J, params)
    if study == 'fj':
        return _study_fj(grid, alpha, J, params)
    if study == 'wplus':
        return _study_wplus(grid, X, params)
    return _study_frakj(grid, X, params)
