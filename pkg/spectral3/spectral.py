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

"""Eisenstein series, regularized triple products and Watson's formula.

E(z, s) is normalised as (1/2) sum over coprime (c, d) of y^s / |cz + d|^(2s),
so that

  E(z, s) = y^s + xi(2s - 1)/xi(2s) y^(1-s)
            + (2/xi(2s)) sum_{n != 0} tau_u(|n|) sqrt(y) K_u(2 pi |n| y) e(nx)

with u = s - 1/2 and tau_u(n) = sum_{ab=n} (a/b)^u.  E_t is E(., 1/2 + it).

The spectral expansions of <phi_k, E_t^3> and <E_tau, E_t^3>_reg are assembled
term by term in log space: rho_j(1)^2 = 2 cosh(pi t_j) / L(1, sym^2 phi_j)
grows like e^(pi t_j) and cancels against the gamma factors of the
completed L-values.
"""

import cmath
import dataclasses
import fractions
import logging
import math
import typing

import numpy as np
import scipy.integrate
import scipy.special

from spectral3 import lfunctions
from spectral3 import special
from spectral3.errors import AccuracyError, CoverageError, PoleError, PreconditionError

log = logging.getLogger('spectral3.spectral')

EISENSTEIN_TOL = 1e-10
EISENSTEIN_MIN_TERMS = 8
EISENSTEIN_MAX_TERMS = 2 ** 16

# Omitted spectral mass relative to the peak of exp(-pi/2 Q).
COVERAGE_TOL = 1e-8
COVERAGE_Q = 2 / math.pi * math.log(1 / COVERAGE_TOL)
# Smallest spectral parameter of a level-one cusp form.
FIRST_CUSP_T = 9.533695261353557

NU_WINDOW = 16.0
NU_PANEL = 2.0
NU_TOL = 1e-10
QUAD_LIMIT = 200

TAIL_KINDS = ('psi_E3', 'phi_E3', 'E_E3_psi', 'E_E3_phi')
TAIL_GROUPS = ('growth', 'exponential', 'polynomial')

NEG_INF = complex(-math.inf, 0)


def _log(value):
    value = complex(value)
    if value == 0:
        return NEG_INF
    return cmath.log(value)


def _exp(value):
    if value.real == -math.inf:
        return 0j
    return cmath.exp(value)


def _log_xi(s):
    return complex(special.log_xi(complex(s)))


def _log_cosh(x):
    x = abs(x)
    return x + math.log1p(math.exp(-2 * x)) - math.log(2)


# Eisenstein series

def _tau_table(u, M):
    """tau_u(n) = n^-u sum_{a | n} a^(2u) for n = 1..M."""
    n = np.arange(1, M + 1, dtype=float)
    logn = np.log(n)
    powers = np.exp(2 * u * logn)
    sigma = np.zeros(M + 1, dtype=complex)
    for a in range(1, M + 1):
        sigma[a::a] += powers[a - 1]
    return sigma[1:] * np.exp(-u * logn)


def eisenstein_tail(s, y, M):
    """Bound for the Fourier modes |n| > M of E(z, s) at height y.

    Uses |tau_u(n)| <= d(n) n^|Re u| <= 2 n^(|Re u| + 1/2),
    |K_u(x)| <= K_|Re u|(x) and K(x + h) <= e^-h K(x).
    """
    u = complex(s) - 0.5
    order = abs(u.real)
    scale = 4 * math.sqrt(y) / abs(special.xi(2 * complex(s)))

    def term(n):
        x = 2 * math.pi * n * y
        return scale * 2 * n ** (order + 0.5) * scipy.special.kve(order, x) * math.exp(-x)

    first = term(M + 1)
    if first == 0:
        return 0.0
    ratio = (1 + 1.0 / (M + 1)) ** (order + 0.5) * math.exp(-2 * math.pi * y)
    if ratio >= 1:
        return math.inf
    return first / (1 - ratio)


def eisenstein_value(z, s, M=None, tol=EISENSTEIN_TOL):
    """E(z, s) from its Fourier expansion truncated at |n| <= M.

    When M is omitted it is doubled until the mode tail is below tol; a
    given M whose tail bound exceeds tol is an AccuracyError.
    """
    z = complex(z)
    s = complex(s)
    x, y = z.real, z.imag
    if y <= 0:
        raise PreconditionError('eisenstein_value needs Im z > 0, got %s' % (z,))
    if s in (0, 1):
        raise PoleError(s, 'E(z, s) has a pole at s=%s' % (s,))
    if s == 0.5:
        # E(z, 1/2) vanishes identically in this normalisation.
        return 0j
    if M is None:
        M = max(EISENSTEIN_MIN_TERMS, int(math.ceil(1 / y)))
        tail = eisenstein_tail(s, y, M)
        while tail > tol:
            M *= 2
            if M > EISENSTEIN_MAX_TERMS:
                raise AccuracyError(tail, 'E(z, %s) at y=%s needs more than %s modes' % (
                    s, y, EISENSTEIN_MAX_TERMS))
            tail = eisenstein_tail(s, y, M)
    else:
        if M < 1:
            raise PreconditionError('eisenstein_value needs M >= 1, got %s' % (M,))
        tail = eisenstein_tail(s, y, M)
        if tail > tol:
            raise AccuracyError(tail, 'E(z, %s) with %s modes: tail %.3g above %.3g' % (
                s, M, tail, tol))
    u = s - 0.5
    taus = _tau_table(u, M)
    modes = 0j
    for n in range(1, M + 1):
        modes += taus[n - 1] * special.k_bessel(u, 2 * math.pi * n * y) * math.cos(
            2 * math.pi * n * x)
    xi2s = special.xi(2 * s)
    constant = y ** s + special.xi(2 * s - 1) / xi2s * y ** (1 - s)
    log.debug('E(%s, %s): %s modes, tail %.3g' % (z, s, M, tail))
    return complex(constant + 4 * math.sqrt(y) / xi2s * modes)


@dataclasses.dataclass(frozen=True)
class EisensteinPoint(object):
    """E_t = E(., 1/2 + it), optionally with a fixed number of Fourier modes."""
    t: float
    M: typing.Optional[int] = None

    def __post_init__(self):
        if self.M is not None and self.M < 1:
            raise PreconditionError('EisensteinPoint needs M >= 1, got %s' % (self.M,))

    @property
    def s(self):
        return 0.5 + 1j * self.t

    def __call__(self, z):
        return eisenstein_value(z, self.s, self.M)


# The weight Q

def _fractions(*values):
    exact = all(isinstance(v, (int, fractions.Fraction)) for v in values)
    return exact, [fractions.Fraction(v) for v in values]


def _result(value, exact):
    return value if exact else float(value)


def q_weight(tj, tk, t):
    """Q(tj; tk, t), the exponent of the summand envelope exp(-pi/2 Q).

    Evaluated exactly in rationals; float inputs give the correctly rounded
    float.  Q is even in tj.
    """
    exact, (tj, tk, t) = _fractions(tj, tk, t)
    value = (-abs(tk) - abs(tj)
             + (abs(tj + t + tk) + abs(tj + t - tk) + abs(tj - t + tk) + abs(tj - t - tk)) / 2
             + (abs(tj + 2 * t) + abs(tj - 2 * t)) / 2 - 3 * abs(t))
    return _result(value, exact)


def q_weight_piecewise(tj, tk, t):
    """Q(tj; tk, t) from its piecewise-linear table, for 0 <= tk <= t."""
    exact, (tj, tk, t) = _fractions(tj, tk, t)
    if not 0 <= tk <= t:
        raise PreconditionError('piecewise Q needs 0 <= tk <= t, got tk=%s t=%s' % (tk, t))
    tj = abs(tj)
    if tj < t - tk:
        value = t - tk - tj
    elif tj < t + tk:
        value = fractions.Fraction(0)
    elif tj < 2 * t:
        value = tj - tk - t
    else:
        value = 2 * tj - 3 * t - tk
    return _result(value, exact)


def q_window(tk, t, q_max=COVERAGE_Q):
    """The interval of tj >= 0 where Q(tj; tk, t) <= q_max."""
    tk = abs(tk)
    if tk > t:
        raise PreconditionError('spectral window needs tk <= t, got tk=%s t=%s' % (tk, t))
    lo = max(0.0, t - tk - q_max)
    if q_max <= t - tk:
        hi = t + tk + q_max
    else:
        hi = 2 * t + (q_max - (t - tk)) / 2
    return lo, hi


def summand_envelope(tj, tk, t):
    """Size of the phi_k cusp summand at t_j, up to L-values and t^eps."""
    if tj == 0:
        raise PreconditionError('summand envelope needs tj != 0')
    poly = 1.0
    for a in (1, -1):
        for b in (1, -1):
            poly *= 1 + abs(t + a * tj + b * tk)
        poly *= 1 + abs(2 * t + a * tj)
    return math.exp(-math.pi / 2 * q_weight(float(tj), float(tk), float(t))) / (
        math.sqrt(abs(tj)) * poly ** 0.25)


# Closed forms

def completed_triple(s1, s2, s3):
    """xi(1+2s1) xi(1+2s2) xi(1+2s3) times the three-Eisenstein integral.

    Invariant under permutations and sign changes of (s1, s2, s3).
    """
    s1, s2, s3 = complex(s1), complex(s2), complex(s3)
    numerator = (('xi(1/2+s1+s2+s3)', 0.5 + s1 + s2 + s3),
                 ('xi(1/2+s1-s2+s3)', 0.5 + s1 - s2 + s3),
                 ('xi(1/2+s1+s2-s3)', 0.5 + s1 + s2 - s3),
                 ('xi(1/2+s1-s2-s3)', 0.5 + s1 - s2 - s3))
    value = 1 + 0j
    for name, arg in numerator:
        value *= _xi_factor(name, arg)
    return value


def zagier_triple(s1, s2, s3):
    """Regularized integral of E(., 1/2 + s1) E(., 1/2 + s2) E(., 1/2 + s3)."""
    s1, s2, s3 = complex(s1), complex(s2), complex(s3)
    value = completed_triple(s1, s2, s3)
    for name, arg in (('xi(1+2s1)', 1 + 2 * s1), ('xi(1+2s2)', 1 + 2 * s2),
                      ('xi(1+2s3)', 1 + 2 * s3)):
        value /= _xi_factor(name, arg)
    return value


def _xi_factor(name, arg):
    try:
        return special.xi(arg)
    except PoleError:
        raise PoleError(arg, 'zagier_triple: %s has a pole at %s' % (name, arg))


def eisenstein_constant_term(t):
    """xi(1/2+3it) xi(1/2+it)^2 xi(1/2-it) / xi(1-2it)^3."""
    log_value = (_log_xi(0.5 + 3j * t) + 2 * _log_xi(0.5 + 1j * t) + _log_xi(0.5 - 1j * t)
                 - 3 * _log_xi(1 - 2j * t))
    return _exp(log_value)


def log_rho1_squared(form):
    if form.l_sym2_at_1 is None:
        raise PreconditionError('form %s has no L(1, sym^2) value' % (form.label,))
    return math.pi * form.t + math.log1p(math.exp(-2 * math.pi * form.t)) - math.log(
        form.l_sym2_at_1)


def rho1_squared(form):
    """rho(1)^2 = 2 cosh(pi t) / L(1, sym^2 phi); rho(1) is taken positive."""
    return math.exp(log_rho1_squared(form))


def _completed(desc, s):
    """log Lambda(s) and its relative error."""
    s = complex(s)
    if desc.closed_form is not None:
        return _log(desc.closed_form(s)), 0.0
    afe = lfunctions.l_value(desc, s)
    if afe.value == 0:
        return NEG_INF, 0.0
    return (cmath.log(afe.value) + complex(desc.logGamma(s)),
            afe.error / abs(afe.value))


def _log_gl2(form, s):
    return _completed(lfunctions.gl2_descriptor(form), s)


def _log_pair(form_k, form_j, s):
    """log Lambda(s, phi_k x phi_j); the square splits as zeta times sym^2."""
    if form_k.label == form_j.label and not form_k.isEisenstein():
        a, ea = _completed(lfunctions.zeta_descriptor(), s)
        b, eb = _completed(lfunctions.sym2_descriptor(form_k), s)
        return a + b, ea + eb
    return _completed(lfunctions.rankin_selberg_descriptor(form_k, form_j), s)


def eisen2_cusp(form, s1, s2, rho1=None):
    """Integral of E(., 1/2 + s1) E(., 1/2 + s2) phi; zero for odd phi."""
    if not form.isEven():
        return 0j
    if rho1 is None:
        rho1 = math.exp(0.5 * log_rho1_squared(form))
    s1, s2 = complex(s1), complex(s2)
    a, _ = _log_gl2(form, 0.5 + s1 + s2)
    b, _ = _log_gl2(form, 0.5 + s1 - s2)
    log_value = a + b - _log_xi(1 + 2 * s1) - _log_xi(1 + 2 * s2)
    return rho1 / 2 * _exp(log_value)


# Tail terms

@dataclasses.dataclass
class TailTerms(object):
    """Named closed-form tail contributions, each tagged with a decay group."""
    which: str
    t: float
    terms: tuple

    @property
    def value(self):
        return sum((v for _, _, v in self.terms), 0j)

    def group(self, name):
        return sum((v for _, g, v in self.terms if g == name), 0j)

    def groups(self):
        return tuple(g for g in TAIL_GROUPS if any(tg == g for _, tg, _ in self.terms))

    def asDict(self):
        return {'which': self.which, 't': self.t,
                'terms': [{'name': n, 'group': g, 'value': v} for n, g, v in self.terms],
                'value': self.value}


def _xi_ratio_log(t):
    """log of xi(2it) / xi(1 + 2it), a unimodular ratio for real t."""
    return _log_xi(2j * t) - _log_xi(1 + 2j * t)


def _psi_e3_terms(t):
    c = _exp(_xi_ratio_log(t))
    return (('E(3/2+3it)', 'growth', 1 + 0j),
            ('E(3/2+it)', 'growth', 3 * c),
            ('E(3/2-it)', 'growth', 3 * c * c),
            ('E(3/2-3it)', 'growth', c ** 3))


def _phi_e3_terms(t, form):
    eps = 1 if form.isEven() else -1
    log_rho = 0.5 * log_rho1_squared(form)
    ratio = _log_xi(1 + 2j * t) - _log_xi(1 - 2j * t)
    xi_m = _log_xi(1 - 2j * t)
    lam = {}
    for s in (1 - 3j * t, 1 - 1j * t, 1 + 1j * t, 1 + 3j * t):
        lam[s], _ = _log_gl2(form, s)
    first = (log_rho - math.log(2) + lam[1 - 3j * t] + lam[1 - 1j * t] - xi_m
             - _log_xi(2 - 4j * t))
    # The two cross terms coincide at s1 = s2; 1/xi(2) = 6/pi.
    cross = (log_rho - _log_xi(2) + ratio + lam[1 + 1j * t] + lam[1 - 1j * t] - xi_m)
    last = (log_rho - math.log(2) + 2 * ratio + lam[1 + 1j * t] + lam[1 + 3j * t] - xi_m
            - _log_xi(2 + 4j * t))
    return (('E(1+2it)', 'exponential', eps * _exp(first)),
            ('E(1)', 'exponential', eps * _exp(cross)),
            ('E(1-2it)', 'exponential', eps * _exp(last)))


def _e_e3_psi_terms(t, tau):
    """<E_tau E_-t, E_Psi>_reg for E_Psi the growth part of E(., 1/2+s1)E(., 1/2+s2).

    Each Eisenstein series E(., 1 + c) of E_Psi pairs with E_tau E_-t by the
    three-Eisenstein formula, taken at conj(s1) = conj(s2) = -it.
    """
    sb = -1j * t
    r = _exp(_log_xi(2 * sb) - _log_xi(1 + 2 * sb))
    first = zagier_triple(1j * tau, -1j * t, 0.5 + 2 * sb)
    cross = zagier_triple(1j * tau, -1j * t, 0.5)
    last = zagier_triple(1j * tau, -1j * t, 0.5 - 2 * sb)
    return (('E(1+2it)', 'exponential', first),
            ('E(1)', 'exponential', 2 * r * cross),
            ('E(1-2it)', 'exponential', r * r * last))


def _e_e3_phi_terms(t, tau):
    """<E_Phi, E_t^2>_reg for E_Phi the growth part of E_tau E_-t."""
    a = _exp(_log_xi(2j * tau) - _log_xi(1 + 2j * tau))
    b = _exp(_log_xi(-2j * t) - _log_xi(1 - 2j * t))
    terms = []
    for name, w, coeff in (('E(1+i tau-it)', 1j * tau - 1j * t, 1),
                           ('E(1-i tau-it)', -1j * tau - 1j * t, a),
                           ('E(1+i tau+it)', 1j * tau + 1j * t, b),
                           ('E(1-i tau+it)', -1j * tau + 1j * t, a * b)):
        terms.append((name, 'polynomial', coeff * zagier_triple(0.5 + w, -1j * t, -1j * t)))
    return tuple(terms)


def tail_terms(which, t, tau=None, form=None):
    """The closed-form tail combination `which` at E_t.

    psi_E3      growth terms of E_t^3 (coefficient of each E(., 3/2 + .))
    phi_E3      <phi_k E_-t, E_Psi>, times the root number of phi_k
    E_E3_psi    <E_tau E_-t, E_Psi>_reg
    E_E3_phi    <E_Phi, E_t^2>_reg
    """
    if which not in TAIL_KINDS:
        raise PreconditionError('Unknown tail combination %s' % (which,))
    if t < 1:
        raise PreconditionError('tail terms need t >= 1, got %s' % (t,))
    if which == 'psi_E3':
        terms = _psi_e3_terms(t)
    elif which == 'phi_E3':
        if form is None:
            raise PreconditionError('phi_E3 tails need a form')
        terms = _phi_e3_terms(t, form)
    else:
        if tau is None:
            raise PreconditionError('%s tails need tau' % (which,))
        if which == 'E_E3_psi':
            terms = _e_e3_psi_terms(t, tau)
        else:
            terms = _e_e3_phi_terms(t, tau)
    return TailTerms(which, t, terms)


# Triple products

@dataclasses.dataclass
class TripleProductValue(object):
    """A spectral expansion: value is the sum of the breakdown, in order."""
    value: complex
    breakdown: tuple
    error: float
    truncation: dict

    @classmethod
    def assemble(cls, breakdown, error, truncation):
        value = 0j
        for _, part in breakdown:
            value += part
        return cls(value, tuple(breakdown), float(error), truncation)

    def component(self, name):
        for n, v in self.breakdown:
            if n == name:
                return v
        raise KeyError(name)

    def asDict(self):
        return {'value': self.value,
                'breakdown': [{'name': n, 'value': v} for n, v in self.breakdown],
                'error': self.error, 'truncation': self.truncation}


def check_coverage(basis, tk, t):
    """The spectral window a basis must span; CoverageError when it does not."""
    lo, hi = q_window(tk, t)
    lo = max(lo, FIRST_CUSP_T)
    if hi < lo:
        return lo, hi
    ts = [f.t for f in basis]
    if min(ts) > lo + 1e-9:
        raise CoverageError((lo, min(ts)), 'basis misses the spectral window [%.4f, %.4f]' % (
            lo, min(ts)))
    if max(ts) < hi:
        raise CoverageError((max(ts), hi), 'basis misses the spectral window [%.4f, %.4f]' % (
            max(ts), hi))
    return lo, hi


def _nu_panels(center, width, nu_grid):
    if nu_grid is not None:
        grid = np.asarray(sorted(float(v) for v in nu_grid))
        if len(grid) < 2 or grid[0] < 0:
            raise PreconditionError('nu_grid needs at least two nonnegative breakpoints')
        return grid
    lo = max(0.0, center - width - NU_WINDOW)
    hi = center + width + NU_WINDOW
    count = max(1, int(math.ceil((hi - lo) / NU_PANEL)))
    return np.linspace(lo, hi, count + 1)


def spectral_integral(log_integrand, grid):
    """Integral over |nu| in [grid[0], grid[-1]] of exp(log_integrand(nu)).

    Both signs of nu are integrated panel by panel with Gauss-Kronrod; the
    omitted ranges decay at least like exp(-pi/2 |nu - edge|) and are bounded
    by 2/pi times the integrand at the edges.  Returns value, error and the
    number of integrand evaluations.
    """
    cache = {}

    def f(nu):
        if nu not in cache:
            if nu == 0:
                cache[nu] = (0j, 0.0)
            else:
                log_value, rel = log_integrand(nu)
                cache[nu] = (_exp(log_value), rel)
        return cache[nu][0]

    edges = [grid[-1], -grid[-1]]
    if grid[0] > 0:
        edges += [grid[0], -grid[0]]
    edge_tail = 2 / math.pi * sum(abs(f(e)) for e in edges)
    scale = max([abs(f(v)) for v in grid] + [abs(f(-v)) for v in grid])
    total = 0j
    quad_error = 0.0
    mass = 0.0
    for sign in (1, -1):
        for a, b in zip(grid[:-1], grid[1:]):
            lo, hi = (a, b) if sign > 0 else (-b, -a)
            epsabs = NU_TOL * scale * (hi - lo)
            re, re_err = scipy.integrate.quad(lambda v: f(v).real, lo, hi, epsabs=epsabs,
                                              epsrel=NU_TOL, limit=QUAD_LIMIT)
            im, im_err = scipy.integrate.quad(lambda v: f(v).imag, lo, hi, epsabs=epsabs,
                                              epsrel=NU_TOL, limit=QUAD_LIMIT)
            total += complex(re, im)
            quad_error += re_err + im_err
            mass += abs(complex(re, im))
    rel = max((r for _, r in cache.values()), default=0.0)
    return total, quad_error + edge_tail + rel * mass, len(cache)


def phi_cusp_term(form_k, form_j, t):
    """rho_k rho_j^2/8 Lambda(1/2+it, k x j) Lambda(1/2+2it, j) Lambda(1/2, j) / xi(1-2it)^3.

    Returns the value and its error.
    """
    pair, e1 = _log_pair(form_k, form_j, 0.5 + 1j * t)
    shifted, e2 = _log_gl2(form_j, 0.5 + 2j * t)
    central, e3 = _log_gl2(form_j, 0.5)
    log_value = (0.5 * log_rho1_squared(form_k) + log_rho1_squared(form_j) - math.log(8)
                 + pair + shifted + central - 3 * _log_xi(1 - 2j * t))
    value = _exp(log_value)
    return value, abs(value) * (e1 + e2 + e3)


def etau_cusp_term(form_j, tau, t):
    """rho_j^2/4 Lambda(1/2, j) Lambda(1/2+2it, j) prod Lambda(1/2+i tau+-it, j)
    / (xi(1+2i tau) xi(1-2it)^3), with its error."""
    central, e1 = _log_gl2(form_j, 0.5)
    shifted, e2 = _log_gl2(form_j, 0.5 + 2j * t)
    plus, e3 = _log_gl2(form_j, 0.5 + 1j * tau + 1j * t)
    minus, e4 = _log_gl2(form_j, 0.5 + 1j * tau - 1j * t)
    log_value = (log_rho1_squared(form_j) - math.log(4) + central + shifted + plus + minus
                 - _log_xi(1 + 2j * tau) - 3 * _log_xi(1 - 2j * t))
    value = _exp(log_value)
    return value, abs(value) * (e1 + e2 + e3 + e4)


def _cusp_sum(term, basis):
    terms = []
    error = 0.0
    for form_j in basis:
        if not form_j.isEven():
            continue
        value, err = term(form_j)
        terms.append(value)
        error += err
    total = sum(terms, 0j)
    return total, error + COVERAGE_TOL * sum(abs(v) for v in terms), len(terms)


def phi_E3(form_k, t, basis, nu_grid=None):
    """<phi_k, E_t^3> from its spectral expansion.

    Odd forms contribute only the tail combination.  An empty basis drops
    the cusp sum; a non-empty one must span the window where exp(-pi/2 Q)
    is above COVERAGE_TOL.
    """
    if t < 1:
        raise PreconditionError('phi_E3 needs t >= 1, got %s' % (t,))
    basis = list(basis)
    tails = tail_terms('phi_E3', t, form=form_k)
    truncation = {'form': form_k.label, 't': t, 'basis': len(basis)}
    if not form_k.isEven():
        truncation['parity'] = 'odd'
        breakdown = [('tail:%s' % (n,), v) for n, _, v in tails.terms]
        return TripleProductValue.assemble(breakdown, 0.0, truncation)
    if basis:
        truncation['window'] = check_coverage(basis, form_k.t, t)
    cusp, cusp_error, count = _cusp_sum(lambda j: phi_cusp_term(form_k, j, t), basis)
    truncation['even_terms'] = count

    log_rho = 0.5 * log_rho1_squared(form_k)
    log_const = log_rho - math.log(8 * math.pi) - 3 * _log_xi(1 - 2j * t)

    def log_integrand(nu):
        a, ea = _log_gl2(form_k, 0.5 + 1j * t - 1j * nu)
        b, eb = _log_gl2(form_k, 0.5 - 1j * t - 1j * nu)
        value = (log_const + a + b + _log_xi(0.5 + 1j * nu + 2j * t)
                 + _log_xi(0.5 + 1j * nu - 2j * t) + 2 * _log_xi(0.5 + 1j * nu)
                 - _log_xi(1 - 2j * nu) - _log_xi(1 + 2j * nu))
        return value, ea + eb

    grid = _nu_panels(t, form_k.t, nu_grid)
    continuous, cont_error, evaluations = spectral_integral(log_integrand, grid)
    truncation['nu_window'] = (float(grid[0]), float(grid[-1]))
    truncation['nu_evaluations'] = evaluations
    breakdown = [('cusp', cusp), ('continuous', continuous)]
    breakdown += [('tail:%s' % (n,), v) for n, _, v in tails.terms]
    log.debug('phi_E3(%s, %s): %s cusp terms, %s nu evaluations' % (
        form_k.label, t, count, evaluations))
    return TripleProductValue.assemble(breakdown, cusp_error + cont_error, truncation)


def etau_E3(tau, t, basis, nu_grid=None):
    """<E_tau, E_t^3>_reg from its spectral expansion and its seven tails."""
    if t < 1:
        raise PreconditionError('etau_E3 needs t >= 1, got %s' % (t,))
    basis = list(basis)
    truncation = {'tau': tau, 't': t, 'basis': len(basis)}
    if basis:
        truncation['window'] = check_coverage(basis, abs(tau), t)
    cusp, cusp_error, count = _cusp_sum(lambda j: etau_cusp_term(j, tau, t), basis)
    truncation['even_terms'] = count

    log_const = (-math.log(4 * math.pi) - _log_xi(1 + 2j * tau) - 3 * _log_xi(1 - 2j * t))

    def log_integrand(nu):
        value = (log_const + 2 * _log_xi(0.5 + 1j * nu) + _log_xi(0.5 + 1j * nu + 2j * t)
                 + _log_xi(0.5 + 1j * nu - 2j * t) - _log_xi(1 - 2j * nu)
                 - _log_xi(1 + 2j * nu))
        for a in (1, -1):
            for b in (1, -1):
                value += _log_xi(0.5 + 1j * nu + a * 1j * tau + b * 1j * t)
        return value, 0.0

    grid = _nu_panels(t, abs(tau), nu_grid)
    continuous, cont_error, evaluations = spectral_integral(log_integrand, grid)
    truncation['nu_window'] = (float(grid[0]), float(grid[-1]))
    truncation['nu_evaluations'] = evaluations
    breakdown = [('cusp', cusp), ('continuous', continuous)]
    for which in ('E_E3_psi', 'E_E3_phi'):
        tails = tail_terms(which, t, tau=tau)
        breakdown += [('tail:%s:%s' % (which, n), v) for n, _, v in tails.terms]
    return TripleProductValue.assemble(breakdown, cusp_error + cont_error, truncation)


# Watson's formula

@dataclasses.dataclass
class WatsonValue(object):
    """|<1, phi^3>|^2 = Lambda(1/2, sym^3) Lambda(1/2, phi)^2 / (8 Lambda(1, sym^2)^3)."""
    label: str
    t: float
    value: float
    error: float
    lambda_sym3: complex = 0j
    lambda_gl2: complex = 0j
    lambda_sym2: float = 0.0

    def asDict(self):
        return dataclasses.asdict(self)


def watson_value(form):
    if not form.isEven():
        # The root number -1 forces L(1/2, phi) = 0.
        return WatsonValue(form.label, form.t, 0.0, 0.0)
    if form.l_sym2_at_1 is None:
        raise PreconditionError('form %s has no L(1, sym^2) value' % (form.label,))
    sym3, e3 = _completed(lfunctions.sym3_descriptor(form), 0.5)
    gl2, e1 = _log_gl2(form, 0.5)
    # Lambda(1, sym^2) = L(1, sym^2) / cosh(pi t)
    log_sym2 = math.log(form.l_sym2_at_1) - _log_cosh(math.pi * form.t)
    log_value = sym3 + 2 * gl2 - math.log(8) - 3 * log_sym2
    value = _exp(log_value)
    error = abs(value) * (e3 + 2 * e1) + abs(value.imag)
    log.debug('Watson %s: %.6g +- %.3g' % (form.label, value.real, error))
    return WatsonValue(form.label, form.t, value.real, error, _exp(sym3), _exp(gl2),
                       math.exp(log_sym2))
