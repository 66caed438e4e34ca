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

"""Euler-product L-functions: gamma factors and the approximate functional equation.

A completed L-function is Lambda(s) = gamma(s) L(s) with
gamma(s) = pi^(-d s / 2) prod_j Gamma((s + mu_j) / 2), the shifts mu_j
carrying the parity (+1 for odd archimedean type).  Values are computed from

  Lambda(s0) = sum a_n n^-s0 I(n) + eps sum conj(a_n) n^-(1-s0) I~(n) - R

with I(y) = (1/2 pi i) int gamma(s0 + w) G(w) y^-w dw / w, G(w) = exp(b w^2),
and R the residues of Lambda(s0 + w) G(w) / w at the poles of Lambda.
"""

import dataclasses
import functools
import logging
import math
import typing

import numpy as np

from spectral3 import arithmetic
from spectral3 import coefficients
from spectral3 import special
from spectral3 import windows
from spectral3.errors import AccuracyError, PoleError, PreconditionError, RangeError

log = logging.getLogger('spectral3.lfunctions')

# G(w) = exp(b w^2); the default reaches the AFE length within short prime tables.
AFE_SMOOTHING = 1.0 / 16
AFE_ALT_SMOOTHING = 1.0 / 8
# The weight of the fourth-moment sum keeps exp(w^2).
MOMENT_SMOOTHING = 1.0
AFE_TOL = 1e-13
AFE_MAX_TERMS = 10 ** 6
NODE_FLOOR = 1e-32
KERNEL_BLOCK = 2 ** 21
RESIDUE_NODES = 256
RESIDUE_RADIUS = 0.05
POLE_CLUSTER = 0.1


def log_gamma_factor(s, shifts):
    """log of pi^(-d s / 2) prod Gamma((s + mu) / 2), vectorised over s."""
    s = np.asarray(s, dtype=complex)
    total = -0.5 * len(shifts) * s * special.LOG_PI
    for mu in shifts:
        total = total + special.log_gamma((s + mu) / 2)
    return total


def gamma_factor(s, shifts):
    value = np.exp(log_gamma_factor(s, shifts))
    if np.ndim(value) == 0:
        return complex(value)
    return value


def sym3_shifts(t_phi, delta=0):
    return (3j * t_phi + delta, -3j * t_phi + delta, 1j * t_phi + delta, -1j * t_phi + delta)


def rs16_shifts(t1, t2):
    s1 = sym3_shifts(t1)
    s2 = sym3_shifts(t2)
    return tuple(a + b for a in s1 for b in s2)


def gamma_factor_sym3(s, t_phi):
    """pi^(-2s) prod Gamma((s +- 3it)/2) Gamma((s +- it)/2)."""
    return gamma_factor(s, sym3_shifts(t_phi))


def gamma_factor_rs16(s, t1, t2):
    """Degree-16 gamma factor of sym^3 phi_1 x sym^3 phi_2."""
    return gamma_factor(s, rs16_shifts(t1, t2))


@dataclasses.dataclass(frozen=True)
class ConductorRatio(object):
    ratio: float
    envelope: float
    log_ratio: float
    log_envelope: float

    def asDict(self):
        return dataclasses.asdict(self)


def conductor_ratio(t1, t2, eps, t):
    """|gamma(1 + eps + it) / gamma(-eps - it)| for the degree-16 factor.

    Returned with the envelope (T^12 Delta^4)^(1/2), T = min(t1, t2) and
    Delta = |t1 - t2| + 1.
    """
    T = min(t1, t2)
    if abs(t) > 10 or T < 10:
        raise RangeError('conductor_ratio needs |t| <= 10 and min(t1, t2) >= 10')
    shifts = rs16_shifts(t1, t2)
    num = log_gamma_factor(1 + eps + 1j * t, shifts)
    den = log_gamma_factor(-eps - 1j * t, shifts)
    log_ratio = float((num - den).real)
    delta = abs(t1 - t2) + 1
    log_env = 0.5 * (12 * math.log(T) + 4 * math.log(delta))
    return ConductorRatio(math.exp(log_ratio), math.exp(log_env), log_ratio, log_env)


def euler_coefficients(local_params, n_max):
    """Dirichlet coefficients of prod_p prod_i (1 - x_i(p) p^-s)^-1 up to n_max.

    local_params(p) gives the multiset x_i(p); a(p^k) is its complete
    homogeneous polynomial of degree k.
    """
    spf = arithmetic.spf_sieve(n_max)
    out = np.zeros(n_max + 1, dtype=complex)
    if n_max >= 1:
        out[1] = 1
    local = {}
    for n in range(2, n_max + 1):
        p = int(spf[n])
        m = n
        k = 0
        while m % p == 0:
            m //= p
            k += 1
        h = local.get(p)
        if h is None:
            k_max = int(math.floor(math.log(n_max) / math.log(p) + 1e-9))
            h = coefficients.complete_homogeneous(local_params(p), max(k_max, 1))
            local[p] = h
        out[n] = h[k] * out[m]
    return out


@dataclasses.dataclass(frozen=True)
class LFunctionDescriptor(object):
    """Gamma data, coefficient source and analytic data of one L-function.

    coefficients(n_max) returns a_0..a_n_max (a_0 unused).  closed_form, when
    present, is the exact completed Lambda(s) of a degenerate object and is
    required whenever Lambda has poles.
    """
    label: str
    degree: int
    gamma_shifts: tuple
    coefficients: typing.Callable
    root_number: complex = 1
    poles: tuple = ()
    closed_form: typing.Optional[typing.Callable] = None

    def __post_init__(self):
        if self.degree != len(self.gamma_shifts):
            raise PreconditionError('%s: degree %s with %s gamma shifts' % (
                self.label, self.degree, len(self.gamma_shifts)))
        remaining = list(self.gamma_shifts)
        for mu in self.gamma_shifts:
            partner = complex(mu).conjugate()
            match = min(range(len(remaining)), key=lambda i: abs(remaining[i] - partner),
                        default=None)
            if match is None or abs(remaining[match] - partner) > 1e-12:
                raise PreconditionError('%s: gamma shifts not closed under conjugation' % (
                    self.label,))
            remaining.pop(match)

    def logGamma(self, s):
        return log_gamma_factor(s, self.gamma_shifts)

    def gamma(self, s):
        return gamma_factor(s, self.gamma_shifts)

    def conductor(self, s=None):
        """Product of (1 + |s + mu_j|) (s = 0 when omitted)."""
        s = 0 if s is None else s
        return float(np.prod([1 + abs(s + mu) for mu in self.gamma_shifts]))

    def dualShifts(self):
        return tuple(complex(mu).conjugate() for mu in self.gamma_shifts)


def _root_number(shifts):
    odd = sum(1 for mu in shifts if abs(complex(mu).real - 1) < 1e-12)
    if odd % 2:
        raise PreconditionError('odd number of odd gamma shifts')
    return (-1) ** (odd // 2)


def _xi_product(offsets):
    def closed(s):
        s = np.asarray(s, dtype=complex)
        value = np.ones_like(s)
        for a in offsets:
            value = value * special.xi(s + a)
        if value.ndim == 0:
            return complex(value)
        return value
    return closed


def _xi_poles(offsets):
    poles = []
    for a in offsets:
        for p in (-a, 1 - a):
            if not any(abs(p - q) < 1e-12 for q in poles):
                poles.append(complex(p))
    return tuple(poles)


def zeta_descriptor():
    def coeffs(n_max):
        out = np.ones(n_max + 1, dtype=complex)
        out[0] = 0
        return out
    return LFunctionDescriptor('zeta', 1, (0j,), coeffs, 1, _xi_poles((0,)), _xi_product((0,)))


def e4_descriptor():
    def coeffs(n_max):
        return arithmetic.divisor_fn_table(4, n_max).astype(complex)
    offsets = (0, 0, 0, 0)
    return LFunctionDescriptor('E4', 4, (0j,) * 4, coeffs, 1, _xi_poles(offsets),
                               _xi_product(offsets))


def _descriptor(label, form, shifts, local_params, eisenstein_offsets):
    def coeffs(n_max):
        return euler_coefficients(local_params, n_max)
    poles = ()
    closed = None
    if form is not None and form.isEisenstein():
        poles = _xi_poles(eisenstein_offsets)
        closed = _xi_product(eisenstein_offsets)
    return LFunctionDescriptor(label, len(shifts), tuple(complex(mu) for mu in shifts),
                               coeffs, _root_number(shifts), poles, closed)


def gl2_descriptor(form):
    t, d = form.t, form.delta
    return _descriptor('L(%s)' % (form.label,), form, (1j * t + d, -1j * t + d),
                       lambda p: form.satake(p).params(), (1j * t, -1j * t))


def sym2_descriptor(form):
    t = form.t

    def params(p):
        a, b = form.satake(p).params()
        return (a * a, 1.0, b * b)
    return _descriptor('L(sym2 %s)' % (form.label,), form, (2j * t, 0, -2j * t), params,
                       (2j * t, 0, -2j * t))


def sym3_descriptor(form):
    t = form.t

    def params(p):
        a, b = form.satake(p).params()
        return (a ** 3, a, b, b ** 3)
    return _descriptor('L(sym3 %s)' % (form.label,), form, sym3_shifts(t, form.delta), params,
                       (3j * t, 1j * t, -1j * t, -3j * t))


def phi_descriptor(form):
    t, d = form.t, form.delta

    def params(p):
        a, b = form.satake(p).params()
        return (a, b, a, b)
    return _descriptor('L(Phi %s)' % (form.label,), form,
                       (1j * t + d, -1j * t + d) * 2, params, (1j * t, -1j * t) * 2)


def rankin_selberg_descriptor(form_k, form_j):
    """L(s, phi_k x phi_j) for two distinct forms."""
    if form_k.label == form_j.label and not form_k.isEisenstein():
        raise PreconditionError('Rankin-Selberg square of %s has a pole' % (form_k.label,))
    tk, tj = form_k.t, form_j.t
    d = (form_k.delta + form_j.delta) % 2
    shifts = tuple(a * tk + b * tj + d for a in (1j, -1j) for b in (1j, -1j))

    def params(p):
        ak, bk = form_k.satake(p).params()
        aj, bj = form_j.satake(p).params()
        return (ak * aj, ak * bj, bk * aj, bk * bj)

    def coeffs(n_max):
        return euler_coefficients(params, n_max)
    poles = ()
    closed = None
    if form_k.isEisenstein() and form_j.isEisenstein():
        offsets = tuple(a * tk + b * tj for a in (1j, -1j) for b in (1j, -1j))
        poles = _xi_poles(offsets)
        closed = _xi_product(offsets)
    return LFunctionDescriptor('L(%s x %s)' % (form_k.label, form_j.label), 4, shifts,
                               coeffs, _root_number(shifts), poles, closed)


def power_descriptor(desc, power):
    """L(s)^power."""
    if power == 1:
        return desc

    def coeffs(n_max):
        base = desc.coefficients(n_max)
        out = base
        for _ in range(power - 1):
            out = arithmetic.dirichlet_convolve(out, base)
        return out
    closed = None
    if desc.closed_form is not None:
        closed = lambda s: desc.closed_form(s) ** power
    return LFunctionDescriptor('%s^%s' % (desc.label, power), desc.degree * power,
                               desc.gamma_shifts * power, coeffs, desc.root_number ** power,
                               desc.poles, closed)


def descriptor_for(kind, form=None, other=None):
    builders = {'gl2': gl2_descriptor, 'sym2': sym2_descriptor, 'sym3': sym3_descriptor,
                'Phi': phi_descriptor}
    if kind == 'zeta':
        return zeta_descriptor()
    if kind == 'E4':
        return e4_descriptor()
    if kind == 'rs':
        return rankin_selberg_descriptor(form, other)
    if kind not in builders:
        raise PreconditionError('Unknown L-function kind %s' % (kind,))
    if form is None:
        raise PreconditionError('L-function kind %s needs a form' % (kind,))
    return builders[kind](form)


class AfeKernel(object):
    """V(y) = (1/2 pi i) int gamma(s0 + w)/gamma(s0) exp(b w^2) y^-w dw / w.

    The integral runs over Re w = c, |Im w| <= H, by the trapezoid rule; the
    step resolves both the pole at w = 0 (distance c from the line) and the
    oscillation of y^-w up to y_max.
    """

    def __init__(self, shifts, s0, smoothing=AFE_SMOOTHING, c=None, half_width=None,
                 y_max=AFE_MAX_TERMS):
        self.log = logging.getLogger('spectral3.lfunctions.AfeKernel')
        self.shifts = tuple(shifts)
        self.s0 = complex(s0)
        self.smoothing = smoothing
        cond = float(np.prod([1 + abs(self.s0 + mu) for mu in self.shifts]))
        self.conductor = cond
        if c is None:
            c = min(1.0, max(0.25, 1.0 / math.log(max(cond, math.e))))
        if half_width is None:
            half_width = 40 + 4 * math.log(max(cond, 1.0))
        self.c = c
        self.half_width = half_width
        rate = sum(0.5 * math.log((abs(self.s0 + mu) + half_width + 2) / 2) for mu in self.shifts)
        rate += 0.5 * len(self.shifts) * special.LOG_PI
        h = min(2 * math.pi * 0.8 * c / 38, math.pi / (2 + rate + math.log(y_max)))
        n = int(math.ceil(half_width / h))
        v = np.arange(-n, n + 1) * h
        w = c + 1j * v
        log_ratio = log_gamma_factor(self.s0 + w, self.shifts) - log_gamma_factor(self.s0, self.shifts)
        weights = h / (2 * math.pi) * np.exp(log_ratio + smoothing * w * w) / w
        size = np.abs(weights)
        keep = size > NODE_FLOOR * size.max()
        # Dropped nodes plus the integrand beyond +-H, taken as its edge value over unit length.
        self.tail = float(size[~keep].sum() + (size[0] + size[-1]) / h)
        self.even = (np.arange(-n, n + 1) % 2 == 0)[keep]
        self.nodes = w[keep]
        self.weights = weights[keep]
        self.step = h
        self.log.debug('AFE kernel s0=%s b=%s: %s nodes, step %.4g, c=%.3g' % (
            self.s0, smoothing, len(self.nodes), h, c))

    def _apply(self, y, nodes, weights):
        y = np.atleast_1d(np.asarray(y, dtype=float))
        logy = np.log(y)
        out = np.empty(len(y), dtype=complex)
        block = max(1, KERNEL_BLOCK // max(len(nodes), 1))
        for i in range(0, len(y), block):
            out[i:i + block] = np.exp(-np.multiply.outer(logy[i:i + block], nodes)) @ weights
        return out

    def __call__(self, y):
        scalar = np.ndim(y) == 0
        out = self._apply(y, self.nodes, self.weights)
        return complex(out[0]) if scalar else out

    def coarse(self, y):
        """The same rule on every other node."""
        scalar = np.ndim(y) == 0
        out = self._apply(y, self.nodes[self.even], 2 * self.weights[self.even])
        return complex(out[0]) if scalar else out

    def length(self, tol=AFE_TOL, y_cap=AFE_MAX_TERMS):
        """Smallest integer N with |V(y)| < tol for all scanned y > N, and a tail estimate."""
        grid = 2.0 ** (np.arange(0, 4 * math.log2(y_cap) + 1) / 4)
        vals = np.abs(self(grid))
        big = np.nonzero(vals >= tol)[0]
        if len(big) and big[-1] == len(grid) - 1:
            raise AccuracyError(float(vals[-1]), 'AFE weight still %g at y=%g' % (
                vals[-1], grid[-1]))
        last = big[-1] + 1 if len(big) else 0
        n = int(math.ceil(grid[last]))
        sigma = self.s0.real
        beyond = grid > n
        logs = np.log(np.maximum(grid[beyond], 2.0))
        tail = float(np.sum(vals[beyond] * grid[beyond] ** (1 - sigma)
                            * logs ** (len(self.shifts) - 1)) * math.log(2) / 4)
        return n, tail


@functools.lru_cache(maxsize=64)
def _cached_kernel(shifts, s0, smoothing, c, half_width):
    return AfeKernel(shifts, s0, smoothing, c, half_width)


@dataclasses.dataclass
class AfeValue(object):
    label: str
    s: complex
    value: complex
    completed: complex
    terms: int
    dual_terms: int
    tail: float
    quadrature_error: float
    consistency: float
    residue: complex = 0j

    @property
    def error(self):
        return self.tail + self.quadrature_error + self.consistency

    def asDict(self):
        d = dataclasses.asdict(self)
        d['error'] = self.error
        return d


def pole_clusters(poles):
    clusters = []
    for p in poles:
        for cluster in clusters:
            if min(abs(p - q) for q in cluster) < POLE_CLUSTER:
                cluster.append(p)
                break
        else:
            clusters.append([p])
    return clusters


def _residue_sum(desc, s0, smoothing):
    """Sum of residues of Lambda(s0 + w)/gamma(s0) exp(b w^2)/w at the poles of Lambda."""
    if not desc.poles:
        return 0j
    if desc.closed_form is None:
        raise PreconditionError('%s has poles but no closed form' % (desc.label,))
    log_g0 = complex(desc.logGamma(s0))
    total = 0j
    theta = 2 * math.pi * np.arange(RESIDUE_NODES) / RESIDUE_NODES
    for cluster in pole_clusters(desc.poles):
        center = sum(cluster) / len(cluster)
        spread = max(abs(p - center) for p in cluster)
        radius = spread + RESIDUE_RADIUS
        others = [p for p in desc.poles if p not in cluster]
        room = min([abs(s0 - center)] + [abs(p - center) for p in others])
        if room <= spread + 1e-3:
            raise PoleError(s0, 'Evaluation point %s sits on a pole of %s' % (s0, desc.label))
        radius = min(radius, 0.5 * (spread + room))
        z = center + radius * np.exp(1j * theta)
        w = z - s0
        f = desc.closed_form(z) * np.exp(smoothing * w * w - log_g0) / w
        total += complex(np.mean(f * (z - center)))
    return total


def _check_strip(desc, s0):
    lo = min((s0 + mu).real for mu in desc.gamma_shifts)
    lo_dual = min((1 - s0 + mu).real for mu in desc.dualShifts())
    if lo < 0 or lo_dual < 0:
        raise PreconditionError('%s: s=%s lies left of the gamma-factor poles' % (
            desc.label, s0))


def _afe(desc, s0, smoothing, n_max, c, half_width, tol):
    kernel = _cached_kernel(desc.gamma_shifts, s0, smoothing, c, half_width)
    dual = _cached_kernel(desc.dualShifts(), 1 - s0, smoothing, c, half_width)
    if n_max is None:
        n1, tail1 = kernel.length(tol)
        n2, tail2 = dual.length(tol)
    else:
        n1 = n2 = n_max
        tail1 = tail2 = 0.0
    n1 = max(n1, 1)
    n2 = max(n2, 1)
    a = desc.coefficients(max(n1, n2))
    n = np.arange(1, n1 + 1, dtype=float)
    terms = a[1:n1 + 1] * np.exp(-s0 * np.log(n))
    v = kernel(n)
    first = np.sum(terms * v)
    quad = np.sum(np.abs(terms) * np.abs(v - kernel.coarse(n)))
    nd = np.arange(1, n2 + 1, dtype=float)
    dual_terms = np.conj(a[1:n2 + 1]) * np.exp(-(1 - s0) * np.log(nd))
    vd = dual(nd)
    second = np.sum(dual_terms * vd)
    quad += np.sum(np.abs(dual_terms) * np.abs(vd - dual.coarse(nd)))
    ratio = np.exp(desc.logGamma(1 - s0) - desc.logGamma(s0))
    residue = _residue_sum(desc, s0, smoothing)
    value = complex(first + desc.root_number * ratio * second - residue)
    tail = (tail1 + abs(ratio) * tail2 + kernel.tail * np.sum(np.abs(terms))
            + abs(ratio) * dual.tail * np.sum(np.abs(dual_terms)))
    return value, n1, n2, float(tail), float(quad), residue


def l_value(desc, s, smoothing=AFE_SMOOTHING, n_max=None, check_consistency=True,
            c=None, half_width=None, tol=AFE_TOL):
    """L(s) and Lambda(s) by the approximate functional equation.

    consistency is the spread between two smoothing functions; it vanishes
    for coefficients that satisfy the functional equation and measures the
    failure otherwise.
    """
    s = complex(s)
    _check_strip(desc, s)
    value, n1, n2, tail, quad, residue = _afe(desc, s, smoothing, n_max, c, half_width, tol)
    consistency = 0.0
    if check_consistency:
        alt = AFE_ALT_SMOOTHING if smoothing != AFE_ALT_SMOOTHING else AFE_SMOOTHING
        alt_value = _afe(desc, s, alt, n_max, c, half_width, tol)[0]
        consistency = abs(alt_value - value)
    completed = value * complex(np.exp(desc.logGamma(s)))
    log.debug('%s at %s: %s terms, dual %s, error %.3g' % (
        desc.label, s, n1, n2, tail + quad + consistency))
    return AfeValue(desc.label, s, value, completed, n1, n2, tail, quad, consistency, residue)


def afe_weight(y, t_phi, power=4, delta=0, c=None, half_width=None):
    """The weight of the power-th moment AFE for sym^3 at the centre.

    V(y) = (1/2 pi i) int (gamma_sym3(1/2 + s)/gamma_sym3(1/2))^power e^(s^2) y^-s ds/s.
    """
    if power not in (1, 4, 5):
        raise PreconditionError('afe_weight power must be 1, 4 or 5, got %s' % (power,))
    if np.any(np.asarray(y) <= 0):
        raise PreconditionError('afe_weight needs y > 0')
    kernel = _cached_kernel(sym3_shifts(t_phi, delta) * power, 0.5 + 0j, MOMENT_SMOOTHING,
                            c, half_width)
    return kernel(y)


def central_sym3(form, truncation=None, power=1, smoothing=AFE_SMOOTHING, half_width=None):
    """L(1/2, sym^3 phi)^power by the approximate functional equation.

    smoothing=MOMENT_SMOOTHING gives the exp(s^2) weight of the moment sums,
    whose slow log-normal decay needs Hecke data far past the fixture tables.
    """
    desc = power_descriptor(sym3_descriptor(form), power)
    return l_value(desc, 0.5, smoothing=smoothing, n_max=truncation, half_width=half_width)


DIRICHLET_KINDS = ('zeta', 'gl2', 'sym3', 'Phi', 'E4', 'lfour', 'rankin')


def _double_sum_coefficients(kind, form, other, k_max):
    """c_k = sum over m^2 n = k of A(n, m, 1) lambda_j(n)."""
    lam_j = euler_coefficients(lambda p: other.satake(p).params(), k_max).real
    out = np.zeros(k_max + 1)
    lam = None
    if kind == 'rankin':
        lam = coefficients.CoefficientTable('gl2', form)
    m = 1
    while m * m <= k_max:
        for n in range(1, k_max // (m * m) + 1):
            if kind == 'lfour':
                a = coefficients.tau_e4(n, m)
            else:
                a = coefficients.a_phi(form, n, m, lam=lam)
            out[m * m * n] += a * lam_j[n]
        m += 1
    return out


def dirichlet_partial(kind, s, window, N, form=None, other=None):
    """sum over k of c_k k^-s W(k / N) for the named coefficient family.

    lfour and rankin are the double sums over m^2 n of tau_E4(n, m) lambda_j(n)
    and A_Phi(n, m, 1) lambda_j(n), with phi from form and phi_j from other.
    """
    if kind not in DIRICHLET_KINDS:
        raise PreconditionError('Unknown Dirichlet kind %s' % (kind,))
    scaled = window.withScale(N) if isinstance(window, windows.SmoothWindow) else window
    k_max = int(math.floor(scaled.support()[1]))
    if k_max < 1:
        return 0j
    if kind in ('lfour', 'rankin'):
        if other is None or (kind == 'rankin' and form is None):
            raise PreconditionError('Dirichlet kind %s needs form data' % (kind,))
        coeffs = _double_sum_coefficients(kind, form, other, k_max)
    else:
        coeffs = descriptor_for(kind, form).coefficients(k_max)
    k = np.arange(1, k_max + 1, dtype=float)
    w = scaled(k)
    terms = coeffs[1:] * w * np.exp(-complex(s) * np.log(k))
    return complex(math.fsum(terms.real) + 1j * math.fsum(terms.imag))
