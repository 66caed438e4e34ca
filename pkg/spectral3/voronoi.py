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

"""Balanced degree-4 Voronoi summation for Phi = phi + phi and E4.

Both sides of

    sum_n A(n, m, 1) e(abar n / c) W(n)
        = Res + (c/2) sum_{d1 | mc} sum_{d2 | mc/d1} sum_{n != 0}
              A(d1, d2, n) Kl(a, n, c; m, 1, d1, d2) / (|n| d1 d2)
              * W_F(n d2^2 d1^3 / (c^4 m^2))

are evaluated numerically.  W_F is a Mellin-Barnes integral over a
vertical line left of Re s = 1, summed with the trapezoid rule; the
residue is a contour integral around the poles of the additively twisted
L-function.
"""

import dataclasses
import functools
import logging
import math

import numpy as np

from spectral3 import arithmetic
from spectral3 import lfunctions
from spectral3 import special
from spectral3.coefficients import CoefficientTable
from spectral3.errors import (AccuracyError, ConfigError, NumericalError,
                              PoleError, PreconditionError)
from spectral3.report import Timer, VerificationReport

log = logging.getLogger('spectral3.voronoi')

VORONOI_KINDS = ('Phi', 'E4')
DEFAULT_ABSCISSA = -0.5
TAIL_ABSCISSAE = (-4.0, -8.0, -12.0)
SCAN_STEP = 0.25
SCAN_START = 16.0
SCAN_LIMIT = 4096.0
SCAN_EDGE = 8
TRUNCATION_TOL = 1e-17
STEP_SCALE = 0.6
LOG_BUCKET = 4.0
KERNEL_BLOCK = 2 ** 21
DUAL_TAIL_TOL = 1e-12
DUAL_MAX_TERMS = 4 * 10 ** 5
QUADRATURE_SAMPLE = 64
VORONOI_TOL = 1e-5
MAX_C = 12
MAX_M = 4
MAX_SCALE = 1e3


def _parity_sign(parity):
    if parity not in ('even', 'odd'):
        raise PreconditionError('parity must be even or odd, got %s' % (parity,))
    return 1 if parity == 'even' else -1


def _shifts(kind, t_phi):
    if kind == 'E4':
        return (0.0, 0.0, 0.0, 0.0)
    if kind == 'Phi':
        it = 1j * t_phi
        return (it, -it, it, -it)
    raise PreconditionError('Voronoi kind must be Phi or E4, got %s' % (kind,))


def g_shifts(kind, sign, t_phi=0.0, parity='even'):
    """The four gamma shifts of G_{+-}; an odd form swaps the two signs."""
    if sign not in (1, -1):
        raise PreconditionError('sign must be +1 or -1, got %s' % (sign,))
    kappa = 0 if sign * _parity_sign(parity) > 0 else 1
    return tuple(kappa + mu for mu in _shifts(kind, t_phi))


def log_g_factor(kind, sign, s, t_phi=0.0, parity='even'):
    """log G_{+-}(s)."""
    shifts = g_shifts(kind, sign, t_phi, parity)
    s = np.asarray(s, dtype=complex)
    return (lfunctions.log_gamma_factor(1 - s, shifts)
            - lfunctions.log_gamma_factor(s, shifts))


def g_factor(kind, sign, s, t_phi=0.0, parity='even'):
    """pi^(4s-2) times the ratio of the four dual gamma factors to the four direct ones."""
    scalar = np.ndim(s) == 0
    out = np.exp(log_g_factor(kind, sign, s, t_phi, parity))
    return complex(out) if scalar else out


def mellin(window, s):
    """W~(s), the Mellin transform of a window."""
    return window.mellin(s)


def _log_reach(window):
    lo, hi = window.support()
    if lo <= 0:
        raise PreconditionError('Voronoi windows must be supported away from 0')
    return max(abs(math.log(lo / window.scale)), abs(math.log(hi / window.scale)))


def _scan(f, tol=TRUNCATION_TOL):
    """The t-range outside which |f(t)| stays below tol of its peak."""
    half = SCAN_START
    while True:
        # Offset grid: the gamma ratio has removable zeros at t = 0 on some lines.
        t = np.arange(-half + SCAN_STEP / 2, half, SCAN_STEP)
        mag = np.abs(f(t))
        if not np.all(np.isfinite(mag)):
            raise NumericalError('Mellin-Barnes integrand is not finite on |t| <= %s' % (half,))
        peak = mag.max()
        if peak == 0:
            return -SCAN_STEP, SCAN_STEP, 0.0
        edge = max(mag[:SCAN_EDGE].max(), mag[-SCAN_EDGE:].max()) / peak
        if edge <= tol:
            live = np.nonzero(mag > tol * peak)[0]
            lo = t[max(live[0] - 1, 0)]
            hi = t[min(live[-1] + 1, len(t) - 1)]
            return lo, hi, edge
        if half >= SCAN_LIMIT:
            raise AccuracyError(edge, 'Mellin-Barnes integrand still at %.2e of its peak '
                                'at |t| = %s' % (edge, half))
        half *= 2


class ContourTransform(object):
    """W_{+-}(x) = (1/2 pi i) int W~(s) G_{+-}(s) x^s ds on Re s = abscissa.

    The line integral is a trapezoid sum whose step is set from the
    largest |log(x N)| the transform will be asked for (log_range), the
    window's logarithmic reach and the growth of the gamma ratio.
    """

    def __init__(self, kind, sign, window, t_phi=0.0, parity='even',
                 abscissa=DEFAULT_ABSCISSA, log_range=0.0, tol=TRUNCATION_TOL):
        self.log = logging.getLogger('spectral3.voronoi.ContourTransform')
        if abscissa >= 1:
            raise PreconditionError('The contour must lie left of Re s = 1, got %s' % (abscissa,))
        self.kind = kind
        self.sign = sign
        self.abscissa = abscissa

        def integrand(t):
            s = abscissa + 1j * np.asarray(t, dtype=float)
            return np.asarray(window.mellin(s)) * g_factor(kind, sign, s, t_phi, parity)

        t_lo, t_hi, edge = _scan(integrand, tol)
        reach = _log_reach(window)
        height = max(abs(t_lo), abs(t_hi))
        h = STEP_SCALE / (2.0 + log_range + reach + 4 * math.log(2.0 + height + abs(t_phi)))
        count = int(math.ceil((t_hi - t_lo) / h))
        t = t_lo + h * np.arange(count + 1)
        self.nodes = abscissa + 1j * t
        self.weights = h / (2 * math.pi) * integrand(t)
        self.step = h
        self.bound = float(np.abs(self.weights).sum())
        self.tail = edge * self.bound
        self.log.debug('%s%s line Re s = %s: %s nodes, |t| <= %.1f, step %.3e' % (
            kind, '+' if sign > 0 else '-', abscissa, len(t), height, h))

    def _apply(self, x, nodes, weights):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        logx = np.log(x)
        out = np.empty(len(x), dtype=complex)
        block = max(1, KERNEL_BLOCK // max(len(nodes), 1))
        for i in range(0, len(x), block):
            out[i:i + block] = np.exp(np.multiply.outer(logx[i:i + block], nodes)) @ weights
        return out

    def __call__(self, x):
        scalar = np.ndim(x) == 0
        out = self._apply(x, self.nodes, self.weights)
        return complex(out[0]) if scalar else out

    def coarse(self, x):
        """The same rule with every other node (twice the step)."""
        scalar = np.ndim(x) == 0
        out = self._apply(x, self.nodes[::2], 2 * self.weights[::2])
        return complex(out[0]) if scalar else out

    def envelope(self, x):
        """|W(x)| <= bound * x^abscissa."""
        return self.bound * np.asarray(x, dtype=float) ** self.abscissa


@functools.lru_cache(maxsize=128)
def _transform(kind, sign, window, t_phi, parity, abscissa, log_range, tol=TRUNCATION_TOL):
    return ContourTransform(kind, sign, window, t_phi, parity, abscissa, log_range, tol)


def _log_bucket(x, scale):
    spread = float(np.max(np.abs(np.log(np.asarray(x, dtype=float) * scale))))
    return LOG_BUCKET * math.ceil(spread / LOG_BUCKET)


def w_transform(kind, sign, x, window, t_phi=0.0, parity='even', abscissa=DEFAULT_ABSCISSA,
                tol=TRUNCATION_TOL):
    """W_{+}(x), W_{-}(x) for sign = +1, -1 and x > 0; W_F(x) for sign = 0.

    W_F(x) = W_+(x) - W_-(x) for x > 0 and W_+(|x|) + W_-(|x|) for x < 0.
    """
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x == 0):
        raise PreconditionError('w_transform is undefined at x = 0')
    if sign not in (1, -1, 0):
        raise PreconditionError('sign must be +1, -1 or 0, got %s' % (sign,))
    if sign and np.any(x < 0):
        raise PreconditionError('W_+ and W_- take x > 0; use sign 0 for negative x')
    ax = np.abs(x)
    bucket = _log_bucket(ax, window.scale)
    if sign:
        out = _transform(kind, sign, window, t_phi, parity, abscissa, bucket, tol)(ax)
    else:
        wp = _transform(kind, 1, window, t_phi, parity, abscissa, bucket, tol)(ax)
        wm = _transform(kind, -1, window, t_phi, parity, abscissa, bucket, tol)(ax)
        out = np.where(x > 0, wp - wm, wp + wm)
    return complex(out[0]) if scalar else out


def _q_poly(alpha):
    """Coefficients of (1 - X)^4 sum_j d4(p^(alpha + j)) X^j, a cubic in X."""
    coeffs = []
    for i in range(4):
        coeffs.append(sum((-1) ** l * math.comb(4, l) * math.comb(alpha + i - l + 3, 3)
                          for l in range(i + 1)))
    return coeffs


def _g4(s, q):
    """The finite Euler-type factor G_4(s, q) of the E4 singular part."""
    total = np.zeros_like(s)
    for ell in arithmetic.divisors(q):
        mu_ell = arithmetic.mobius(ell)
        if mu_ell == 0:
            continue
        inner = np.zeros_like(s)
        for kap in arithmetic.divisors(ell):
            mu_kap = arithmetic.mobius(kap)
            if mu_kap == 0:
                continue
            prod = np.ones_like(s)
            rest = q * kap // ell
            for p, alpha in (arithmetic.factorize(rest) if rest > 1 else ()):
                x = np.exp(-s * math.log(p))
                prod = prod * np.polyval(_q_poly(alpha)[::-1], x)
            inner = inner + mu_kap * np.exp(-s * math.log(kap)) * prod
        total = total + mu_ell / arithmetic.euler_phi(ell) * np.exp(s * math.log(ell)) * inner
    return total


def _reduced_twists(m, c, a):
    """(mu(d) mu(e), d, e, c', b) for the decomposition of the twisted series.

    The twist e(abar d e n / c) reduces to e(b n / c') with c' = c / (de, c).
    """
    abar = arithmetic.mod_inverse(a, c) if c > 1 else 0
    for d in arithmetic.divisors(m):
        mu_d = arithmetic.mobius(d)
        if mu_d == 0:
            continue
        for e in arithmetic.divisors(d):
            mu_e = arithmetic.mobius(e)
            if mu_e == 0:
                continue
            g = math.gcd(d * e, c)
            cp = c // g
            yield mu_d * mu_e, d, e, cp, (abar * (d * e // g)) % cp


def _check_singular_domain(s):
    if np.any(s.real <= 0):
        raise PreconditionError('singular_part needs Re s > 0')
    if np.any(s == 1):
        raise PoleError(1, 'singular_part has its pole at s = 1')


def singular_part(s, m, c):
    """The polar part L(s; m, c) of the additively twisted E4 series.

    Written as zeta(s)^4 times finite divisor sums, so it is independent of
    the twist numerator.  When d e does not divide c the twist reduces to
    modulus c / (de, c) and the power of c is adjusted accordingly.
    """
    scalar = np.ndim(s) == 0
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    _check_singular_domain(s)
    tau = CoefficientTable('E4')
    total = np.zeros_like(s)
    for mu, d, e, cp, _ in _reduced_twists(m, c, 1):
        coef = mu * tau(1, m // d, d // e)
        total = total + coef * np.exp(-s * math.log(d * e * cp)) * _g4(s, cp)
    out = special.zeta(s) ** 4 * total
    return complex(out[0]) if scalar else out


def _hurwitz_twist(kappa, s, b, q):
    """sum over a1..a4 mod q of e(b a1 a2 a3 a4 / q) prod zeta(s + kappa_i, a_i, q)."""
    cache = {}

    def column(k):
        if k not in cache:
            cache[k] = np.array([special.hurwitz_zeta(s + k, a, q) for a in range(1, q + 1)])
        return cache[k]

    dist = np.zeros((q,) + s.shape, dtype=complex)
    first = column(kappa[0])
    for a in range(1, q + 1):
        dist[a % q] += first[a - 1]
    for k in kappa[1:]:
        z = column(k)
        new = np.zeros_like(dist)
        for r in range(q):
            for a in range(1, q + 1):
                new[(r * a) % q] += dist[r] * z[a - 1]
        dist = new
    phases = np.array([arithmetic.e_of(b * r / q) for r in range(q)])
    return np.tensordot(phases, dist, axes=1)


def _twist_shifts(kind, form):
    if kind == 'E4':
        return (0.0, 0.0, 0.0, 0.0)
    if form is None or not form.isEisenstein():
        raise PreconditionError('The Hurwitz construction of the Phi series needs an '
                                'Eisenstein-degenerate form')
    nu = form.t
    return (-1j * nu, -1j * nu, 1j * nu, 1j * nu)


def twisted_series(kind, s, m, c, a, form=None):
    """L(s, F, a/c; m, 1) = sum A(n, m, 1) e(abar n / c) n^-s, continued through Hurwitz zeta.

    Available for E4 and for Phi built from an Eisenstein-degenerate form,
    whose degree-one pieces are shifted zeta functions.
    """
    scalar = np.ndim(s) == 0
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    if math.gcd(a, c) != 1:
        raise PreconditionError('Twist numerator %s is not coprime to %s' % (a, c))
    kappa = _twist_shifts(kind, form)
    table = CoefficientTable(kind, form)
    total = np.zeros_like(s)
    for mu, d, e, cp, b in _reduced_twists(m, c, a):
        coef = mu * table(d // e, m // d, 1)
        total = total + coef * np.exp(-s * math.log(d * e)) * _hurwitz_twist(kappa, s, b, cp)
    return complex(total[0]) if scalar else total


@dataclasses.dataclass(frozen=True)
class VoronoiCase(object):
    kind: str
    m: int
    c: int
    a: int
    window: object
    form: object = None

    def __post_init__(self):
        if self.kind not in VORONOI_KINDS:
            raise PreconditionError('Voronoi kind must be Phi or E4, got %s' % (self.kind,))
        if self.m < 1 or self.c < 1:
            raise PreconditionError('m and c must be positive')
        if math.gcd(self.a, self.c) != 1:
            raise PreconditionError('gcd(a, c) = %s, need 1' % (math.gcd(self.a, self.c),))
        if self.kind == 'Phi' and self.form is None:
            raise PreconditionError('kind Phi needs a form')
        _log_reach(self.window)

    @property
    def abar(self):
        return arithmetic.mod_inverse(self.a, self.c)

    @property
    def t_phi(self):
        return self.form.t if self.kind == 'Phi' else 0.0

    @property
    def parity(self):
        return self.form.parity if self.kind == 'Phi' else 'even'

    def poles(self):
        if self.kind == 'E4':
            return [1.0 + 0j]
        if not self.form.isEisenstein():
            return []
        return [1 + 1j * self.form.t, 1 - 1j * self.form.t]

    def asDict(self):
        return {'kind': self.kind, 'm': self.m, 'c': self.c, 'a': self.a,
                'window': repr(self.window),
                'form': self.form.label if self.form is not None else None}


def _polar_function(case):
    if case.kind == 'E4':
        return lambda z: singular_part(z, case.m, case.c)
    return lambda z: twisted_series('Phi', z, case.m, case.c, case.a, case.form)


def residue_term(case, radius=lfunctions.RESIDUE_RADIUS, nodes=lfunctions.RESIDUE_NODES):
    """Res W~(s) L(s, F, a/c; m, 1) summed over the poles, by circle quadrature."""
    poles = case.poles()
    if not poles:
        return 0j
    polar = _polar_function(case)
    theta = 2 * math.pi * np.arange(nodes) / nodes
    total = 0j
    for cluster in lfunctions.pole_clusters(poles):
        center = sum(cluster) / len(cluster)
        rad = max(abs(p - center) for p in cluster) + radius
        others = [p for p in poles if p not in cluster]
        room = min([abs(p - center) for p in others] + [center.real if case.kind == 'E4'
                                                        else math.inf])
        if rad >= room:
            raise ConfigError('Residue contour of radius %s around %s touches another '
                              'singularity' % (rad, center))
        z = center + rad * np.exp(1j * theta)
        values = np.asarray(case.window.mellin(z)) * polar(z)
        total += complex(np.mean(values * (z - center)))
    return total


def residue_envelope(u, R, T, N, A=2.0, eps=0.0):
    """T^eps (N / R) (u N / (R T))^-A."""
    if min(u, R, T, N) <= 0:
        raise PreconditionError('residue_envelope needs positive arguments')
    return T ** eps * (N / R) * (u * N / (R * T)) ** (-A)


def _tail_log(log_pref, sigma, L):
    """log of beta * int_L^inf exp(-a u) (1 + u)^3 du with a = -sigma, beta = 1 - sigma."""
    a = -sigma
    poly = sum(math.factorial(3) / math.factorial(3 - j) * (1 + L) ** (3 - j) / a ** (j + 1)
               for j in range(4))
    return log_pref + math.log(1 - sigma) - a * L + math.log(poly)


def _dual_length(log_prefs, target):
    """Smallest n0 whose dual tail bound is below target, over the tail abscissae.

    The bound sums d4(n) n^(sigma - 1) beyond n0 by partial summation with
    sum_{n <= t} d4(n) <= t (1 + log t)^3.
    """
    log_target = math.log(target)
    log_max = math.log(DUAL_MAX_TERMS)
    best = None
    for sigma, log_pref in log_prefs.items():
        if _tail_log(log_pref, sigma, log_max) > log_target:
            continue
        lo, hi = 0.0, log_max
        if _tail_log(log_pref, sigma, lo) <= log_target:
            hi = lo
        for _ in range(60):
            if hi - lo < 1e-3:
                break
            mid = 0.5 * (lo + hi)
            if _tail_log(log_pref, sigma, mid) <= log_target:
                hi = mid
            else:
                lo = mid
        n0 = max(1, int(math.ceil(math.exp(hi))))
        bound = math.exp(_tail_log(log_pref, sigma, math.log(n0)))
        if best is None or n0 < best[0]:
            best = (n0, bound, sigma)
    if best is None:
        least = min(math.exp(_tail_log(lp, sg, log_max)) for sg, lp in log_prefs.items())
        raise AccuracyError(least, 'Dual Voronoi sum needs more than %s terms' % (
            DUAL_MAX_TERMS,))
    return best


def _direct_side(case, table):
    lo, hi = case.window.support()
    n_hi = int(math.floor(hi))
    if n_hi < 1:
        return 0j, 0
    n = np.arange(1, n_hi + 1)
    coeffs = table.column(n_hi, case.m, 1)[1:]
    twist = arithmetic.e_array((case.abar * n % case.c) / case.c)
    return complex(np.sum(coeffs * twist * case.window(n))), n_hi


def _dual_side(case, table, abscissa, target):
    m, c = case.m, case.c
    N = case.window.scale
    args = (case.window, case.t_phi, case.parity)
    tails = {sigma: (_transform(case.kind, 1, args[0], args[1], args[2], sigma, 0.0).bound
                     + _transform(case.kind, -1, args[0], args[1], args[2], sigma, 0.0).bound)
             for sigma in TAIL_ABSCISSAE}
    tau = CoefficientTable('E4')
    total = 0j
    terms = 0
    tail = 0.0
    quadrature = 0.0
    for d1 in arithmetic.divisors(m * c):
        for d2 in arithmetic.divisors(m * c // d1):
            r = d2 ** 2 * d1 ** 3 / (c ** 4 * m ** 2)
            kl = arithmetic.hyper_kloosterman_table(case.a, c, m, 1, d1, d2)
            kmax = float(np.abs(kl).max())
            if kmax < 1e-9:
                continue
            a_bound = tau(1, d2, d1)
            log_prefs = {sigma: math.log(c * kmax * a_bound * mass / (d1 * d2)) + sigma * math.log(r)
                         for sigma, mass in tails.items()}
            n0, bound, sigma = _dual_length(log_prefs, target)
            n = np.arange(1, n0 + 1)
            x = n * r
            bucket = _log_bucket(x[[0, -1]], N)
            wp_t = _transform(case.kind, 1, args[0], args[1], args[2], abscissa, bucket)
            wm_t = _transform(case.kind, -1, args[0], args[1], args[2], abscissa, bucket)
            wp = wp_t(x)
            wm = wm_t(x)
            klp = kl[n % len(kl)]
            klm = kl[(-n) % len(kl)]
            w = table.column(n0, d2, d1)[1:] / (n * d1 * d2)
            total += np.sum(w * (klp * (wp - wm) + klm * (wp + wm)))
            k = min(n0, QUADRATURE_SAMPLE)
            dp = np.abs(wp[:k] - wp_t.coarse(x[:k]))
            dm = np.abs(wm[:k] - wm_t.coarse(x[:k]))
            quadrature += float(np.sum(np.abs(w[:k]) * (np.abs(klp[:k]) + np.abs(klm[:k]))
                                       * (dp + dm)))
            terms += n0
            tail += bound
            log.debug('d1=%s d2=%s: %s dual terms, tail %.2e on Re s = %s' % (
                d1, d2, n0, bound, sigma))
    return c / 2 * total, {'dual_terms': terms, 'dual_tail': tail,
                           'quadrature': c / 2 * quadrature}


def _checkDeskScale(case):
    if case.c > MAX_C or case.m > MAX_M:
        raise PreconditionError('verify_voronoi covers c <= %s and m <= %s, got c=%s m=%s' % (
            MAX_C, MAX_M, case.c, case.m))
    if case.window.scale > MAX_SCALE:
        raise PreconditionError('verify_voronoi covers window scales <= %s, got %s' % (
            MAX_SCALE, case.window.scale))


def verify_voronoi(case, include_residue=True, tolerance=VORONOI_TOL,
                   abscissa=DEFAULT_ABSCISSA, tail_tol=DUAL_TAIL_TOL):
    """Evaluate both sides of the Voronoi formula for one case.

    With include_residue=False the polar term is left out, which for E4
    leaves the main term of the sum unaccounted for.
    """
    _checkDeskScale(case)
    with Timer() as timer:
        table = CoefficientTable.cached(case.kind, case.form)
        lhs, lhs_terms = _direct_side(case, table)
        residue = residue_term(case) if include_residue else 0j
        target = tail_tol * max(abs(lhs), abs(residue), 1.0)
        dual, info = _dual_side(case, table, abscissa, target)
        table.persist()
        rhs = residue + dual
    info['lhs_terms'] = lhs_terms
    log.info('voronoi %s m=%s c=%s a=%s: lhs %s rhs %s (%s dual terms)' % (
        case.kind, case.m, case.c, case.a, lhs, rhs, info['dual_terms']))
    return VerificationReport.compare(
        'voronoi', lhs, rhs, tolerance, inputs=case.asDict(), runtime=timer.elapsed,
        truncation=info, details={'residue': residue, 'include_residue': include_residue,
                                  'dual': dual, 'abscissa': abscissa})
