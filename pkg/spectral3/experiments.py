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

"""Desk-scale experiments: the cubic-moment variance and spectral large sieves.

Everything here is reported against its asymptotic envelope; nothing is
asserted as a bound.  The only hard checks are inequalities that hold for
every finite family (Hoelder, Cauchy-Schwarz) and the duality test.
"""

import dataclasses
import fractions
import logging
import math

import numpy as np
import scipy.integrate

from spectral3 import arithmetic
from spectral3 import coefficients
from spectral3 import forms as forms_mod
from spectral3 import lfunctions
from spectral3 import report
from spectral3 import spectral
from spectral3.errors import CoverageError, PreconditionError

log = logging.getLogger('spectral3.experiments')

DEFAULT_EPSILON = 0.01
SIEVE_KINDS = ('sym3_thm12', 'gl2_jutila', 'luo', 'young_s1')
DUALITY_TOL = 1e-10
HOLDER_SLACK = 1e-12
QUAD_LIMIT = 200


@dataclasses.dataclass(frozen=True)
class Regime(object):
    name: str
    lo: fractions.Fraction
    hi: fractions.Fraction
    t_exponent: fractions.Fraction
    delta_exponent: fractions.Fraction
    # What the Hoelder argument actually yields, where it differs.
    derived_t_exponent: fractions.Fraction

    def contains(self, T, Delta):
        """1 <= Delta <= T with Delta in (T^lo, T^hi]; the first regime includes Delta = 1."""
        if Delta < 1 or Delta > T:
            return False
        if T == 1:
            return self.lo == 0
        x = math.log(Delta) / math.log(T)
        return (x > self.lo or self.lo == 0) and x <= self.hi + 1e-12

    def envelope(self, T, Delta, epsilon, derived=False):
        a = self.derived_t_exponent if derived else self.t_exponent
        return T ** (float(a) + epsilon) * Delta ** float(self.delta_exponent)


F = fractions.Fraction
VARIANCE_REGIMES = (
    Regime('short', F(0), F(1, 3), F(-1, 7), F(7, 8), F(-1, 8)),
    Regime('middle', F(1, 3), F(3, 7), F(-1, 4), F(5, 4), F(-1, 4)),
    Regime('long', F(3, 7), F(1), F(-1, 10), F(9, 10), F(-1, 10)),
)


def regime_of(T, Delta):
    for regime in VARIANCE_REGIMES:
        if regime.contains(T, Delta):
            return regime
    return None


@dataclasses.dataclass
class ExperimentReport(object):
    name: str
    inputs: dict
    summary: dict
    rows: list = dataclasses.field(default_factory=list)
    envelopes: list = dataclasses.field(default_factory=list)
    checks: list = dataclasses.field(default_factory=list)

    @property
    def passed(self):
        return all(c['holds'] for c in self.checks)

    def asDict(self):
        return report._jsonable(dataclasses.asdict(self))

    def observations(self):
        """The envelope ratios and inequality checks as verification reports."""
        out = []
        for row in self.envelopes:
            out.append(report.VerificationReport.observation(
                '%s:%s' % (self.name, row['quantity']), row['ratio'], self.inputs, row))
        for check in self.checks:
            excess = max(check['lhs'] - check['rhs'], 0.0)
            out.append(report.VerificationReport(
                '%s:%s' % (self.name, check['name']), check['lhs'], check['rhs'], excess,
                excess / max(abs(check['rhs']), report.NEAR_ZERO), 0.0, check['holds'],
                self.inputs, details=check))
        return out


def _forms(data):
    return list(getattr(data, 'forms', data))


def _envelope_row(quantity, value, envelope, **extra):
    ratio = value / envelope if envelope > 0 else float('inf')
    row = {'quantity': quantity, 'value': value, 'envelope': envelope, 'ratio': ratio}
    row.update(extra)
    return row


def _inequality(name, lhs, rhs):
    return {'name': name, 'lhs': float(lhs), 'rhs': float(rhs),
            'holds': bool(lhs <= rhs * (1 + HOLDER_SLACK) + HOLDER_SLACK)}


def _central(desc):
    if desc.closed_form is not None:
        return complex(desc.closed_form(0.5) / desc.gamma(0.5)), 0.0
    afe = lfunctions.l_value(desc, 0.5)
    return afe.value, afe.error


def central_values(form):
    """L(1/2, sym^3 phi) and L(1/2, phi) with their AFE error estimates."""
    sym3, e3 = _central(lfunctions.sym3_descriptor(form))
    if form.isEven():
        gl2, e1 = _central(lfunctions.gl2_descriptor(form))
    else:
        gl2, e1 = 0j, 0.0
    return sym3, e3, gl2, e1


def variance_scan(dataset, T, Delta, epsilon=DEFAULT_EPSILON):
    """Sum of |<1, phi^3>|^2 over T <= t_phi <= T + Delta with its moment pipeline."""
    if T <= 0 or Delta <= 0:
        raise PreconditionError('variance_scan needs T > 0 and Delta > 0')
    forms = _forms(dataset)
    if not forms:
        raise CoverageError((T, T + Delta), 'empty dataset')
    lo = min(f.t for f in forms)
    hi = max(f.t for f in forms)
    if T + Delta < lo or T > hi:
        raise CoverageError((T, T + Delta), 'window [%s, %s] lies outside the data [%s, %s]' % (
            T, T + Delta, lo, hi))
    window = sorted((f for f in forms if T <= f.t <= T + Delta), key=lambda f: (f.t, f.label))
    log.info('Variance scan on [%s, %s]: %s forms' % (T, T + Delta, len(window)))
    rows = []
    total = error = 0.0
    m2 = m8 = m10 = cubic = fourth = product = 0.0
    for form in window:
        w = spectral.watson_value(form)
        sym3, e3, gl2, e1 = central_values(form)
        a, b = abs(sym3), abs(gl2)
        total += w.value
        error += w.error
        m2 += a ** 2
        m8 += a ** 8
        m10 += a ** 10
        cubic += b ** 3
        fourth += b ** 4
        product += a * b * b
        rows.append({'label': form.label, 't': form.t, 'parity': form.parity,
                     'watson': w.value, 'watson_error': w.error,
                     'l_sym3': sym3, 'l_sym3_error': e3, 'l_gl2': gl2, 'l_gl2_error': e1})
    count = len(window)
    summary = {'variance': total, 'error': error, 'count': count,
               'moment2_sym3': m2, 'moment8_sym3': m8, 'moment10_sym3': m10,
               'moment3_gl2': cubic, 'moment4_gl2': fourth, 'product': product}
    current = regime_of(T, Delta)
    summary['regime'] = current.name if current else None
    te = T ** epsilon
    envelopes = []
    for regime in VARIANCE_REGIMES:
        envelopes.append(_envelope_row(
            'variance:%s' % (regime.name,), total, regime.envelope(T, Delta, epsilon),
            regime=regime.name, applies=regime is current,
            t_exponent=str(regime.t_exponent), delta_exponent=str(regime.delta_exponent),
            derived_envelope=regime.envelope(T, Delta, epsilon, derived=True)))
    envelopes.append(_envelope_row('variance:trivial', total, te * Delta))
    envelopes.append(_envelope_row('count', count, T * Delta))
    envelopes.append(_envelope_row('moment8_sym3', m8, te * (T ** 8 + T ** 7 * Delta ** 3)))
    envelopes.append(_envelope_row('moment10_sym3', m10, T ** (10 + epsilon)))
    envelopes.append(_envelope_row('moment3_gl2', cubic, T ** (1 + epsilon) * Delta))
    envelopes.append(_envelope_row('moment4_gl2', fourth, T ** (1 + epsilon) * Delta))
    if current is not None and current.name == 'middle':
        envelopes.append(_envelope_row('moment2_sym3', m2, te * T ** 2.5 * Delta ** 1.5))
    elif current is not None and current.name == 'long':
        envelopes.append(_envelope_row('moment2_sym3', m2, te * T ** 2.8 * Delta ** 0.8))
    checks = [
        _inequality('holder_short', product,
                    count ** (5 / 24) * m8 ** (1 / 8) * cubic ** (2 / 3)),
        _inequality('cauchy_schwarz', product, math.sqrt(m2 * fourth)),
        _inequality('holder_moment8', m2, m8 ** 0.25 * count ** 0.75),
        _inequality('holder_moment10', m2, m10 ** 0.2 * count ** 0.8),
    ]
    for check in checks:
        if not check['holds']:
            log.warning('Inequality %s fails: %.6g > %.6g' % (
                check['name'], check['lhs'], check['rhs']))
    return ExperimentReport('variance_scan', {'T': T, 'Delta': Delta, 'epsilon': epsilon},
                            summary, rows, envelopes, checks)


def sym3_index(N):
    """All (d, k, m, n) with N < d^4 k^3 m^2 n <= 2N."""
    if N < 1:
        raise PreconditionError('sym3_index needs N >= 1, got %s' % (N,))
    out = []
    d = 1
    while d ** 4 <= 2 * N:
        k = 1
        while d ** 4 * k ** 3 <= 2 * N:
            m = 1
            while d ** 4 * k ** 3 * m ** 2 <= 2 * N:
                base = d ** 4 * k ** 3 * m ** 2
                for n in range(N // base + 1, 2 * N // base + 1):
                    out.append((d, k, m, n))
                m += 1
            k += 1
        d += 1
    return out


def _log_sinh(x):
    return x + math.log1p(-math.exp(-2 * x)) - math.log(2)


def young_weight(form, T):
    """w(t_j) |rho_j(1)|^2 for w(t) = 2 sinh((pi - 1/T) t) / sinh(2 pi t)."""
    a = math.pi - 1.0 / T
    t = form.t
    if t == 0:
        log_w = math.log(a / math.pi)
    else:
        log_w = math.log(2) + _log_sinh(a * t) - _log_sinh(2 * math.pi * t)
    return math.exp(log_w + spectral.log_rho1_squared(form))


def luo_weight(form):
    """|rho_j(1)|^2 / cosh(pi t_j)."""
    if form.l_sym2_at_1 is None:
        raise PreconditionError('form %s has no L(1, sym^2) value' % (form.label,))
    return 2.0 / form.l_sym2_at_1


def _gl2_row(form, ns, twist):
    lam = lfunctions.gl2_descriptor(form).coefficients(int(ns[-1])).real[ns]
    if twist:
        return lam * np.exp(1j * form.t * np.log(ns))
    return lam.astype(complex)


@dataclasses.dataclass
class SieveMatrix(object):
    """Rows are forms (weights folded in as square roots), columns the sum index."""
    which: str
    labels: list
    columns: list
    matrix: np.ndarray
    weights: np.ndarray


def sieve_matrix(which, data, N, T, Delta=None, seed=None):
    if which not in SIEVE_KINDS:
        raise PreconditionError('Unknown large sieve %s; choose from %s' % (
            which, ', '.join(SIEVE_KINDS)))
    if N < 1 or T <= 0:
        raise PreconditionError('large sieve needs N >= 1 and T > 0')
    forms = sorted(_forms(data), key=lambda f: (f.t, f.label))
    if which == 'sym3_thm12':
        window = (T, T + Delta)
    elif which == 'gl2_jutila':
        window = (T - Delta, T + Delta)
    elif which == 'luo':
        window = (0, T)
    else:
        window = (0, float('inf'))
    rows = [f for f in forms if window[0] <= f.t <= window[1]]
    if not rows:
        raise CoverageError(window, 'no forms in the spectral window [%s, %s]' % window)
    if which == 'sym3_thm12':
        columns = sym3_index(N)
        matrix = np.empty((len(rows), len(columns)), dtype=complex)
        for i, form in enumerate(rows):
            table = coefficients.CoefficientTable.cached('sym3', form)
            matrix[i] = [coefficients.lambda_sym3(form, k, m, n, table)
                         for _, k, m, n in columns]
            table.persist()
        weights = np.ones(len(rows))
    else:
        if which == 'young_s1':
            ns = np.arange(N + 1, 2 * N + 1)
        else:
            ns = np.arange(1, N + 1)
        columns = [int(n) for n in ns]
        twist = which in ('luo', 'young_s1')
        matrix = np.array([_gl2_row(form, ns, twist) for form in rows])
        if which == 'luo':
            weights = np.array([luo_weight(f) for f in rows])
        elif which == 'young_s1':
            weights = np.array([young_weight(f, T) for f in rows])
        else:
            weights = np.ones(len(rows))
        matrix = np.sqrt(weights)[:, None] * matrix
    log.debug('Sieve %s: %s forms x %s columns' % (which, len(rows), len(columns)))
    return SieveMatrix(which, [f.label for f in rows], columns, matrix, weights)


def sieve_envelope(which, N, T, Delta, epsilon=DEFAULT_EPSILON, X=None):
    if which == 'sym3_thm12':
        return (N * T) ** epsilon * (N + T ** 7 * Delta ** 3)
    if which == 'gl2_jutila':
        return (N * T) ** epsilon * (T * Delta + N)
    if which == 'luo':
        return (N * T) ** epsilon * (T ** 2 + T ** 1.5 * N ** 0.5 + N ** 1.25)
    return N ** epsilon * (T ** 2 + N * T / X + N ** 1.5 / T)


@dataclasses.dataclass
class DualityResult(object):
    primal: float
    dual: float
    svd: float
    sampled: float

    @property
    def discrepancy(self):
        return abs(self.primal - self.dual) / max(self.svd, 1e-300)

    def asDict(self):
        d = dataclasses.asdict(self)
        d['discrepancy'] = self.discrepancy
        return d


def duality_test(matrix, trials=64, seed=0):
    """Largest singular value of the bilinear form from both sides.

    primal maximises |M a| over a, dual maximises |M^* b| over b; sampled is
    the best ratio over random a and can only fall short of them.
    """
    matrix = np.asarray(matrix, dtype=complex)
    primal = math.sqrt(max(float(np.linalg.eigvalsh(matrix.conj().T @ matrix)[-1]), 0.0))
    dual = math.sqrt(max(float(np.linalg.eigvalsh(matrix @ matrix.conj().T)[-1]), 0.0))
    svd = float(np.linalg.svd(matrix, compute_uv=False)[0])
    rng = np.random.default_rng(seed)
    cols = matrix.shape[1]
    a = rng.standard_normal((cols, trials)) + 1j * rng.standard_normal((cols, trials))
    sampled = float(np.max(np.linalg.norm(matrix @ a, axis=0) / np.linalg.norm(a, axis=0)))
    return DualityResult(primal, dual, svd, sampled)


def random_sieve_matrix(seed, rows=20, cols=50):
    """A rows x cols GL(2) sieve matrix of synthetic forms."""
    data = forms_mod.synth_forms(seed, rows, prime_bound=max(cols, 2))
    return np.array([_gl2_row(f, np.arange(1, cols + 1), True) for f in data])


def young_s1(coeffs, ns, T, X, epsilon=DEFAULT_EPSILON):
    """The Kloosterman-side majorant S_1(A; X).

    T sum_{r < X} r^-2 sum_{0 < |k| <= r T^eps} int_{|u| <= T^eps}
    min(1/|u|, (r/|k|)/(1 + u^2)) |sum_n a_n S(k, n; r) e(un/(rT))|^2 du.
    """
    ns = np.asarray(ns)
    coeffs = np.asarray(coeffs, dtype=complex)
    reach = T ** epsilon
    total = 0.0
    for r in range(1, int(math.ceil(X))):
        k_max = max(1, int(math.floor(r * reach)))
        for k in list(range(-k_max, 0)) + list(range(1, k_max + 1)):
            b = coeffs * np.array([arithmetic.kloosterman(k, int(n), r) for n in ns])
            scale = ns / (r * T)

            def integrand(u, b=b, scale=scale, k=k, r=r):
                bound = (r / abs(k)) / (1 + u * u)
                if u:
                    bound = min(bound, 1 / abs(u))
                return bound * abs(np.sum(b * arithmetic.e_array(u * scale))) ** 2

            value, _ = scipy.integrate.quad(integrand, -reach, reach, points=[0.0],
                                            limit=QUAD_LIMIT)
            total += value / r ** 2
    return T * total


def _coefficient_vector(coefficients_in, size, seed):
    if coefficients_in is None:
        rng = np.random.default_rng(seed)
        return rng.standard_normal(size) + 1j * rng.standard_normal(size)
    vec = np.asarray(coefficients_in, dtype=complex)
    if vec.shape != (size,):
        raise PreconditionError('expected %s coefficients, got %s' % (size, vec.shape))
    return vec


def large_sieve_ratio(which, data, N, T, Delta=None, coefficients=None, X=None,
                      epsilon=DEFAULT_EPSILON, seed=0):
    """LHS of one spectral large sieve against its envelope.

    coefficients defaults to a seeded random complex vector indexed like the
    sieve columns (see sieve_matrix).
    """
    if which in ('sym3_thm12', 'gl2_jutila') and (Delta is None or Delta <= 0):
        raise PreconditionError('%s needs Delta > 0' % (which,))
    if which == 'young_s1' and X is None:
        X = max(2.0, math.sqrt(T))
    sieve = sieve_matrix(which, data, N, T, Delta)
    a = _coefficient_vector(coefficients, len(sieve.columns), seed)
    norm2 = float(np.sum(np.abs(a) ** 2))
    lhs = float(np.sum(np.abs(sieve.matrix @ a) ** 2))
    envelope = sieve_envelope(which, N, T, Delta, epsilon, X)
    duality = duality_test(sieve.matrix, seed=seed)
    summary = {'lhs': lhs, 'norm2': norm2, 'envelope': envelope,
               'ratio': lhs / (envelope * norm2) if norm2 else 0.0,
               # The constant that calibrates the sieve on this data.
               'calibration': duality.svd ** 2 / envelope,
               'primal': duality.primal, 'dual': duality.dual,
               'forms': len(sieve.labels), 'columns': len(sieve.columns)}
    envelopes = [_envelope_row(which, lhs, envelope * norm2)]
    checks = [{'name': 'duality', 'lhs': duality.discrepancy, 'rhs': DUALITY_TOL,
               'holds': duality.discrepancy <= DUALITY_TOL},
              _inequality('sampled_below_norm', duality.sampled, duality.svd)]
    if which == 'young_s1':
        s1 = young_s1(a, sieve.columns, T, X, epsilon)
        error_envelope = envelope * norm2
        summary['s1'] = s1
        summary['difference'] = lhs - s1
        envelopes.append(_envelope_row('young_s1:difference', abs(lhs - s1), error_envelope))
    log.info('Large sieve %s: ratio %.4g, calibration %.4g' % (
        which, summary['ratio'], summary['calibration']))
    inputs = {'which': which, 'N': N, 'T': T, 'Delta': Delta, 'X': X, 'epsilon': epsilon,
              'seed': seed}
    rows = [{'label': label, 'weight': w, 'value': abs(v) ** 2}
            for label, w, v in zip(sieve.labels, sieve.weights, sieve.matrix @ a)]
    return ExperimentReport('large_sieve:%s' % (which,), inputs, summary, rows, envelopes,
                            checks)
