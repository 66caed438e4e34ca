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

"""Named verification suites.

Each suite turns a Config into a list of runner.CheckTask objects; running
them on a Runner yields VerificationReports in a fixed order.
"""

import collections
import dataclasses
import fractions
import functools
import itertools
import logging
import math
import random

import numpy as np

from spectral3 import arithmetic
from spectral3 import coefficients
from spectral3 import experiments
from spectral3 import forms
from spectral3 import oscillatory
from spectral3 import runner
from spectral3 import spectral
from spectral3 import special
from spectral3 import voronoi
from spectral3 import windows
from spectral3.errors import ConfigError, EXIT_FAIL
from spectral3.report import VerificationReport

log = logging.getLogger('spectral3.suites')

EXP_SUM_TOL = 1e-12
# Brute-force character sums against the integer divisor formula.
INTEGER_TOL = 1e-9
RAMANUJAN_MAX = 100
KLOOSTERMAN_MAX_C = 50
XI_FE_TOL = 1e-9
HURWITZ_TOL = 1e-10
HURWITZ_MAX_C = 10
MODULARITY_TOL = 1e-7
MODULARITY_POINTS = 10
ZAGIER_TOL = 1e-9
Q_TRIPLES = 10 ** 4
TAIL_T = 40.0
TAIL_BOUND = 1e-18
VORONOI_NU = 1.7
ABLATION_MIN = 1e-2
SLOPE_TOL = 0.3
XI0_GAMMAS = (0.05, 0.1, 0.2)
XI0_ORDERS = (1, 2, 3)
REGRESSION_TOL = 1e-6
WPLUS_POINTS = ((1e4, 1.0), (2e4, 8.0))
SIEVE_T_RANGE = (5.0, 12.0)
SIEVE_PRIME_BOUND = 100
DUALITY_SEEDS = 3
# (N, T, Delta, X) per large-sieve variant on the desk dataset.
SIEVE_CASES = collections.OrderedDict([
    ('gl2_jutila', (30, 8.5, 3.5, None)),
    ('sym3_thm12', (20, 5.0, 7.0, None)),
    ('luo', (20, 12.0, None, None)),
    ('young_s1', (8, 12.0, None, 3.0)),
])


def _worst(check, lhs, rhs, tolerance, inputs=None, relative=True, floor=0.0):
    """One report for a whole array comparison, pinned at the worst entry."""
    lhs = np.atleast_1d(np.asarray(lhs, dtype=complex))
    rhs = np.atleast_1d(np.asarray(rhs, dtype=complex))
    diff = np.abs(lhs - rhs)
    if relative:
        err = diff / np.maximum(np.abs(rhs), floor or 1e-300)
    else:
        err = diff
    i = int(np.argmax(err))
    return VerificationReport.fromArrays(check, lhs[i], rhs[i], float(diff.max()),
                                         float(err.max()), tolerance, inputs,
                                         truncation={'points': int(lhs.size), 'worst': i})


def _slope(xs, ys):
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def retolerate(report, tolerance):
    """Apply a --tol override to a floating-point check."""
    if tolerance is None or report.tolerance in (0, math.inf):
        return report
    return dataclasses.replace(report, tolerance=tolerance,
                               passed=VerificationReport._passes(report.rel_err, tolerance))


# Hecke: coefficient identities and exponential sums

def ramanujan_check():
    lhs, rhs = [], []
    ks = np.arange(-RAMANUJAN_MAX, RAMANUJAN_MAX + 1)
    for r in range(1, RAMANUJAN_MAX + 1):
        x = arithmetic.units(r)
        brute = np.exp(arithmetic.TWO_PI_I * (np.outer(ks, x) % r) / r).sum(axis=1)
        lhs.extend(brute)
        rhs.extend(arithmetic.ramanujan_sum(int(k), r) for k in ks)
    return _worst('arithmetic:ramanujan_sum', lhs, rhs, INTEGER_TOL, {'max': RAMANUJAN_MAX},
                  relative=False)


def kloosterman_check():
    worst_imag = 0.0
    worst_swap = 0.0
    for c in range(1, KLOOSTERMAN_MAX_C + 1):
        for a in range(c):
            for b in range(a, c):
                s = arithmetic.kloosterman(a, b, c)
                worst_imag = max(worst_imag, abs(s.imag))
                worst_swap = max(worst_swap, abs(s - arithmetic.kloosterman(b, a, c)))
    worst = max(worst_imag, worst_swap)
    return VerificationReport.fromArrays(
        'arithmetic:kloosterman_real_symmetric', worst, 0.0, worst, worst, EXP_SUM_TOL,
        {'max_c': KLOOSTERMAN_MAX_C}, details={'imag': worst_imag, 'swap': worst_swap})


def hyper_kloosterman_check():
    """Kl(a, n, r; 1, q2, r, d2) has inner modulus 1 and is S(0, n; q2 / d2)."""
    lhs, rhs = [], []
    for r in range(1, 7):
        for q2 in range(1, 7):
            for d2 in arithmetic.divisors(q2):
                for a, n in itertools.product((1, 2), range(6)):
                    p = arithmetic.ExpSumParams(a, n, r, 1, q2, r, d2)
                    lhs.append(arithmetic.hyper_kloosterman(p))
                    rhs.append(arithmetic.kloosterman(0, n, q2 // d2))
    return _worst('arithmetic:hyper_kloosterman_collapse', lhs, rhs, EXP_SUM_TOL,
                  relative=False)


def identity_check(which, form, n_max, other=None, tolerance=None):
    return retolerate(coefficients.verify_identity(which, form, n_max, other), tolerance)


def hecke_tasks(config):
    n_max = config.n_max
    data = forms.synth_forms(config.seed, config.synthetic_count, prime_bound=n_max)
    tasks = []
    for i, form in enumerate(data):
        other = data.forms[(i + 1) % len(data)]
        for which in ('compare_dirichlet', 'hecke34', 'compare_dirichlet2', 'lfour_square',
                      'ltwo_rankin_square'):
            func = functools.partial(identity_check, which, form, n_max,
                                     other if which == 'ltwo_rankin_square' else None,
                                     config.tolerance)
            tasks.append(runner.CheckTask('hecke', '%s:%s' % (which, form.label), func,
                                          {'identity': which, 'form': form.label,
                                           'n_max': n_max}))
    tasks.append(runner.CheckTask('hecke', 'e4_square',
                                  functools.partial(identity_check, 'e4_square', None, n_max),
                                  {'identity': 'e4_square', 'n_max': n_max}))
    for name, func in (('ramanujan_sum', ramanujan_check),
                       ('kloosterman', kloosterman_check),
                       ('hyper_kloosterman', hyper_kloosterman_check)):
        tasks.append(runner.CheckTask('hecke', name, func, priority=runner.HIGH_PRIORITY))
    return tasks


# Voronoi

def voronoi_check(case, tolerance=None):
    return retolerate(voronoi.verify_voronoi(case), tolerance)


def residue_ablation():
    """Leaving out the polar term must break the E4 formula."""
    case = voronoi.VoronoiCase('E4', 1, 1, 1, windows.SmoothWindow('gauss', 30.0))
    r = voronoi.verify_voronoi(case, include_residue=False)
    details = dict(r.details)
    details['expect'] = 'rel_err > %s' % (ABLATION_MIN,)
    return dataclasses.replace(r, check='voronoi:residue_ablation', tolerance=ABLATION_MIN,
                               passed=r.rel_err > ABLATION_MIN, details=details)


def hurwitz_check():
    s = 0.3 + 12j
    lhs, rhs = [], []
    for c in range(1, HURWITZ_MAX_C + 1):
        lhs.append(sum(special.hurwitz_zeta(s, a, c) for a in range(1, c + 1)))
        rhs.append(special.zeta(s))
    return _worst('special:hurwitz_partition', lhs, rhs, HURWITZ_TOL, {'s': s})


def voronoi_tasks(config):
    grid = config.voronoi_grid
    shapes = [windows.SmoothWindow(shape, grid['scale']) for shape in grid['windows']]
    form = None
    if 'Phi' in grid['kinds']:
        reach = max(w.support()[1] for w in shapes)
        form = forms.MaassFormData.eisenstein(VORONOI_NU, prime_bound=max(int(reach) + 1, 100))
    tasks = []
    for kind, m, c, window in itertools.product(grid['kinds'], grid['m'], grid['c'], shapes):
        case = voronoi.VoronoiCase(kind, m, c, 1, window, form if kind == 'Phi' else None)
        tasks.append(runner.CheckTask('voronoi', '%s:m=%s:c=%s:%s' % (kind, m, c, window.shape),
                                      functools.partial(voronoi_check, case, config.tolerance),
                                      case.asDict()))
    tasks.append(runner.CheckTask('voronoi', 'residue_ablation', residue_ablation))
    tasks.append(runner.CheckTask('voronoi', 'hurwitz_partition', hurwitz_check,
                                  priority=runner.HIGH_PRIORITY))
    return tasks


# Oscillatory

def xi0_order_check(order, alpha=1.0):
    cube = float(np.cbrt(alpha))
    errors = [abs(oscillatory.xi0_series(alpha, g, order) * cube
                  - oscillatory.xi0_solve(alpha, g).xi0) for g in XI0_GAMMAS]
    expected = 2 * order + 2
    slope = _slope(XI0_GAMMAS, errors)
    return VerificationReport.compare('oscillatory:xi0_order%s' % (order,), slope, expected,
                                      SLOPE_TOL / expected, {'alpha': alpha,
                                                             'gammas': XI0_GAMMAS},
                                      details={'errors': errors})


def xi0_regression_check():
    """Fit Newton roots at alpha = 1 in gamma^2 and read off the first coefficients."""
    g = np.linspace(0.02, 0.2, 25)
    z = np.array([oscillatory.xi0_solve(1.0, x).xi0 for x in g])
    fitted = np.polynomial.polynomial.polyfit(g ** 2, z, 6)[1:3]
    expected = [float(c) for c in oscillatory.XI0_COEFFICIENTS[1:3]]
    return _worst('oscillatory:xi0_regression', fitted, expected, REGRESSION_TOL,
                  {'points': len(g)})


def phase_series_check(J, alpha=1.3):
    gaps = [abs(oscillatory.phase_series(alpha, g, J) + oscillatory.h1_stationary(alpha, g))
            for g in XI0_GAMMAS[:2]]
    expected = 2 * J + 2
    return VerificationReport.compare('oscillatory:phase_series_J%s' % (J,),
                                      _slope(XI0_GAMMAS[:2], gaps), expected,
                                      SLOPE_TOL / expected, {'alpha': alpha},
                                      details={'gaps': gaps})


def wplus_check():
    """The corrected W_+ asymptotic approaches the contour transform as N grows."""
    base = oscillatory.OscillatoryParams(N=1.0, U=1.0, T=1e3, t_phi=2.0)
    rows = []
    for N, X in WPLUS_POINTS:
        rows.extend(oscillatory.convergence_study('wplus', [N], base, X=X))
    errors = [row['corrected_error'] for row in rows]
    slope = _slope([N for N, _ in WPLUS_POINTS], errors)
    return VerificationReport(
        'oscillatory:wplus_convergence', slope, 0.0, max(slope, 0.0), max(slope, 0.0), 0.0,
        slope < 0, {'points': WPLUS_POINTS}, details={'rows': rows})


def oscillatory_tasks(config):
    tasks = []
    for order in XI0_ORDERS:
        tasks.append(runner.CheckTask('oscillatory', 'xi0_order%s' % (order,),
                                      functools.partial(xi0_order_check, order)))
    tasks.append(runner.CheckTask('oscillatory', 'xi0_regression', xi0_regression_check))
    for J in (1, 2):
        tasks.append(runner.CheckTask('oscillatory', 'phase_series_J%s' % (J,),
                                      functools.partial(phase_series_check, J)))
    tasks.append(runner.CheckTask('oscillatory', 'wplus_convergence', wplus_check,
                                  priority=runner.LOW_PRIORITY))
    return tasks


# Spectral

def xi_functional_equation_check():
    sigma = np.linspace(0.05, 0.95, 10)
    t = np.linspace(-40, 40, 20)
    s = (sigma[:, None] + 1j * t[None, :]).ravel()
    return _worst('special:xi_functional_equation', special.xi(s), special.xi(1 - s),
                  XI_FE_TOL, {'points': int(s.size)})


def modularity_check(seed):
    rng = random.Random(seed)
    lhs, rhs = [], []
    for _ in range(MODULARITY_POINTS):
        z = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.7, 1.3))
        s = complex(rng.uniform(0.6, 2.0), rng.uniform(-6, 6))
        lhs.append(spectral.eisenstein_value(-1 / z, s))
        rhs.append(spectral.eisenstein_value(z, s))
    return _worst('spectral:eisenstein_modularity', lhs, rhs, MODULARITY_TOL, {'seed': seed})


def zagier_symmetry_check(seed):
    rng = random.Random(seed)
    lhs, rhs = [], []
    for _ in range(5):
        s = [complex(rng.uniform(-0.3, 0.3), rng.uniform(-5, 5)) for _ in range(3)]
        base = spectral.zagier_triple(*s)
        for perm in itertools.permutations(s):
            lhs.append(spectral.zagier_triple(*perm))
            rhs.append(base)
        full = spectral.completed_triple(*s)
        for signs in itertools.product((1, -1), repeat=3):
            lhs.append(spectral.completed_triple(*(e * x for e, x in zip(signs, s))))
            rhs.append(full)
    return _worst('spectral:zagier_symmetry', lhs, rhs, ZAGIER_TOL, {'seed': seed})


def q_weight_check(seed):
    rng = random.Random(seed)
    F = fractions.Fraction
    worst = F(0)
    for _ in range(Q_TRIPLES):
        t = F(rng.randint(1, 400), rng.randint(1, 8))
        tk = t * F(rng.randint(0, 64), 64)
        tj = F(rng.randint(-3200, 3200), rng.randint(1, 8))
        worst = max(worst, abs(spectral.q_weight(tj, tk, t)
                               - spectral.q_weight_piecewise(tj, tk, t)))
    return VerificationReport.fromArrays('spectral:q_weight_piecewise', float(worst), 0.0,
                                         float(worst), float(worst), 0,
                                         {'seed': seed, 'triples': Q_TRIPLES})


def tail_decay_check():
    """Exponentially decaying tail groups at t = TAIL_T are below TAIL_BOUND."""
    eis = forms.MaassFormData.eisenstein(0.5, prime_bound=50)
    tails = [spectral.tail_terms('phi_E3', TAIL_T, form=eis),
             spectral.tail_terms('E_E3_psi', TAIL_T, tau=1.0)]
    worst = max(abs(t.group('exponential')) for t in tails)
    return VerificationReport(
        'spectral:tail_decay', worst, 0.0, worst, worst, TAIL_BOUND, worst < TAIL_BOUND,
        {'t': TAIL_T}, details={'tails': [t.asDict() for t in tails]})


def sign_is_certain(form):
    """False for synthetic Hecke data, where Watson values have no definite sign."""
    return form.isEisenstein() or 'synthetic' not in form.source


def watson_check(form):
    value = spectral.watson_value(form)
    inputs = {'label': form.label, 't': form.t}
    if not sign_is_certain(form):
        return VerificationReport.observation('spectral:watson:%s' % (form.label,), value.value,
                                              inputs, value.asDict())
    margin = value.value + value.error
    return VerificationReport(
        'spectral:watson:%s' % (form.label,), value.value, 0.0, abs(min(margin, 0.0)),
        abs(min(margin, 0.0)), 0.0, margin >= 0, inputs, details=value.asDict())


def spectral_tasks(config):
    data = forms.load_forms(config.forms)
    tasks = [runner.CheckTask('spectral', 'xi_functional_equation',
                              xi_functional_equation_check, priority=runner.HIGH_PRIORITY),
             runner.CheckTask('spectral', 'eisenstein_modularity',
                              functools.partial(modularity_check, config.seed)),
             runner.CheckTask('spectral', 'zagier_symmetry',
                              functools.partial(zagier_symmetry_check, config.seed)),
             runner.CheckTask('spectral', 'q_weight',
                              functools.partial(q_weight_check, config.seed)),
             runner.CheckTask('spectral', 'tail_decay', tail_decay_check)]
    for form in data:
        if form.l_sym2_at_1 is None:
            log.warning('Skipping Watson check for %s: no L(1, sym^2)' % (form.label,))
            continue
        tasks.append(runner.CheckTask('spectral', 'watson:%s' % (form.label,),
                                      functools.partial(watson_check, form),
                                      {'label': form.label}, priority=runner.LOW_PRIORITY))
    return tasks


# Large sieve

def duality_check(seed):
    matrix = experiments.random_sieve_matrix(seed)
    result = experiments.duality_test(matrix, seed=seed)
    return VerificationReport.fromArrays(
        'large_sieve:duality:seed=%s' % (seed,), result.primal, result.dual,
        abs(result.primal - result.dual), result.discrepancy, experiments.DUALITY_TOL,
        {'seed': seed, 'shape': list(matrix.shape)}, details=result.asDict())


def sieve_check(which, data, epsilon, seed):
    N, T, Delta, X = SIEVE_CASES[which]
    result = experiments.large_sieve_ratio(which, data, N, T, Delta, X=X, epsilon=epsilon,
                                           seed=seed)
    return result.observations()


def sieve_tasks(config):
    data = forms.synth_forms(config.seed, config.synthetic_count, t_range=SIEVE_T_RANGE,
                             prime_bound=SIEVE_PRIME_BOUND)
    tasks = []
    for i in range(DUALITY_SEEDS):
        seed = config.seed + i
        tasks.append(runner.CheckTask('sieve', 'duality:%s' % (seed,),
                                      functools.partial(duality_check, seed)))
    for which in SIEVE_CASES:
        tasks.append(runner.CheckTask('sieve', which,
                                      functools.partial(sieve_check, which, data,
                                                        config.epsilon, config.seed)))
    return tasks


SUITES = collections.OrderedDict([
    ('hecke', hecke_tasks),
    ('voronoi', voronoi_tasks),
    ('oscillatory', oscillatory_tasks),
    ('spectral', spectral_tasks),
    ('sieve', sieve_tasks),
])


def plan(config):
    """Every CheckTask of the configured suites, in run order."""
    tasks = []
    for name in config.suites:
        if name not in SUITES:
            raise ConfigError('Unknown suite %s' % (name,))
        suite_tasks = SUITES[name](config)
        log.info('Suite %s: %s checks' % (name, len(suite_tasks)))
        tasks.extend(suite_tasks)
    return tasks


def run_suites(config, tasks=None):
    """Run the configured suites.

    Returns (suite, report) pairs in plan order and the error objects of the
    checks that raised.
    """
    if tasks is None:
        tasks = plan(config)
    runner.Runner(config.workers).runAll(tasks)
    reports = []
    errors = []
    for task in tasks:
        for r in task.results:
            reports.append((task.suite, r))
        if task.error is not None:
            errors.append(error_record(task))
    return reports, errors


def error_record(task):
    """The machine-readable failure entry of a check that raised."""
    error = task.error
    if hasattr(error, 'asDict'):
        info = error.asDict()
    else:
        info = {'error': error.__class__.__name__, 'message': str(error)}
    info.update({'suite': task.suite, 'check': task.name,
                 'exit_code': getattr(error, 'exit_code', EXIT_FAIL)})
    return info
