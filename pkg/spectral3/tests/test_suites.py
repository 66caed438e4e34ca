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

import math
import types

import pytest

from spectral3 import config
from spectral3 import forms
from spectral3 import runner
from spectral3 import suites
from spectral3.errors import ConfigError, CoverageError
from spectral3.report import VerificationReport


def make_config(**kw):
    data = {'suites': ['hecke'], 'report-dir': '.', 'dburi': 'sqlite://'}
    data.update(kw)
    return config.Config(data=data)


def test_plan_hecke():
    tasks = suites.plan(make_config(**{'n-max': 50, 'synthetic-count': 2}))
    # Five identities per form, the E4 identity and three exponential sums.
    assert len(tasks) == 14
    assert all(t.suite == 'hecke' for t in tasks)
    assert tasks[0].name.startswith('compare_dirichlet:')
    assert [t.name for t in tasks[-4:]] == ['e4_square', 'ramanujan_sum', 'kloosterman',
                                            'hyper_kloosterman']
    assert tasks[-1].priority == runner.HIGH_PRIORITY


def test_plan_voronoi_grid():
    cfg = make_config(suites=['voronoi'],
                      **{'voronoi-grid': {'kinds': ['E4'], 'm': [1], 'c': [1, 2],
                                          'windows': ['gauss']}})
    names = [t.name for t in suites.plan(cfg)]
    assert names == ['E4:m=1:c=1:gauss', 'E4:m=1:c=2:gauss', 'residue_ablation',
                     'hurwitz_partition']


def test_plan_every_suite():
    cfg = make_config(suites=list(config.SUITES), **{'synthetic-count': 2, 'n-max': 40})
    tasks = suites.plan(cfg)
    assert list(dict.fromkeys(t.suite for t in tasks)) == list(config.SUITES)
    assert len(set(tasks)) == len(tasks)


def test_plan_unknown_suite():
    with pytest.raises(ConfigError):
        suites.plan(types.SimpleNamespace(suites=['nope']))


def test_run_hecke_suite():
    cfg = make_config(**{'n-max': 40, 'synthetic-count': 2, 'workers': 2})
    reports, errors = suites.run_suites(cfg)
    assert errors == []
    assert len(reports) == 14
    assert all(suite == 'hecke' for suite, _ in reports)
    assert all(r.passed for _, r in reports), [r.check for _, r in reports if not r.passed]


def test_run_suites_error_record():
    def uncovered():
        raise CoverageError(3001)

    tasks = [runner.CheckTask('hecke', 'ramanujan_sum', suites.ramanujan_check),
             runner.CheckTask('spectral', 'uncovered', uncovered, {'p': 3001})]
    reports, errors = suites.run_suites(make_config(), tasks)
    assert [r.check for _, r in reports] == ['arithmetic:ramanujan_sum', 'spectral:uncovered']
    assert errors == [{'error': 'CoverageError', 'message': 'Data does not cover 3001',
                       'missing': '3001', 'suite': 'spectral', 'check': 'uncovered',
                       'exit_code': 2}]
    assert reports[1][1].inputs == {'p': 3001}


def test_error_record_for_unexpected_exception():
    task = runner.CheckTask('sieve', 'luo', None)
    task.fail(ValueError('bad shape'))
    assert suites.error_record(task) == {'error': 'ValueError', 'message': 'bad shape',
                                         'suite': 'sieve', 'check': 'luo', 'exit_code': 1}


@pytest.mark.parametrize('check', [
    suites.ramanujan_check,
    suites.hyper_kloosterman_check,
    suites.hurwitz_check,
    suites.xi0_regression_check,
    suites.xi_functional_equation_check,
    suites.tail_decay_check,
])
def test_fixed_checks_pass(check):
    r = check()
    assert r.passed, r


def test_kloosterman_check():
    r = suites.kloosterman_check()
    assert r.passed
    assert r.details['imag'] < suites.EXP_SUM_TOL


@pytest.mark.parametrize('order', suites.XI0_ORDERS)
def test_xi0_order(order):
    r = suites.xi0_order_check(order)
    assert r.passed
    assert r.lhs.real == pytest.approx(2 * order + 2, abs=suites.SLOPE_TOL)


@pytest.mark.parametrize('J', [1, 2])
def test_phase_series(J):
    assert suites.phase_series_check(J).passed


def test_residue_ablation_fails_without_polar_term():
    r = suites.residue_ablation()
    assert r.check == 'voronoi:residue_ablation'
    assert r.rel_err > suites.ABLATION_MIN
    assert r.passed


@pytest.mark.parametrize('seed', [0, 1])
def test_seeded_spectral_checks(seed):
    assert suites.modularity_check(seed).passed
    assert suites.zagier_symmetry_check(seed).passed


def test_q_weight_check_is_exact():
    r = suites.q_weight_check(0)
    assert r.tolerance == 0
    assert r.abs_err == 0
    assert r.passed


def test_duality_check():
    r = suites.duality_check(0)
    assert r.check == 'large_sieve:duality:seed=0'
    assert r.passed


def test_watson_eisenstein_is_nonnegative():
    form = forms.load_forms().byLabel('eisenstein-2.5')
    assert suites.sign_is_certain(form)
    r = suites.watson_check(form)
    assert r.passed
    assert r.lhs.real >= 0


def test_watson_synthetic_form_is_observed():
    form = forms.load_forms().byLabel('maass-1-13.7798-even')
    assert not suites.sign_is_certain(form)
    r = suites.watson_check(form)
    assert r.passed
    assert r.tolerance == math.inf
    assert r.inputs['label'] == 'maass-1-13.7798-even'


def test_spectral_tasks_skip_forms_without_sym2(tmp_path):
    eis = forms.MaassFormData.eisenstein
    data = forms.FormsFile(forms=[eis(2.5, prime_bound=50),
                                  eis(4.0, prime_bound=50).withLSym2(None)])
    path = tmp_path / 'forms.json'
    forms.write_forms(data, str(path))
    tasks = suites.spectral_tasks(make_config(suites=['spectral'], forms=str(path)))
    assert [t.name for t in tasks if t.name.startswith('watson:')] == [
        'watson:%s' % (data.forms[0].label,)]


def test_sieve_check_reports():
    data = forms.synth_forms(0, 3, t_range=suites.SIEVE_T_RANGE,
                             prime_bound=suites.SIEVE_PRIME_BOUND)
    reports = suites.sieve_check('gl2_jutila', data, 0.01, 0)
    names = [r.check for r in reports]
    assert 'large_sieve:gl2_jutila:duality' in names
    assert all(r.passed for r in reports)


def test_retolerate():
    r = VerificationReport.compare('x', 1.0, 1.0 + 1e-7, 1e-8)
    assert not r.passed
    loose = suites.retolerate(r, 1e-6)
    assert loose.passed
    assert loose.tolerance == 1e-6
    assert suites.retolerate(r, None) is r
    exact = VerificationReport.fromArrays('exact', 1, 1, 0, 0, 0)
    assert suites.retolerate(exact, 1e-3) is exact
    observed = VerificationReport.observation('seen', 3.0)
    assert suites.retolerate(observed, 1e-3) is observed
