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

import json
import math

import mpmath
import numpy as np
import pytest

from spectral3 import coefficients
from spectral3 import experiments
from spectral3 import forms
from spectral3.errors import CoverageError, PreconditionError


def eis(nu, prime_bound=50):
    return forms.MaassFormData.eisenstein(nu, prime_bound=prime_bound)


@pytest.mark.parametrize('delta,name', [(1.0, 'short'), (5.0, 'short'), (15.0, 'middle'),
                                        (100.0, 'long'), (1000.0, 'long')])
def test_regime_of(delta, name):
    assert experiments.regime_of(1000.0, delta).name == name


@pytest.mark.parametrize('delta', [0.5, 2000.0])
def test_regime_outside_range(delta):
    assert experiments.regime_of(1000.0, delta) is None


def test_short_regime_records_derived_exponent():
    short = experiments.VARIANCE_REGIMES[0]
    assert short.t_exponent == experiments.F(-1, 7)
    assert short.derived_t_exponent == experiments.F(-1, 8)
    assert short.envelope(100.0, 2.0, 0.0, derived=True) > short.envelope(100.0, 2.0, 0.0)


def test_central_values_eisenstein():
    nu = 3.0
    sym3, e3, gl2, e1 = experiments.central_values(eis(nu))
    z1 = abs(complex(mpmath.zeta(0.5 + 1j * nu))) ** 2
    z3 = abs(complex(mpmath.zeta(0.5 + 3j * nu))) ** 2
    assert abs(gl2 - z1) < 1e-9 * z1
    assert abs(sym3 - z1 * z3) < 1e-9 * z1 * z3
    assert e3 == 0 and e1 == 0


def test_variance_scan_empty_window():
    result = experiments.variance_scan([eis(2.5), eis(6.5)], 3.0, 1.0)
    assert result.summary['variance'] == 0
    assert result.summary['count'] == 0
    assert result.rows == []
    assert result.passed


def test_variance_scan_window_outside_data():
    with pytest.raises(CoverageError):
        experiments.variance_scan([eis(2.5), eis(6.5)], 10.0, 2.0)
    with pytest.raises(CoverageError):
        experiments.variance_scan([], 1.0, 1.0)
    with pytest.raises(PreconditionError):
        experiments.variance_scan([eis(2.5)], 2.0, 0.0)


def test_variance_scan_eisenstein_window():
    data = [eis(2.5), eis(3.0), eis(3.9), eis(8.0)]
    result = experiments.variance_scan(data, 2.5, 1.5)
    assert result.summary['count'] == 3
    assert [row['label'] for row in result.rows] == ['eisenstein-2.5', 'eisenstein-3.0',
                                                     'eisenstein-3.9']
    assert result.summary['regime'] == 'long'
    total = sum(row['watson'] for row in result.rows)
    assert result.summary['variance'] == pytest.approx(total, rel=1e-14)
    assert all(row['watson'] >= 0 for row in result.rows)
    assert result.passed


def test_variance_scan_envelope_table():
    result = experiments.variance_scan([eis(2.5), eis(3.0)], 2.5, 1.0)
    regimes = [row for row in result.envelopes if row['quantity'].startswith('variance:')
               and 'regime' in row]
    assert [row['regime'] for row in regimes] == ['short', 'middle', 'long']
    assert sum(row['applies'] for row in regimes) == 1
    quantities = {row['quantity'] for row in result.envelopes}
    for name in ('moment8_sym3', 'moment10_sym3', 'moment3_gl2', 'moment4_gl2', 'count'):
        assert name in quantities
    assert all(math.isfinite(row['ratio']) for row in result.envelopes)


def test_variance_scan_fixture(sample_forms):
    result = experiments.variance_scan(sample_forms, 2.0, 5.0)
    assert result.summary['count'] == 3
    assert all(row['watson'] >= -row['watson_error'] for row in result.rows)
    assert math.isfinite(result.summary['variance'])
    json.dumps(result.asDict())


@pytest.fixture(scope='module')
def sample_forms():
    return forms.load_forms()


def test_sym3_index_matches_brute_force():
    N = 40
    index = experiments.sym3_index(N)
    brute = []
    for d in range(1, 4):
        for k in range(1, 5):
            for m in range(1, 10):
                for n in range(1, 2 * N + 1):
                    if N < d ** 4 * k ** 3 * m ** 2 * n <= 2 * N:
                        brute.append((d, k, m, n))
    assert sorted(index) == sorted(brute)
    assert len(set(index)) == len(index)


def test_gl2_delta_vector():
    form = eis(2.0, prime_bound=100)
    N = 20
    vec = np.zeros(N)
    vec[4] = 1.0
    result = experiments.large_sieve_ratio('gl2_jutila', [form], N, 2.0, 1.0, coefficients=vec)
    lam5 = 2 * math.cos(2.0 * math.log(5))
    assert result.summary['lhs'] == pytest.approx(lam5 ** 2, rel=1e-12)
    assert result.summary['ratio'] <= 1


def test_sym3_delta_vector():
    form = forms.synth_forms(4, 1, t_range=(10.0, 11.0), prime_bound=50).forms[0]
    N = 10
    columns = experiments.sym3_index(N)
    i = columns.index((1, 1, 2, 3))
    vec = np.zeros(len(columns))
    vec[i] = 1.0
    result = experiments.large_sieve_ratio('sym3_thm12', [form], N, form.t, 1.0,
                                           coefficients=vec)
    expected = abs(coefficients.lambda_sym3(form, 1, 2, 3)) ** 2
    assert result.summary['lhs'] == pytest.approx(expected, rel=1e-12)
    assert result.summary['ratio'] <= 1
    assert coefficients.CoefficientTable.cached('sym3', form).loaded > 0


@pytest.mark.parametrize('seed', [0, 1, 2])
def test_duality_on_random_matrices(seed):
    matrix = experiments.random_sieve_matrix(seed)
    assert matrix.shape == (20, 50)
    result = experiments.duality_test(matrix, seed=seed)
    assert result.discrepancy <= experiments.DUALITY_TOL
    assert abs(result.primal - result.svd) <= 1e-10 * result.svd
    assert result.sampled <= result.svd * (1 + 1e-12)


def test_young_weight_matches_exponential_decay():
    form = eis(20.0)
    T = 20.0
    expected = 2 * math.exp(-form.t / T) / form.l_sym2_at_1
    assert experiments.young_weight(form, T) == pytest.approx(expected, rel=1e-10)


def test_luo_weight_needs_sym2():
    with pytest.raises(PreconditionError):
        experiments.luo_weight(eis(3.0).withLSym2(None))


def test_luo_and_young_reports():
    data = forms.synth_forms(9, 4, t_range=(5.0, 12.0), prime_bound=60)
    luo = experiments.large_sieve_ratio('luo', data, 20, 12.0)
    assert luo.summary['forms'] == 4
    assert math.isfinite(luo.summary['ratio'])
    young = experiments.large_sieve_ratio('young_s1', data, 8, 12.0, X=3)
    assert math.isfinite(young.summary['s1'])
    assert young.summary['s1'] >= 0
    assert young.summary['difference'] == pytest.approx(
        young.summary['lhs'] - young.summary['s1'])
    assert young.passed


def test_large_sieve_errors():
    data = [eis(2.0, prime_bound=100)]
    with pytest.raises(PreconditionError):
        experiments.large_sieve_ratio('nope', data, 10, 2.0, 1.0)
    with pytest.raises(CoverageError):
        experiments.large_sieve_ratio('gl2_jutila', data, 10, 20.0, 1.0)
    with pytest.raises(PreconditionError):
        experiments.large_sieve_ratio('gl2_jutila', data, 10, 2.0, 1.0, coefficients=[1.0])
    with pytest.raises(PreconditionError):
        experiments.large_sieve_ratio('sym3_thm12', data, 10, 2.0)


def test_report_observations():
    result = experiments.large_sieve_ratio('gl2_jutila', [eis(2.0, 100), eis(2.5, 100)],
                                           30, 2.0, 1.0)
    reports = result.observations()
    names = [r.check for r in reports]
    assert 'large_sieve:gl2_jutila:duality' in names
    assert all(r.passed for r in reports)
    json.dumps([r.asDict() for r in reports])
