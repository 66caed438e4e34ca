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

import dataclasses
import fractions
import itertools
import math
import random

import numpy as np
import pytest

from spectral3 import forms
from spectral3 import lfunctions
from spectral3 import special
from spectral3 import spectral
from spectral3.errors import AccuracyError, CoverageError, PoleError, PreconditionError


def eis(nu):
    return forms.MaassFormData.eisenstein(nu, prime_bound=50)


def close(a, b, tol):
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def rel_close(a, b, tol):
    return abs(a - b) <= tol * max(abs(a), abs(b))


@pytest.fixture(scope='module')
def sample():
    return forms.load_forms()


def lattice_sum(z, s, bound=200):
    r = np.arange(-bound, bound + 1)
    c, d = np.meshgrid(r, r)
    mask = (np.gcd(c, d) == 1)
    w = np.abs(c[mask] * z + d[mask]) ** 2
    return 0.5 * np.sum(np.exp(s * math.log(z.imag) - s * np.log(w)))


def test_eisenstein_matches_lattice_sum():
    z = 0.3 + 1.2j
    # The lattice truncation at 200 leaves about 3e-5 for Re s = 2.
    assert close(spectral.eisenstein_value(z, 2.0), lattice_sum(z, 2.0), 1e-4)
    s = 3.0 + 0.5j
    assert close(spectral.eisenstein_value(z, s), lattice_sum(z, s), 1e-6)


@pytest.mark.parametrize('s', [0.5 + 3.0j, 0.8 + 1.0j, 1.5 - 2.0j])
def test_eisenstein_periodic(s):
    z = 0.37 + 0.8j
    assert close(spectral.eisenstein_value(z + 1, s), spectral.eisenstein_value(z, s), 1e-9)


@pytest.mark.parametrize('s', [0.6 + 2.0j, 0.75, 1.2 + 5.0j, 2.0 - 1.0j, 0.5 + 6.0j,
                               0.9 + 0.3j])
def test_eisenstein_modular(s):
    z = 0.2 + 0.9j
    assert close(spectral.eisenstein_value(-1 / z, s), spectral.eisenstein_value(z, s), 1e-7)


def test_eisenstein_modular_sample_points():
    rng = random.Random(7)
    for _ in range(4):
        z = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.7, 1.3))
        s = complex(rng.uniform(0.6, 2.0), rng.uniform(-6, 6))
        assert close(spectral.eisenstein_value(-1 / z, s), spectral.eisenstein_value(z, s),
                     1e-7)


def test_eisenstein_special_cases():
    assert spectral.eisenstein_value(0.1 + 1j, 0.5) == 0
    with pytest.raises(PoleError):
        spectral.eisenstein_value(0.1 + 1j, 1)
    with pytest.raises(PreconditionError):
        spectral.eisenstein_value(0.1 - 1j, 2.0)
    with pytest.raises(AccuracyError):
        spectral.eisenstein_value(0.1 + 0.2j, 2.0, M=1)


def test_eisenstein_tail_shrinks():
    tails = [spectral.eisenstein_tail(0.5 + 4j, 0.8, M) for M in (4, 8, 16)]
    assert tails[0] > tails[1] > tails[2]


def test_eisenstein_point():
    point = spectral.EisensteinPoint(3.0)
    z = 0.25 + 1.1j
    assert point(z) == spectral.eisenstein_value(z, 0.5 + 3j)
    with pytest.raises(PreconditionError):
        spectral.EisensteinPoint(3.0, M=0)


def test_q_weight_branches():
    t = fractions.Fraction(12)
    assert spectral.q_weight(0, 0, t) == t
    tk = fractions.Fraction(3, 2)
    for tj in (t - tk, t, t + tk - fractions.Fraction(1, 8)):
        assert spectral.q_weight(tj, tk, t) == 0
    assert spectral.q_weight(5.0, 0.5, 12.0) == 6.5
    assert spectral.q_weight(30.0, 0.5, 12.0) == 2 * 30 - 36 - 0.5


def test_q_weight_even():
    rng = random.Random(3)
    for _ in range(200):
        tj, tk, t = rng.uniform(-40, 40), rng.uniform(0, 5), rng.uniform(1, 30)
        assert spectral.q_weight(tj, tk, t) == spectral.q_weight(-tj, tk, t)


def test_q_weight_closed_equals_piecewise():
    rng = random.Random(11)
    for _ in range(10000):
        t = fractions.Fraction(rng.randint(1, 4000), 64)
        tk = fractions.Fraction(rng.randint(0, 64), 64) * t
        tj = fractions.Fraction(rng.randint(-12000, 12000), 64)
        assert spectral.q_weight(tj, tk, t) == spectral.q_weight_piecewise(tj, tk, t)


def test_q_weight_floats_agree_exactly():
    rng = random.Random(12)
    for _ in range(2000):
        t = rng.uniform(1, 50)
        tk = rng.uniform(0, t)
        tj = rng.uniform(-3 * t, 3 * t)
        assert spectral.q_weight(tj, tk, t) == spectral.q_weight_piecewise(tj, tk, t)


def test_q_weight_piecewise_regime():
    with pytest.raises(PreconditionError):
        spectral.q_weight_piecewise(1.0, 5.0, 2.0)


@pytest.mark.parametrize('tk,t', [(0.5, 12.0), (2.0, 30.0), (0.0, 4.0)])
def test_q_window_edges(tk, t):
    lo, hi = spectral.q_window(tk, t)
    assert abs(spectral.q_weight(hi, tk, t) - spectral.COVERAGE_Q) < 1e-9
    if lo > 0:
        assert abs(spectral.q_weight(lo, tk, t) - spectral.COVERAGE_Q) < 1e-9
    assert spectral.q_weight((lo + hi) / 2, tk, t) <= spectral.COVERAGE_Q


def test_summand_envelope_concentrates():
    t, tk = 12.0, 0.5
    grid = np.arange(0.5, 30.0, 0.05)
    values = [spectral.summand_envelope(tj, tk, t) for tj in grid]
    peak = max(values)
    for tj, value in zip(grid, values):
        if abs(tj - t) > 5:
            assert value < 1e-3 * peak


S1, S2, S3 = 0.13 + 2.1j, -0.2 + 0.7j, 0.31 - 1.4j


def test_zagier_permutation_symmetry():
    base = spectral.zagier_triple(S1, S2, S3)
    for perm in itertools.permutations((S1, S2, S3)):
        assert close(spectral.zagier_triple(*perm), base, 1e-9)


def test_completed_triple_full_symmetry():
    base = spectral.completed_triple(S1, S2, S3)
    for perm in itertools.permutations((S1, S2, S3)):
        for signs in itertools.product((1, -1), repeat=3):
            args = [a * b for a, b in zip(signs, perm)]
            assert close(spectral.completed_triple(*args), base, 1e-9)


def test_zagier_sign_change_pairs_factors():
    a = spectral.zagier_triple(S1, S2, S3) * special.xi(1 + 2 * S3)
    b = spectral.zagier_triple(S1, S2, -S3) * special.xi(1 - 2 * S3)
    assert close(a, b, 1e-9)


def test_zagier_pole_named():
    with pytest.raises(PoleError) as err:
        spectral.zagier_triple(0.0, 0.25, 0.25)
    assert 'xi(1/2+s1+s2+s3)' in err.value.message


def test_constant_term():
    t = 2.5
    value = spectral.eisenstein_constant_term(t)
    assert rel_close(value, spectral.zagier_triple(-1j * t, -1j * t, -1j * t), 1e-12)
    assert abs(abs(value) - abs(spectral.zagier_triple(1j * t, 1j * t, 1j * t))) < 1e-12 * abs(
        value)


def test_rho1_squared():
    form = eis(3.0)
    expected = 2 * math.cosh(3 * math.pi) / form.l_sym2_at_1
    assert close(spectral.rho1_squared(form), expected, 1e-12)
    far = dataclasses.replace(form, t=300.0)
    assert math.isfinite(spectral.log_rho1_squared(far))
    with pytest.raises(PreconditionError):
        spectral.rho1_squared(form.withLSym2(None))


def test_eisen2_cusp_odd_form_vanishes(sample):
    odd = sample.byLabel('maass-1-9.5337-odd')
    assert spectral.eisen2_cusp(odd, 0.1 + 1j, 0.2) == 0


def test_eisen2_cusp_matches_three_eisenstein():
    nu = 4.0
    form = eis(nu)
    rho = 2 / special.xi(1 + 2j * nu)
    s1, s2 = 0.1 + 2j, 0.25 - 1j
    value = spectral.eisen2_cusp(form, s1, s2, rho1=rho)
    assert rel_close(value, spectral.zagier_triple(s1, s2, 1j * nu), 1e-10)


def test_eisen2_cusp_pairing():
    form = eis(2.5)
    s1, s2 = 0.1 + 2j, 0.2 + 1j
    a = spectral.eisen2_cusp(form, s1, s2) * special.xi(1 + 2 * s2)
    b = spectral.eisen2_cusp(form, s1, -s2) * special.xi(1 - 2 * s2)
    assert rel_close(a, b, 1e-10)


def test_cusp_term_regenerates_eisen2():
    t = 3.0
    form_k, form_j = eis(0.5), eis(2.5)
    rho_k = math.sqrt(spectral.rho1_squared(form_k))
    rho_j = math.sqrt(spectral.rho1_squared(form_j))
    pair = lfunctions.rankin_selberg_descriptor(form_k, form_j).closed_form(0.5 + 1j * t)
    expected = (rho_k * rho_j / 4 * pair / special.xi(1 - 2j * t)
                * spectral.eisen2_cusp(form_j, -1j * t, -1j * t, rho1=rho_j))
    value, error = spectral.phi_cusp_term(form_k, form_j, t)
    assert rel_close(value, expected, 1e-9)
    assert error == 0


def test_psi_tails_are_unimodular_combination():
    tails = spectral.tail_terms('psi_E3', 7.0)
    sizes = [abs(v) for _, _, v in tails.terms]
    assert np.allclose(sizes, [1, 3, 3, 1], atol=1e-10)
    assert tails.groups() == ('growth',)


def test_xi_ratio_bounded():
    for t in np.linspace(2, 100, 50):
        ratio = abs(special.xi(2j * t) / special.xi(1 + 2j * t))
        assert ratio <= 10 * (1 + t) ** 0.1


def test_phi_tails_decay():
    # exp(-pi t / 2) reaches 1e-20 only past t = 30 once the polynomial factors count.
    tails = spectral.tail_terms('phi_E3', 40.0, form=eis(0.5))
    assert abs(tails.value) < 1e-20
    assert tails.groups() == ('exponential',)


def test_phi_tails_match_general_formula():
    t = 2.0
    form = eis(0.5)
    r = special.xi(-2j * t) / special.xi(1 - 2j * t)
    tails = dict((n, v) for n, _, v in spectral.tail_terms('phi_E3', t, form=form).terms)
    assert rel_close(tails['E(1+2it)'], spectral.eisen2_cusp(form, -1j * t, 0.5 - 2j * t), 1e-9)
    assert rel_close(tails['E(1)'], 2 * r * spectral.eisen2_cusp(form, -1j * t, 0.5), 1e-9)
    assert rel_close(tails['E(1-2it)'], r * r * spectral.eisen2_cusp(form, -1j * t, 0.5 + 2j * t),
                 1e-9)


def test_eisenstein_tails_decay_classes():
    psi = spectral.tail_terms('E_E3_psi', 40.0, tau=1.0)
    assert abs(psi.value) < 1e-18
    assert psi.groups() == ('exponential',)
    phi = spectral.tail_terms('E_E3_phi', 40.0, tau=1.0)
    assert phi.groups() == ('polynomial',)
    assert len(psi.terms) + len(phi.terms) == 7
    assert math.isfinite(abs(phi.value))


def test_tail_terms_errors():
    with pytest.raises(PreconditionError):
        spectral.tail_terms('nope', 5.0)
    with pytest.raises(PreconditionError):
        spectral.tail_terms('psi_E3', 0.5)
    with pytest.raises(PreconditionError):
        spectral.tail_terms('phi_E3', 5.0)
    with pytest.raises(PreconditionError):
        spectral.tail_terms('E_E3_psi', 5.0)


def breakdown_sum(result):
    total = 0j
    for _, v in result.breakdown:
        total += v
    return total


def test_phi_e3_odd_form_is_tails_only(sample):
    odd = sample.byLabel('maass-1-9.5337-odd')
    t = 2.0
    result = spectral.phi_E3(odd, t, [])
    tails = spectral.tail_terms('phi_E3', t, form=odd)
    assert result.value == tails.value
    assert all(name.startswith('tail:') for name, _ in result.breakdown)


def test_phi_e3_empty_basis():
    result = spectral.phi_E3(eis(0.5), 3.0, [])
    assert result.component('cusp') == 0
    assert result.truncation['even_terms'] == 0
    assert math.isfinite(abs(result.value))
    assert abs(result.value - breakdown_sum(result)) < 1e-12
    assert result.error >= 0


def test_phi_e3_coverage_error():
    with pytest.raises(CoverageError) as err:
        spectral.phi_E3(eis(0.5), 12.0, [eis(9.0), eis(14.0)])
    lo, hi = err.value.missing
    assert lo == pytest.approx(14.0)
    assert hi == pytest.approx(spectral.q_window(0.5, 12.0)[1])


def test_phi_e3_covering_basis():
    basis = [eis(v) for v in (9.0, 12.0, 16.0, 20.0, 25.0)]
    basis.append(forms.MaassFormData('odd-filler', 11.0, 'odd', (), ()))
    result = spectral.phi_E3(eis(0.5), 12.0, basis)
    assert result.truncation['even_terms'] == 5
    assert result.component('cusp') != 0
    assert abs(result.value - breakdown_sum(result)) < 1e-12


def test_etau_e3_functional_equation():
    t, tau = 3.0, 1.0
    plus = spectral.etau_E3(tau, t, [])
    minus = spectral.etau_E3(-tau, t, [])
    a = special.xi(1 + 2j * tau) * plus.value
    b = special.xi(1 - 2j * tau) * minus.value
    assert rel_close(a, b, 1e-8)
    assert abs(abs(plus.value) - abs(minus.value)) < 1e-8 * max(1.0, abs(plus.value))
    assert abs(plus.value - breakdown_sum(plus)) < 1e-12


def test_etau_e3_breakdown_has_seven_tails():
    result = spectral.etau_E3(1.0, 3.0, [])
    tails = [n for n, _ in result.breakdown if n.startswith('tail:')]
    assert len(tails) == 7
    assert result.component('cusp') == 0


def test_etau_e3_with_basis_keeps_symmetry():
    t, tau = 12.0, 0.5
    basis = [eis(v) for v in (9.0, 12.0, 16.0, 20.0, 25.0)]
    plus = spectral.etau_E3(tau, t, basis)
    minus = spectral.etau_E3(-tau, t, basis)
    a = special.xi(1 + 2j * tau) * plus.component('cusp')
    b = special.xi(1 - 2j * tau) * minus.component('cusp')
    assert rel_close(a, b, 1e-9)


def test_watson_odd_form(sample):
    value = spectral.watson_value(sample.byLabel('maass-1-9.5337-odd'))
    assert value.value == 0 and value.error == 0


def test_watson_eisenstein_oracle():
    nu = 2.5
    value = spectral.watson_value(eis(nu))
    expected = abs(spectral.zagier_triple(1j * nu, 1j * nu, 1j * nu)) ** 2 / 8
    assert rel_close(value.value, expected, 1e-10)


def test_watson_scaling():
    form = eis(4.0)
    base = spectral.watson_value(form).value
    scaled = spectral.watson_value(form.withLSym2(8 * form.l_sym2_at_1)).value
    assert abs(scaled * 512 - base) < 1e-12 * base


def test_watson_nonnegative_on_fixture(sample):
    for form in sample:
        if form.isEisenstein():
            value = spectral.watson_value(form)
            assert value.value >= -value.error


def test_watson_deterministic_under_prime_order(sample):
    form = sample.forms[0]
    record = form.toRecord()
    order = list(range(len(record['primes'])))
    random.Random(5).shuffle(order)
    record['primes'] = [record['primes'][i] for i in order]
    record['eigenvalues'] = [record['eigenvalues'][i] for i in order]
    shuffled = forms.MaassFormData.fromRecord(record)
    a = spectral.watson_value(form)
    b = spectral.watson_value(shuffled)
    assert a.value == b.value
    assert math.isfinite(a.value)
