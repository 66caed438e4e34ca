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

import mpmath
import numpy as np
import pytest

from spectral3 import arithmetic
from spectral3 import coefficients
from spectral3 import forms
from spectral3 import special
from spectral3 import voronoi
from spectral3 import windows
from spectral3.errors import ConfigError, PoleError, PreconditionError

GAUSS = windows.SmoothWindow('gauss', 30.0)


@pytest.fixture(scope='module')
def eis():
    return forms.MaassFormData.eisenstein(1.7, prime_bound=5000)


def circle_moments(f, center=1.0, radius=0.05, nodes=256, orders=4):
    z = center + radius * np.exp(2j * math.pi * np.arange(nodes) / nodes)
    values = f(z)
    return [complex(np.mean(values * (z - center) ** (k + 1))) for k in range(orders)]


def test_g_factor_symmetric_point():
    assert abs(voronoi.g_factor('E4', 1, 0.5) - 1) < 1e-13


@pytest.mark.parametrize('kind,t_phi', [('E4', 0.0), ('Phi', 7.3)])
@pytest.mark.parametrize('sign', [1, -1])
def test_g_factor_unitary_on_critical_line(kind, t_phi, sign):
    for t in (0.7, 3.0, 11.0):
        assert abs(abs(voronoi.g_factor(kind, sign, 0.5 + 1j * t, t_phi)) - 1) < 1e-12


@pytest.mark.parametrize('sign', [1, -1])
def test_g_factor_phi_degenerates_to_e4(sign):
    for s in (0.2 + 1j, -1.3 + 4j, 0.5 - 9j):
        a = voronoi.g_factor('Phi', sign, s, 0.0)
        b = voronoi.g_factor('E4', sign, s)
        assert abs(a - b) < 1e-12 * abs(b)


def test_g_factor_odd_form_swaps_signs():
    s = -0.7 + 2.5j
    a = voronoi.g_factor('Phi', 1, s, 6.0, parity='odd')
    b = voronoi.g_factor('Phi', -1, s, 6.0)
    assert abs(a - b) < 1e-12 * abs(b)


def test_g_factor_matches_mpmath():
    s = mpmath.mpc(-1.3, 4.0)
    expected = mpmath.pi ** (4 * s - 2) * (mpmath.gamma((2 - s) / 2)
                                           / mpmath.gamma((1 + s) / 2)) ** 4
    value = voronoi.g_factor('E4', -1, complex(s))
    assert abs(value - complex(expected)) < 1e-11 * abs(complex(expected))


def test_g_factor_pole():
    with pytest.raises(PoleError):
        voronoi.g_factor('E4', 1, 1.0)
    with pytest.raises(PreconditionError):
        voronoi.g_factor('E4', 2, 0.5)


def test_w_transform_matches_line_integral_oracle():
    window = windows.SmoothWindow('gauss', 10.0)
    x = 0.37
    sigma = -0.5

    def integrand(t):
        s = mpmath.mpc(sigma, t)
        mellin = 10 ** s * window.sigma * mpmath.sqrt(2 * mpmath.pi) * mpmath.exp(
            window.sigma ** 2 * s * s / 2)
        g = mpmath.pi ** (4 * s - 2) * (mpmath.gamma((1 - s) / 2) / mpmath.gamma(s / 2)) ** 4
        return mellin * g * mpmath.power(x, s) / (2 * mpmath.pi)

    expected = complex(mpmath.quad(integrand, [-60, -30, -10, 0, 10, 30, 60]))
    value = voronoi.w_transform('E4', 1, x, window, abscissa=sigma)
    assert abs(value - expected) < 1e-7 * max(1.0, abs(expected))


@pytest.mark.parametrize('sign', [1, -1])
def test_w_transform_contour_independence(sign):
    window = windows.SmoothWindow('gauss', 10.0)
    x = 0.05
    values = [voronoi.w_transform('E4', sign, x, window, abscissa=a) for a in (-1.5, -2.0, -3.0)]
    for v in values[1:]:
        assert abs(v - values[0]) < 1e-8 * abs(values[0])


def test_w_transform_real_for_real_window():
    value = voronoi.w_transform('Phi', 1, 0.2, GAUSS, t_phi=4.0)
    bound = voronoi._transform('Phi', 1, GAUSS, 4.0, 'even', voronoi.DEFAULT_ABSCISSA,
                               voronoi._log_bucket([0.2], GAUSS.scale)).bound
    assert abs(value.imag) < 1e-12 * bound


def test_w_transform_linearity():
    w1 = windows.SmoothWindow('gauss', 10.0)
    w2 = windows.SmoothWindow('cos', 14.0)
    combo = windows.WindowCombination(((2.0, w1), (-0.5, w2)))
    x = np.array([0.03, 0.4, 2.5])
    lhs = voronoi.w_transform('E4', 1, x, combo)
    rhs = (2.0 * voronoi.w_transform('E4', 1, x, w1)
           - 0.5 * voronoi.w_transform('E4', 1, x, w2))
    assert np.all(np.abs(lhs - rhs) < 1e-10 * (1 + np.abs(rhs)))


def test_w_transform_signed_combination():
    wp = voronoi.w_transform('E4', 1, 0.3, GAUSS)
    wm = voronoi.w_transform('E4', -1, 0.3, GAUSS)
    both = voronoi.w_transform('E4', 0, [0.3, -0.3], GAUSS)
    assert abs(both[0] - (wp - wm)) < 1e-12 * (abs(wp) + abs(wm))
    assert abs(both[1] - (wp + wm)) < 1e-12 * (abs(wp) + abs(wm))


def test_w_transform_bad_arguments():
    with pytest.raises(PreconditionError):
        voronoi.w_transform('E4', 1, 0.0, GAUSS)
    with pytest.raises(PreconditionError):
        voronoi.w_transform('E4', 1, -0.2, GAUSS)
    with pytest.raises(PreconditionError):
        voronoi.w_transform('E4', 1, 0.2, GAUSS, abscissa=1.5)


def test_singular_part_trivial_modulus():
    for s in (2.0 + 0.5j, 0.6 + 3.0j):
        assert abs(voronoi.singular_part(s, 1, 1) - special.zeta(s) ** 4) < 1e-12


@pytest.mark.parametrize('m,c,a', [(1, 2, 1), (1, 3, 2), (1, 4, 3), (2, 2, 1),
                                   (2, 3, 1), (3, 2, 1), (1, 6, 5)])
def test_singular_part_matches_hurwitz_principal_part(m, c, a):
    twisted = circle_moments(lambda z: voronoi.twisted_series('E4', z, m, c, a))
    singular = circle_moments(lambda z: voronoi.singular_part(z, m, c))
    for t, s in zip(twisted, singular):
        assert abs(t - s) < 1e-8 * max(1.0, abs(s))


@pytest.mark.parametrize('m,c,a', [(2, 3, 2), (1, 4, 1)])
def test_twisted_series_matches_dirichlet_series(m, c, a):
    n_max = 20000
    coeffs = coefficients.CoefficientTable('E4').column(n_max, m, 1)[1:]
    n = np.arange(1, n_max + 1)
    abar = arithmetic.mod_inverse(a, c)
    twist = arithmetic.e_array((abar * n % c) / c)
    direct = complex(np.sum(coeffs * twist * n ** -4.0))
    assert abs(voronoi.twisted_series('E4', 4.0, m, c, a) - direct) < 1e-8


def test_twisted_phi_series_matches_dirichlet_series(eis):
    n_max = 4000
    coeffs = coefficients.CoefficientTable('Phi', eis).column(n_max)[1:]
    n = np.arange(1, n_max + 1)
    twist = arithmetic.e_array((n % 2) / 2)
    direct = complex(np.sum(coeffs * twist * n ** -5.0))
    assert abs(voronoi.twisted_series('Phi', 5.0, 1, 2, 1, eis) - direct) < 1e-9


def test_twisted_phi_series_needs_eisenstein_data():
    form = forms.synth_forms(3, 1, prime_bound=50).forms[0]
    with pytest.raises(PreconditionError):
        voronoi.twisted_series('Phi', 2.0, 1, 2, 1, form)


def test_singular_part_domain():
    with pytest.raises(PreconditionError):
        voronoi.singular_part(-0.2 + 1j, 1, 2)
    with pytest.raises(PoleError):
        voronoi.singular_part(1.0, 1, 2)


def test_residue_vanishes_for_fourth_order_zero():
    # Mellin transform (2^s - 2)^4 W~(s) vanishes to order 4 at s = 1.
    base = windows.SmoothWindow('gauss', 5.0)
    terms = tuple((math.comb(4, k) * (-2.0) ** (4 - k), base.withScale(5.0 * 2 ** k))
                  for k in range(5))
    combo = windows.WindowCombination(terms)
    killed = voronoi.residue_term(voronoi.VoronoiCase('E4', 1, 1, 1, combo))
    plain = voronoi.residue_term(voronoi.VoronoiCase('E4', 1, 1, 1, base))
    assert abs(killed) < 1e-10 * 16 * abs(plain)


def test_residue_matches_laurent_oracle():
    window = windows.SmoothWindow('gauss', 20.0)
    # (s - 1) zeta(s) = 1 + sum_n (-1)^n gamma_n / n! (s - 1)^(n + 1)
    series = [mpmath.mpf(1)] + [(-1) ** n * mpmath.stieltjes(n) / mpmath.factorial(n)
                                for n in range(3)]
    power = [mpmath.mpf(1)]
    for _ in range(4):
        power = [sum(power[i] * series[k - i] for i in range(min(len(power), k + 1)))
                 for k in range(4)]

    def mellin(s):
        return 20 ** s * window.sigma * mpmath.sqrt(2 * mpmath.pi) * mpmath.exp(
            window.sigma ** 2 * s * s / 2)

    taylor = mpmath.taylor(mellin, 1, 3)
    expected = complex(sum(power[k] * taylor[3 - k] for k in range(4)))
    value = voronoi.residue_term(voronoi.VoronoiCase('E4', 1, 1, 1, window))
    assert abs(value - expected) < 1e-8 * abs(expected)


def test_residue_contour_independence():
    case = voronoi.VoronoiCase('E4', 2, 3, 1, GAUSS)
    a = voronoi.residue_term(case, radius=0.05)
    b = voronoi.residue_term(case, radius=0.08)
    c = voronoi.residue_term(case, nodes=512)
    assert abs(a - b) < 1e-10 * abs(a)
    assert abs(a - c) < 1e-10 * abs(a)


def test_residue_of_degenerate_phi_matches_e4():
    form = forms.MaassFormData.eisenstein(0.0, prime_bound=50)
    phi = voronoi.residue_term(voronoi.VoronoiCase('Phi', 1, 2, 1, GAUSS, form))
    e4 = voronoi.residue_term(voronoi.VoronoiCase('E4', 1, 2, 1, GAUSS))
    assert abs(phi - e4) < 1e-9 * abs(e4)


def test_residue_of_cusp_form_is_zero():
    form = forms.synth_forms(3, 1, prime_bound=50).forms[0]
    assert voronoi.residue_term(voronoi.VoronoiCase('Phi', 1, 2, 1, GAUSS, form)) == 0


def test_residue_contour_touching_singularity():
    with pytest.raises(ConfigError):
        voronoi.residue_term(voronoi.VoronoiCase('E4', 1, 2, 1, GAUSS), radius=1.0)
    form = forms.MaassFormData.eisenstein(0.3, prime_bound=50)
    with pytest.raises(ConfigError):
        voronoi.residue_term(voronoi.VoronoiCase('Phi', 1, 1, 1, GAUSS, form), radius=0.7)


@pytest.mark.parametrize('m,c', [(1, 1), (1, 2), (2, 1), (1, 3)])
def test_verify_voronoi_e4(m, c):
    report = voronoi.verify_voronoi(voronoi.VoronoiCase('E4', m, c, 1, GAUSS))
    assert report.passed, report.asDict()
    assert report.truncation['dual_terms'] > 0


def test_verify_voronoi_saves_coefficient_cache():
    case = voronoi.VoronoiCase('E4', 1, 2, 1, GAUSS)
    assert coefficients.CoefficientTable.cached('E4').loaded == 0
    first = voronoi.verify_voronoi(case)
    table = coefficients.CoefficientTable.cached('E4')
    assert table.loaded > 0
    assert voronoi.verify_voronoi(case).lhs == first.lhs


def test_verify_voronoi_cos_window():
    window = windows.SmoothWindow('cos', 25.0)
    report = voronoi.verify_voronoi(voronoi.VoronoiCase('E4', 1, 2, 1, window))
    assert report.passed, report.asDict()


@pytest.mark.parametrize('m,c', [(1, 1), (1, 2)])
def test_verify_voronoi_phi(eis, m, c):
    report = voronoi.verify_voronoi(voronoi.VoronoiCase('Phi', m, c, 1, GAUSS, eis))
    assert report.passed, report.asDict()


def test_residue_cannot_be_ignored():
    report = voronoi.verify_voronoi(voronoi.VoronoiCase('E4', 1, 1, 1, GAUSS),
                                    include_residue=False)
    assert not report.passed
    assert report.rel_err > 1e-2


def test_dual_side_independent_of_representative():
    a = voronoi.verify_voronoi(voronoi.VoronoiCase('E4', 1, 3, 2, GAUSS))
    b = voronoi.verify_voronoi(voronoi.VoronoiCase('E4', 1, 3, 5, GAUSS))
    assert abs(a.rhs - b.rhs) < 1e-12 * abs(a.rhs)
    assert abs(a.lhs - b.lhs) < 1e-12 * abs(a.lhs)


def test_verify_voronoi_desk_scale():
    with pytest.raises(PreconditionError):
        voronoi.verify_voronoi(voronoi.VoronoiCase('E4', 1, 13, 1, GAUSS))
    with pytest.raises(PreconditionError):
        voronoi.verify_voronoi(voronoi.VoronoiCase('E4', 1, 2, 1, GAUSS.withScale(2000.0)))


def test_case_validation():
    with pytest.raises(PreconditionError):
        voronoi.VoronoiCase('E4', 1, 4, 2, GAUSS)
    with pytest.raises(PreconditionError):
        voronoi.VoronoiCase('Phi', 1, 4, 1, GAUSS)
    with pytest.raises(PreconditionError):
        voronoi.VoronoiCase('E4', 1, 4, 1, windows.SmoothWindow('cutoff', 10.0))
    with pytest.raises(PreconditionError):
        voronoi.VoronoiCase('GL3', 1, 4, 1, GAUSS)


def test_residue_envelope_power_law():
    base = voronoi.residue_envelope(2.0, 3.0, 100.0, 50.0, A=3)
    assert abs(voronoi.residue_envelope(4.0, 3.0, 100.0, 50.0, A=3) - base / 8) < 1e-12 * base
    assert abs(voronoi.residue_envelope(3.0 * 100.0 / 50.0, 3.0, 100.0, 50.0) - 50.0 / 3.0) < 1e-12
    with pytest.raises(PreconditionError):
        voronoi.residue_envelope(0.0, 1.0, 1.0, 1.0)


@pytest.mark.parametrize('c', [1, 2])
@pytest.mark.parametrize('T', [50.0, 100.0])
def test_residue_dominated_by_envelope(c, T):
    N = 40.0
    for ratio in (2.0, 3.0, 5.0):
        u = ratio * c * T / N
        window = windows.SmoothWindow('gauss', N).withOscillation(u, c, T)
        residue = voronoi.residue_term(voronoi.VoronoiCase('E4', 1, c, 1, window))
        assert abs(residue) <= 10 * voronoi.residue_envelope(u, c, T, N, A=2)
