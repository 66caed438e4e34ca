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

import pytest

from spectral3 import forms
from spectral3.errors import CoverageError, PreconditionError, SchemaError


def write_json(path, data):
    with open(path, 'w') as f:
        json.dump(data, f)
    return str(path)


def record(label='a', t='10.5', parity='even'):
    return {'label': label, 't': t, 'parity': parity, 'primes': [2, 3],
            'eigenvalues': ['0.5', '-1.25'], 'l-sym2-at-1': '1.2'}


def test_empty_file(tmp_path):
    path = write_json(tmp_path / 'empty.json', {'schema-version': 1, 'forms': []})
    assert len(forms.load_forms(path)) == 0


def test_sample_fixture():
    sample = forms.load_forms()
    first = sample.forms[0]
    assert first.isEven()
    assert abs(first.t - 13.779751351891) < 1e-12
    assert first.prime_bound >= 2999
    odd = sample.byLabel('maass-1-9.5337-odd')
    assert odd.parity == 'odd'
    eis = [f for f in sample if f.isEisenstein()]
    assert eis and all(f.l_sym2_at_1 > 0 for f in eis)


def test_duplicate_label(tmp_path):
    path = write_json(tmp_path / 'dup.json',
                      {'schema-version': 1, 'forms': [record('x'), record('x')]})
    with pytest.raises(SchemaError) as err:
        forms.load_forms(path)
    assert 'duplicate label x' in err.value.message
    assert err.value.record == 1


def test_invariant_violation_names_record(tmp_path):
    bad = record('b')
    bad['eigenvalues'] = ['0.5']
    path = write_json(tmp_path / 'bad.json', {'schema-version': 1, 'forms': [record(), bad]})
    with pytest.raises(SchemaError) as err:
        forms.load_forms(path)
    assert err.value.record == 1


def test_prime_table_order_is_irrelevant():
    shuffled = record('c')
    shuffled['primes'] = [3, 2]
    shuffled['eigenvalues'] = ['-1.25', '0.5']
    assert forms.MaassFormData.fromRecord(shuffled) == forms.MaassFormData.fromRecord(
        dict(record('c')))


def test_schema_mismatch(tmp_path):
    bad = record()
    bad['t'] = 10.5
    path = write_json(tmp_path / 'bad.json', {'schema-version': 1, 'forms': [bad]})
    with pytest.raises(SchemaError):
        forms.load_forms(path)
    path = write_json(tmp_path / 'v9.json', {'schema-version': 9, 'forms': []})
    with pytest.raises(SchemaError):
        forms.load_forms(path)


def test_parse_failure_reports_line(tmp_path):
    path = tmp_path / 'broken.json'
    path.write_text('{\n  "schema-version": 1,\n  "forms": [\n}\n')
    with pytest.raises(SchemaError) as err:
        forms.load_forms(str(path))
    assert 'line' in err.value.message


def test_nonpositive_t_rejected(tmp_path):
    path = write_json(tmp_path / 'zero.json', {'schema-version': 1, 'forms': [record(t='0')]})
    with pytest.raises(SchemaError):
        forms.load_forms(path)


def test_round_trip(tmp_path):
    original = forms.synth_forms(4, 3, prime_bound=60)
    path = str(tmp_path / 'synth.json')
    forms.write_forms(original, path)
    loaded = forms.load_forms(path)
    assert loaded.forms == original.forms


def test_synth_deterministic():
    a = forms.dump_forms(forms.synth_forms(42, 4, prime_bound=100))
    b = forms.dump_forms(forms.synth_forms(42, 4, prime_bound=100))
    assert a == b
    c = forms.dump_forms(forms.synth_forms(43, 4, prime_bound=100))
    assert a != c


def test_synth_properties():
    data = forms.synth_forms(8, 6, t_range=(20.0, 25.0), prime_bound=200)
    assert [f.parity for f in data] == ['even', 'odd'] * 3
    for f in data:
        assert 20.0 <= f.t <= 25.0
        assert 0.5 <= f.l_sym2_at_1 <= 2.0
        assert all(abs(x) <= 2 for x in f.eigenvalues)


def test_synth_rejects_zero_count():
    with pytest.raises(PreconditionError):
        forms.synth_forms(1, 0)


def test_satake_from_eigenvalue():
    s = forms.SatakeLocal.fromEigenvalue(5, 1.3)
    assert abs(s.alpha * s.beta - 1) < 1e-15
    assert abs(s.lam - 1.3) < 1e-15
    with pytest.raises(PreconditionError):
        forms.SatakeLocal(2, 2.0, 2.0)


def test_eisenstein_degeneration():
    nu = 3.25
    f = forms.MaassFormData.eisenstein(nu, prime_bound=30)
    for p in (2, 3, 29):
        s = f.satake(p)
        assert {round(x.imag, 12) for x in s.params()} == {
            round(math.sin(nu * math.log(p)), 12), round(-math.sin(nu * math.log(p)), 12)}
    with pytest.raises(CoverageError):
        f.satake(31)


def test_eisenstein_at_zero_is_memory_only(tmp_path):
    f = forms.MaassFormData.eisenstein(0.0, prime_bound=10)
    assert f.t == 0
    assert f.l_sym2_at_1 is None
    path = str(tmp_path / 'zero.json')
    forms.write_forms(forms.FormsFile(forms=[f]), path)
    with pytest.raises(SchemaError):
        forms.load_forms(path)


def test_eisenstein_sym2_derived_when_absent(tmp_path):
    f = forms.MaassFormData.eisenstein(2.5, prime_bound=10)
    data = {'schema-version': 1, 'forms': [f.toRecord()]}
    del data['forms'][0]['l-sym2-at-1']
    [loaded] = forms.load_forms(write_json(tmp_path / 'eis.json', data)).forms
    assert loaded.l_sym2_at_1 == pytest.approx(f.l_sym2_at_1, rel=1e-12)


def test_eisenstein_missing_sym2_survives_round_trip(tmp_path):
    f = forms.MaassFormData.eisenstein(2.5, prime_bound=10).withLSym2(None)
    assert f.toRecord()['l-sym2-at-1'] is None
    path = str(tmp_path / 'eis.json')
    forms.write_forms(forms.FormsFile(forms=[f]), path)
    [loaded] = forms.load_forms(path).forms
    assert loaded.l_sym2_at_1 is None
    assert loaded == f
