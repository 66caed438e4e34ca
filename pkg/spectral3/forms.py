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

"""Maass form records: Satake data, the forms file and synthetic forms."""

import dataclasses
import functools
import json
import logging
import math
import os
import typing

import numpy as np
import sympy
import voluptuous as v

from spectral3 import special
from spectral3.errors import CoverageError, PreconditionError, SchemaError

log = logging.getLogger('spectral3.forms')

SCHEMA_VERSION = 1
SUPPORTED_VERSIONS = (1,)
SAMPLE_FORMS_PATH = os.path.join(os.path.dirname(__file__), 'data', 'sample_forms.json')

DecimalString = v.Match(r'^-?[0-9]+(\.[0-9]+)?([eE][-+]?[0-9]+)?$')


class FormsSchema(object):
    record = {v.Required('label'): str,
              v.Required('t'): DecimalString,
              v.Required('parity'): v.Any('even', 'odd'),
              v.Required('primes'): [int],
              v.Required('eigenvalues'): [DecimalString],
              'l-sym2-at-1': v.Any(None, DecimalString),
              'source': str,
              'kind': v.Any('cusp', 'eisenstein'),
              }

    def getSchema(self):
        return v.Schema({v.Required('schema-version'): int,
                         v.Required('forms'): [dict],
                         'note': str})

    def getRecordSchema(self):
        return v.Schema(self.record)


@dataclasses.dataclass(frozen=True)
class SatakeLocal(object):
    p: int
    alpha: complex
    beta: complex

    def __post_init__(self):
        if abs(self.alpha * self.beta - 1) > 1e-12:
            raise PreconditionError('Satake pair at p=%s has alpha*beta=%s' % (
                self.p, self.alpha * self.beta))
        if abs((self.alpha + self.beta).imag) > 1e-12:
            raise PreconditionError('Satake pair at p=%s has non-real trace' % (self.p,))

    @classmethod
    def fromEigenvalue(cls, p, lam):
        disc = complex(lam * lam - 4) ** 0.5
        return cls(p, (lam + disc) / 2, (lam - disc) / 2)

    @property
    def lam(self):
        return (self.alpha + self.beta).real

    def params(self):
        return (self.alpha, self.beta)


@dataclasses.dataclass(frozen=True)
class MaassFormData(object):
    """A level-one Maass form (or an Eisenstein degeneration) by its Hecke data."""

    label: str
    t: float
    parity: str
    primes: tuple
    eigenvalues: tuple
    l_sym2_at_1: typing.Optional[float] = None
    source: str = ''
    kind: str = 'cusp'

    def __post_init__(self):
        if self.t < 0:
            raise SchemaError('spectral parameter must be nonnegative, got %s' % (self.t,))
        if self.parity not in ('even', 'odd'):
            raise SchemaError('parity must be even or odd, got %s' % (self.parity,))
        if len(self.primes) != len(self.eigenvalues):
            raise SchemaError('%s primes but %s eigenvalues' % (
                len(self.primes), len(self.eigenvalues)))
        if any(a >= b for a, b in zip(self.primes, self.primes[1:])):
            raise SchemaError('primes must be strictly increasing')
        if self.l_sym2_at_1 is not None and self.l_sym2_at_1 <= 0:
            raise SchemaError('L(1, sym^2) must be positive')

    @classmethod
    def eisenstein(cls, nu, prime_bound=3000, label=None):
        """The degenerate form with alpha_p = p^(i nu)."""
        primes = tuple(sympy.primerange(2, prime_bound + 1))
        eigenvalues = tuple(2 * math.cos(nu * math.log(p)) for p in primes)
        l_sym2 = None
        if nu != 0:
            # zeta(s) zeta(s +- 2i nu) with the pole of zeta(s) removed.
            l_sym2 = abs(special.zeta(1 + 2j * nu)) ** 2
        if label is None:
            label = 'eisenstein-%r' % (nu,)
        return cls(label, abs(nu), 'even', primes, eigenvalues, l_sym2,
                   'eisenstein degeneration', 'eisenstein')

    @property
    def delta(self):
        return 0 if self.parity == 'even' else 1

    def isEven(self):
        return self.parity == 'even'

    def isEisenstein(self):
        return self.kind == 'eisenstein'

    @property
    def prime_bound(self):
        return self.primes[-1] if self.primes else 1

    @functools.cached_property
    def _satake(self):
        return {p: SatakeLocal.fromEigenvalue(p, lam)
                for p, lam in zip(self.primes, self.eigenvalues)}

    def satake(self, p):
        try:
            return self._satake[p]
        except KeyError:
            raise CoverageError(p, 'form %s has no Hecke data at p=%s' % (self.label, p))

    def lam(self, p):
        return self.satake(p).lam

    def covers(self, n):
        return n <= 1 or max(p for p, k in sympy.factorint(n).items()) <= self.prime_bound

    def withLSym2(self, value):
        return dataclasses.replace(self, l_sym2_at_1=value)

    def toRecord(self):
        record = {'label': self.label,
                  't': repr(float(self.t)),
                  'parity': self.parity,
                  'primes': list(self.primes),
                  'eigenvalues': [repr(float(x)) for x in self.eigenvalues],
                  'source': self.source,
                  'kind': self.kind}
        if self.l_sym2_at_1 is not None:
            record['l-sym2-at-1'] = repr(float(self.l_sym2_at_1))
        elif self.isEisenstein():
            # An explicit null keeps the value from being derived on load.
            record['l-sym2-at-1'] = None
        return record

    @classmethod
    def fromRecord(cls, record):
        kind = record.get('kind', 'cusp')
        t = float(record['t'])
        l_sym2 = record.get('l-sym2-at-1')
        if l_sym2 is not None:
            l_sym2 = float(l_sym2)
        elif 'l-sym2-at-1' not in record and kind == 'eisenstein' and t > 0:
            l_sym2 = abs(special.zeta(1 + 2j * t)) ** 2
        if len(record['primes']) != len(record['eigenvalues']):
            raise SchemaError('%s primes but %s eigenvalues' % (
                len(record['primes']), len(record['eigenvalues'])))
        # The prime table may come in any order.
        pairs = sorted(zip(record['primes'], (float(x) for x in record['eigenvalues'])))
        return cls(record['label'], t, record['parity'], tuple(p for p, _ in pairs),
                   tuple(lam for _, lam in pairs), l_sym2,
                   record.get('source', ''), kind)


@dataclasses.dataclass
class FormsFile(object):
    version: int = SCHEMA_VERSION
    forms: list = dataclasses.field(default_factory=list)
    note: str = ''

    def __len__(self):
        return len(self.forms)

    def __iter__(self):
        return iter(self.forms)

    def byLabel(self, label):
        for form in self.forms:
            if form.label == label:
                return form
        raise PreconditionError('No form labelled %s' % (label,))

    def window(self, lo, hi):
        return [f for f in self.forms if lo <= f.t <= hi]


def load_forms(path=None):
    if path is None:
        path = SAMPLE_FORMS_PATH
    try:
        with open(path) as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise SchemaError('parse failure in %s at line %s: %s' % (path, e.lineno, e.msg))
    except OSError as e:
        raise SchemaError('cannot read forms file %s: %s' % (path, e))
    schema = FormsSchema()
    try:
        data = schema.getSchema()(data)
    except v.Invalid as e:
        raise SchemaError('forms file %s: %s' % (path, e))
    if data['schema-version'] not in SUPPORTED_VERSIONS:
        raise SchemaError('unsupported schema version %s' % (data['schema-version'],))
    record_schema = schema.getRecordSchema()
    forms = []
    seen = set()
    for index, record in enumerate(data['forms']):
        try:
            record = record_schema(record)
        except v.Invalid as e:
            raise SchemaError(str(e), record=index)
        if record['label'] in seen:
            raise SchemaError('duplicate label %s' % (record['label'],), record=index)
        seen.add(record['label'])
        # Files hold t > 0 only; the t = 0 degeneration is built in memory.
        if float(record['t']) <= 0:
            raise SchemaError('t must be strictly positive', record=index)
        try:
            forms.append(MaassFormData.fromRecord(record))
        except SchemaError as e:
            raise SchemaError(e.message, record=index)
    log.debug('Loaded %s forms from %s' % (len(forms), path))
    return FormsFile(data['schema-version'], forms, data.get('note', ''))


def dump_forms(forms_file):
    data = {'schema-version': forms_file.version,
            'forms': [f.toRecord() for f in forms_file.forms]}
    if forms_file.note:
        data['note'] = forms_file.note
    return json.dumps(data, indent=2) + '\n'


def write_forms(forms_file, path):
    with open(path, 'w') as f:
        f.write(dump_forms(forms_file))


def synth_forms(seed, count, t_range=(10.0, 30.0), prime_bound=100):
    """Random unitary Satake data: reproducible for a fixed seed."""
    if count < 1:
        raise PreconditionError('synth_forms needs count >= 1, got %s' % (count,))
    rng = np.random.default_rng(seed)
    primes = tuple(int(p) for p in sympy.primerange(2, prime_bound + 1))
    forms = []
    for i in range(count):
        t = float(rng.uniform(*t_range))
        theta = rng.uniform(0, math.pi, len(primes))
        eigenvalues = tuple(float(x) for x in 2 * np.cos(theta))
        l_sym2 = float(np.exp(rng.uniform(math.log(0.5), math.log(2.0))))
        parity = 'even' if i % 2 == 0 else 'odd'
        forms.append(MaassFormData('synth-%s-%04d' % (seed, i), t, parity, primes,
                                   eigenvalues, l_sym2, 'synthetic seed=%s' % (seed,)))
    return FormsFile(SCHEMA_VERSION, forms, 'synthetic Satake data')
