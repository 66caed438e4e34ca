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

"""Verification reports and their on-disk bundles."""

import csv
import dataclasses
import datetime
import hashlib
import json
import logging
import os
import time

import numpy as np

log = logging.getLogger('spectral3.report')

NEAR_ZERO = 1e-300
CSV_FIELDS = ['run', 'check', 'passed', 'abs_err', 'rel_err', 'tolerance', 'runtime']


def _jsonable(value):
    if isinstance(value, (complex, np.complexfloating)):
        value = complex(value)
        if value.imag == 0:
            return value.real
        return [value.real, value.imag]
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return [_jsonable(x) for x in value.tolist()]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(x) for x in value]
    return value


@dataclasses.dataclass
class VerificationReport(object):
    check: str
    lhs: complex
    rhs: complex
    abs_err: float
    rel_err: float
    tolerance: float
    passed: bool
    inputs: dict = dataclasses.field(default_factory=dict)
    runtime: float = 0.0
    truncation: dict = dataclasses.field(default_factory=dict)
    details: dict = dataclasses.field(default_factory=dict)

    @staticmethod
    def _passes(err, tolerance):
        if tolerance == 0:
            return err == 0
        return err < tolerance

    @classmethod
    def compare(cls, check, lhs, rhs, tolerance, inputs=None, runtime=0.0,
                truncation=None, details=None, floor=None):
        """Build a report from two sides.

        The relative error uses |rhs| unless it is below floor (a near-zero
        target), in which case the absolute error decides.
        """
        if floor is None:
            floor = NEAR_ZERO
        abs_err = float(abs(complex(lhs) - complex(rhs)))
        if abs(complex(rhs)) > floor:
            rel_err = abs_err / abs(complex(rhs))
        else:
            rel_err = abs_err
        return cls(check, complex(lhs), complex(rhs), abs_err, rel_err, tolerance,
                   cls._passes(rel_err, tolerance), inputs or {}, runtime,
                   truncation or {}, details or {})

    @classmethod
    def fromArrays(cls, check, lhs, rhs, abs_err, rel_err, tolerance, inputs=None,
                   runtime=0.0, truncation=None, details=None):
        err = abs_err if tolerance == 0 else rel_err
        return cls(check, complex(lhs), complex(rhs), abs_err, rel_err, tolerance,
                   cls._passes(err, tolerance), inputs or {}, runtime,
                   truncation or {}, details or {})

    @classmethod
    def observation(cls, check, value, inputs=None, details=None, runtime=0.0):
        """A logged quantity with nothing to compare against; always passes."""
        return cls(check, complex(value), complex(value), 0.0, 0.0, float('inf'), True,
                   inputs or {}, runtime, {}, details or {})

    @classmethod
    def failure(cls, check, error, inputs=None):
        """A check that raised; the error object goes into details."""
        if hasattr(error, 'asDict'):
            info = error.asDict()
        else:
            info = {'error': error.__class__.__name__, 'message': str(error)}
        return cls(check, complex('nan'), complex('nan'), float('nan'), float('nan'),
                   0.0, False, inputs or {}, 0.0, {}, {'error': info})

    def asDict(self):
        return _jsonable(dataclasses.asdict(self))


class Timer(object):
    def __enter__(self):
        self.start = time.time()
        return self

    def __exit__(self, *args):
        self.elapsed = time.time() - self.start


def config_hash(config_data):
    blob = json.dumps(_jsonable(config_data), sort_keys=True).encode('utf8')
    return hashlib.sha1(blob).hexdigest()[:10]


def run_name(config_data, now=None):
    if now is None:
        now = datetime.datetime.now(datetime.timezone.utc)
    return '%s-%s' % (now.strftime('%Y%m%dT%H%M%SZ'), config_hash(config_data))


def write_bundle(report_dir, name, reports, config_data=None, errors=None):
    """Write one JSON bundle and append its rows to the CSV index."""
    os.makedirs(report_dir, exist_ok=True)
    path = os.path.join(report_dir, '%s.json' % (name,))
    bundle = {'run': name,
              'config': _jsonable(config_data or {}),
              'passed': all(r.passed for r in reports) and not errors,
              'reports': [r.asDict() for r in reports],
              'errors': [_jsonable(e) for e in (errors or [])]}
    with open(path, 'w') as f:
        json.dump(bundle, f, indent=2)
        f.write('\n')
    index = os.path.join(report_dir, 'index.csv')
    new = not os.path.exists(index)
    with open(index, 'a', newline='') as f:
        writer = csv.DictWriter(f, fieldnames=CSV_FIELDS)
        if new:
            writer.writeheader()
        for r in reports:
            writer.writerow({'run': name, 'check': r.check, 'passed': int(r.passed),
                             'abs_err': repr(r.abs_err), 'rel_err': repr(r.rel_err),
                             'tolerance': repr(r.tolerance), 'runtime': '%.3f' % r.runtime})
    log.info('Wrote %s reports to %s' % (len(reports), path))
    return path


def write_csv(stream, reports):
    writer = csv.DictWriter(stream, fieldnames=CSV_FIELDS[1:])
    writer.writeheader()
    for r in reports:
        writer.writerow({'check': r.check, 'passed': int(r.passed),
                         'abs_err': repr(r.abs_err), 'rel_err': repr(r.rel_err),
                         'tolerance': repr(r.tolerance), 'runtime': '%.3f' % r.runtime})
