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

import datetime

import pytest

from spectral3 import db
from spectral3 import search
from spectral3.errors import PreconditionError, SearchSyntaxError
from spectral3.report import VerificationReport


def reports():
    return [
        ('hecke', VerificationReport.compare('identity:hecke34', 2.0, 2.0, 1e-8)),
        ('hecke', VerificationReport.compare('identity:lfour_square', 1.0, 1.0 + 1e-7, 1e-8)),
        ('voronoi', VerificationReport.compare('voronoi', 5.0, 5.0 + 1e-9, 1e-5)),
        ('voronoi', VerificationReport.failure('voronoi:E4:m=1:c=13:gauss',
                                               PreconditionError('c=13 exceeds 12'))),
    ]


@pytest.fixture
def database(tmp_path):
    database = db.Database('sqlite:///%s' % (tmp_path / 'index.db',), search.SearchCompiler())
    with database.getSession() as session:
        session.recordReports('20260101T000000Z-aaaa', 'aaaa', reports()[:2],
                              created=datetime.datetime(2026, 1, 1))
        session.recordReports('20260301T000000Z-bbbb', 'bbbb', reports(), '/tmp/bbbb.json',
                              created=datetime.datetime(2026, 3, 1))
    return database


def checks(database, query=None):
    with database.getSession() as session:
        return sorted((r.run.name[-4:], r.check) for r in session.getCheckResults(query))


def test_runs_are_indexed(database):
    with database.getSession() as session:
        runs = session.getRuns()
        assert [r.name for r in runs] == ['20260101T000000Z-aaaa', '20260301T000000Z-bbbb']
        assert [r.passed for r in runs] == [False, False]
        run = session.getRunByName('20260301T000000Z-bbbb')
        assert run.report_path == '/tmp/bbbb.json'
        assert run.config_hash == 'bbbb'
        assert [c.suite for c in run.check_results] == ['hecke', 'hecke', 'voronoi', 'voronoi']
        failed = run.check_results[3]
        assert failed.error == 'c=13 exceeds 12'
        # NaN errors of a failed check are stored as NULL.
        assert failed.rel_err is None
        assert session.getRun(run.key).name == run.name
        assert session.getRunByName('nope') is None


def test_passing_run(tmp_path):
    database = db.Database('sqlite:///%s' % (tmp_path / 'index.db',))
    with database.getSession() as session:
        run = session.recordReports('ok', 'cccc', reports()[:1])
        assert run.passed
        run = session.recordReports('with-errors', 'cccc', reports()[:1],
                                    errors=[{'suite': 'sieve', 'check': 'luo',
                                             'message': 'empty window'}])
        assert not run.passed
        assert run.check_results[-1].check == 'luo'


def test_abort_rolls_back(tmp_path):
    database = db.Database('sqlite:///%s' % (tmp_path / 'index.db',))
    with pytest.raises(RuntimeError):
        with database.getSession() as session:
            session.recordReports('lost', 'dddd', reports())
            raise RuntimeError('interrupted')
    with database.getSession() as session:
        assert session.getRuns() == []


def test_all_results(database):
    assert len(checks(database)) == 6


@pytest.mark.parametrize('query,expected', [
    ('suite:hecke', [('aaaa', 'identity:hecke34'), ('aaaa', 'identity:lfour_square'),
                     ('bbbb', 'identity:hecke34'), ('bbbb', 'identity:lfour_square')]),
    ('suite:voronoi and status:pass', [('bbbb', 'voronoi')]),
    ('check:voronoi*', [('bbbb', 'voronoi'), ('bbbb', 'voronoi:E4:m=1:c=13:gauss')]),
    ('status:error', [('bbbb', 'voronoi:E4:m=1:c=13:gauss')]),
    ('status:fail suite:hecke', [('aaaa', 'identity:lfour_square'),
                                 ('bbbb', 'identity:lfour_square')]),
    ('since:2026-02-01 and suite:hecke', [('bbbb', 'identity:hecke34'),
                                         ('bbbb', 'identity:lfour_square')]),
    ("until:2026-02-01 not check:'identity:hecke34'", [('aaaa', 'identity:lfour_square')]),
    ('run:*aaaa and rel_err:>1e-9', [('aaaa', 'identity:lfour_square')]),
    ('rel_err:<=1e-9 or status:error', [('aaaa', 'identity:hecke34'),
                                        ('bbbb', 'identity:hecke34'),
                                        ('bbbb', 'voronoi'),
                                        ('bbbb', 'voronoi:E4:m=1:c=13:gauss')]),
    ("check:'^identity:(hecke|lfour)' and -(suite:voronoi or run:*aaaa)",
     [('bbbb', 'identity:hecke34'), ('bbbb', 'identity:lfour_square')]),
])
def test_search(database, query, expected):
    assert checks(database, query) == expected


@pytest.mark.parametrize('query', [
    'colour:red',
    'status:maybe',
    'suite:',
    'since:yesterday',
    'rel_err:>',
    '(suite:hecke',
])
def test_search_syntax_errors(database, query):
    with pytest.raises(SearchSyntaxError):
        checks(database, query)
