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

"""The run index: one row per suite run and one per check result."""

import datetime
import logging
import math
import re
import threading
import time

import sqlalchemy
from sqlalchemy import (create_engine, MetaData, Table, Column, Integer, String, Boolean,
                        DateTime, Float, Text)
from sqlalchemy.schema import ForeignKey
from sqlalchemy.orm import registry, relationship, sessionmaker, scoped_session
from sqlalchemy.orm.session import Session

metadata = MetaData()
run_table = Table(
    'run', metadata,
    Column('key', Integer, primary_key=True),
    Column('name', String(255), index=True, unique=True, nullable=False),
    Column('created', DateTime, index=True, nullable=False),
    Column('config_hash', String(64), index=True, nullable=False),
    Column('passed', Boolean, index=True, nullable=False),
    Column('report_path', Text),
    )
check_result_table = Table(
    'check_result', metadata,
    Column('key', Integer, primary_key=True),
    Column('run_key', Integer, ForeignKey("run.key"), index=True),
    Column('suite', String(64), index=True, nullable=False),
    Column('check', String(255), index=True, nullable=False),
    Column('passed', Boolean, index=True, nullable=False),
    Column('abs_err', Float),
    Column('rel_err', Float),
    Column('tolerance', Float),
    Column('runtime', Float),
    Column('error', Text),
    )


def _finite(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


class Run(object):
    def __init__(self, name, config_hash, passed, report_path=None, created=None):
        self.name = name
        self.config_hash = config_hash
        self.passed = passed
        self.report_path = report_path
        if created is None:
            created = datetime.datetime.utcnow()
        self.created = created

    def createCheckResult(self, *args, **kw):
        session = Session.object_session(self)
        result = CheckResult(self, *args, **kw)
        self.check_results.append(result)
        session.add(result)
        session.flush()
        return result


class CheckResult(object):
    def __init__(self, run, suite, check, passed, abs_err=None, rel_err=None,
                 tolerance=None, runtime=None, error=None):
        self.run_key = run.key
        self.suite = suite
        self.check = check
        self.passed = passed
        self.abs_err = _finite(abs_err)
        self.rel_err = _finite(rel_err)
        self.tolerance = _finite(tolerance)
        self.runtime = _finite(runtime)
        self.error = error


mapper_registry = registry()
mapper_registry.map_imperatively(Run, run_table, properties=dict(
    check_results=relationship(CheckResult, backref='run',
                               order_by=check_result_table.c.key,
                               cascade='all, delete-orphan'),
    ))
mapper_registry.map_imperatively(CheckResult, check_result_table)


def match(expr, item):
    if item is None:
        return False
    return re.match(expr, item) is not None


@sqlalchemy.event.listens_for(sqlalchemy.engine.Engine, "connect")
def add_sqlite_match(dbapi_connection, connection_record):
    if hasattr(dbapi_connection, 'create_function'):
        dbapi_connection.create_function("matches", 2, match)


class Database(object):
    def __init__(self, dburi, search=None):
        self.log = logging.getLogger('spectral3.db')
        self.dburi = dburi
        self.search = search
        self.engine = create_engine(self.dburi)
        metadata.create_all(self.engine)
        # Objects returned from a session stay usable after it closes.
        self.session_factory = sessionmaker(bind=self.engine,
                                            expire_on_commit=False,
                                            autoflush=False)
        self.session = scoped_session(self.session_factory)
        self.lock = threading.Lock()

    def getSession(self):
        return DatabaseSession(self)


class DatabaseSession(object):
    def __init__(self, database):
        self.database = database
        self.session = database.session
        self.search = database.search

    def __enter__(self):
        self.database.lock.acquire()
        self.start = time.time()
        return self

    def __exit__(self, etype, value, tb):
        if etype:
            self.session().rollback()
        else:
            self.session().commit()
        self.session().close()
        self.session = None
        end = time.time()
        self.database.log.debug("Database lock held %s seconds" % (end - self.start,))
        self.database.lock.release()

    def abort(self):
        self.session().rollback()

    def commit(self):
        self.session().commit()

    def delete(self, obj):
        self.session().delete(obj)

    def createRun(self, *args, **kw):
        run = Run(*args, **kw)
        self.session().add(run)
        self.session().flush()
        return run

    def getRun(self, key):
        try:
            return self.session().query(Run).filter_by(key=key).one()
        except sqlalchemy.orm.exc.NoResultFound:
            return None

    def getRunByName(self, name):
        try:
            return self.session().query(Run).filter_by(name=name).one()
        except sqlalchemy.orm.exc.NoResultFound:
            return None

    def getRuns(self):
        return self.session().query(Run).order_by(Run.created, Run.key).all()

    def getCheckResults(self, query=None):
        """Check results matching a run-index query (all of them when None)."""
        q = self.session().query(CheckResult)
        if query:
            q = q.filter(self.search.parse(query))
        return q.order_by(CheckResult.key).all()

    def recordReports(self, name, config_hash, reports, report_path=None, errors=None,
                      created=None):
        """Index one suite run; reports are (suite, VerificationReport) pairs."""
        passed = all(r.passed for _, r in reports) and not errors
        run = self.createRun(name, config_hash, passed, report_path, created)
        for suite, r in reports:
            error = r.details.get('error') if isinstance(r.details, dict) else None
            run.createCheckResult(suite, r.check, r.passed, r.abs_err, r.rel_err,
                                  r.tolerance, r.runtime,
                                  error.get('message') if error else None)
        for e in errors or []:
            run.createCheckResult(e.get('suite', ''), e.get('check', ''), False,
                                  error=e.get('message'))
        return run
