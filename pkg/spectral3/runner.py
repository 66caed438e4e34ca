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

import collections
import logging
import threading

from spectral3 import report
from spectral3.errors import Spectral3Error

HIGH_PRIORITY = 0
NORMAL_PRIORITY = 1
LOW_PRIORITY = 2


class MultiQueue(object):
    def __init__(self, priorities):
        self.queues = collections.OrderedDict()
        for key in priorities:
            self.queues[key] = collections.deque()
        self.condition = threading.Condition()
        self.incomplete = []

    def qsize(self):
        with self.condition:
            count = 0
            for q in self.queues.values():
                count += len(q)
            return count + len(self.incomplete)

    def put(self, item, priority):
        added = False
        with self.condition:
            if item not in self.queues[priority]:
                self.queues[priority].append(item)
                added = True
            self.condition.notify()
        return added

    def get(self):
        with self.condition:
            while True:
                for q in self.queues.values():
                    try:
                        ret = q.popleft()
                        self.incomplete.append(ret)
                        return ret
                    except IndexError:
                        pass
                self.condition.wait()

    def find(self, klass, priority):
        with self.condition:
            return [item for item in self.queues[priority] if isinstance(item, klass)]

    def complete(self, item):
        with self.condition:
            if item in self.incomplete:
                self.incomplete.remove(item)


class Task(object):
    def __init__(self, priority=NORMAL_PRIORITY):
        self.log = logging.getLogger('spectral3.runner')
        self.priority = priority
        self.succeeded = None
        self.event = threading.Event()
        self.results = []
        self.error = None

    def complete(self, success):
        self.succeeded = success
        self.event.set()

    def wait(self, timeout=None):
        self.event.wait(timeout)
        return self.succeeded

    def __eq__(self, other):
        raise NotImplementedError()


class CheckTask(Task):
    """One verification check; func returns a report or a list of them."""

    def __init__(self, suite, name, func, inputs=None, priority=NORMAL_PRIORITY):
        super(CheckTask, self).__init__(priority)
        self.suite = suite
        self.name = name
        self.func = func
        self.inputs = inputs or {}

    def __repr__(self):
        return '<CheckTask %s:%s>' % (self.suite, self.name)

    def __eq__(self, other):
        if other.__class__ == self.__class__:
            return (self.suite, self.name) == (other.suite, other.name)
        return False

    def __hash__(self):
        return hash((self.suite, self.name))

    def run(self, runner):
        with report.Timer() as timer:
            result = self.func()
        if isinstance(result, report.VerificationReport):
            result = [result]
        for r in result:
            if not r.runtime:
                r.runtime = timer.elapsed
        self.results = list(result)

    def fail(self, error):
        self.error = error
        self.results = [report.VerificationReport.failure(
            '%s:%s' % (self.suite, self.name), error, self.inputs)]


class StopTask(Task):
    def __repr__(self):
        return '<StopTask>'

    def __eq__(self, other):
        return False

    def __hash__(self):
        return id(self)


class Runner(object):
    def __init__(self, workers=1):
        self.log = logging.getLogger('spectral3.runner')
        self.workers = max(1, int(workers))
        self.queue = MultiQueue([HIGH_PRIORITY, NORMAL_PRIORITY, LOW_PRIORITY])

    def submitTask(self, task):
        if not self.queue.put(task, task.priority):
            task.fail(Spectral3Error('duplicate check %r' % (task,)))
            task.complete(False)

    def run(self):
        while True:
            task = self.queue.get()
            if isinstance(task, StopTask):
                self.queue.complete(task)
                return
            self._run(task)

    def _run(self, task):
        self.log.debug('Run: %s' % (task,))
        try:
            task.run(self)
            task.complete(True)
        except Spectral3Error as e:
            self.log.warning('Check %s raised %s: %s' % (task, e.__class__.__name__, e.message))
            task.fail(e)
            task.complete(False)
        except Exception as e:
            self.log.exception('Exception running check %s' % (task,))
            task.fail(e)
            task.complete(False)
        finally:
            self.queue.complete(task)

    def runAll(self, tasks):
        """Run tasks on the worker pool; results come back in submission order."""
        threads = []
        for i in range(self.workers):
            thread = threading.Thread(target=self.run, name='spectral3-worker-%s' % (i,))
            thread.daemon = True
            thread.start()
            threads.append(thread)
        for task in tasks:
            self.submitTask(task)
        for task in tasks:
            task.wait()
        for thread in threads:
            self.queue.put(StopTask(LOW_PRIORITY), LOW_PRIORITY)
        for thread in threads:
            thread.join()
        return tasks
