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

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_ACCURACY = 3


class Spectral3Error(Exception):
    exit_code = EXIT_CONFIG

    def __init__(self, message):
        super(Spectral3Error, self).__init__(message)
        self.message = message

    def asDict(self):
        return {'error': self.__class__.__name__,
                'message': self.message}


class PreconditionError(Spectral3Error):
    pass


class PoleError(Spectral3Error):
    exit_code = EXIT_ACCURACY

    def __init__(self, point, message=None):
        if message is None:
            message = 'Pole at %s' % (point,)
        super(PoleError, self).__init__(message)
        self.point = point

    def asDict(self):
        d = super(PoleError, self).asDict()
        d['point'] = str(self.point)
        return d


class CoverageError(Spectral3Error):
    def __init__(self, missing, message=None):
        if message is None:
            message = 'Data does not cover %s' % (missing,)
        super(CoverageError, self).__init__(message)
        self.missing = missing

    def asDict(self):
        d = super(CoverageError, self).asDict()
        d['missing'] = str(self.missing)
        return d


class RangeError(Spectral3Error):
    pass


class AccuracyError(Spectral3Error):
    exit_code = EXIT_ACCURACY

    def __init__(self, bound, message=None):
        if message is None:
            message = 'Accuracy target missed, achieved bound %g' % (bound,)
        super(AccuracyError, self).__init__(message)
        self.bound = bound

    def asDict(self):
        d = super(AccuracyError, self).asDict()
        d['bound'] = self.bound
        return d


class NumericalError(Spectral3Error):
    exit_code = EXIT_ACCURACY


class RegimeError(Spectral3Error):
    exit_code = EXIT_ACCURACY


class ConfigError(Spectral3Error):
    pass


class SchemaError(Spectral3Error):
    def __init__(self, message, record=None):
        if record is not None:
            message = 'record %s: %s' % (record, message)
        super(SchemaError, self).__init__(message)
        self.record = record


class SearchSyntaxError(Spectral3Error):
    pass
