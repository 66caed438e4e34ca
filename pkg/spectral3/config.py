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

import os

from xdg import BaseDirectory
import yaml

import voluptuous as v

from spectral3.errors import ConfigError

SUITES = ('hecke', 'voronoi', 'oscillatory', 'spectral', 'sieve')
DEFAULT_EPSILON = 0.01
DEFAULT_N_MAX = 3000


def data_path():
    return BaseDirectory.save_data_path('spectral3')


def config_path():
    return os.path.join(BaseDirectory.xdg_config_home, 'spectral3', 'spectral3.yaml')


def find_config(path=None):
    """The explicit path, else the user's config file if there is one."""
    if path is not None:
        return os.path.expanduser(path)
    if os.path.exists(config_path()):
        return config_path()
    return None


class ConfigSchema(object):
    suite = v.Any(*SUITES)

    voronoi_grid = {'kinds': [v.Any('Phi', 'E4')],
                    'm': [v.All(int, v.Range(min=1))],
                    'c': [v.All(int, v.Range(min=1))],
                    'windows': [v.Any('gauss', 'cos', 'bump', 'dyadic')],
                    'scale': v.All(v.Coerce(float), v.Range(min=0, min_included=False)),
                    }

    def getSchema(self, data=None):
        schema = v.Schema({v.Required('suites'): v.All([self.suite], v.Length(min=1)),
                           'forms': str,
                           'seed': int,
                           'synthetic-count': v.All(int, v.Range(min=1)),
                           'tolerance': v.All(v.Coerce(float),
                                              v.Range(min=0, min_included=False)),
                           'n-max': v.All(int, v.Range(min=1)),
                           'voronoi-grid': self.voronoi_grid,
                           'workers': v.All(int, v.Range(min=1)),
                           'epsilon': v.All(v.Coerce(float), v.Range(min=0)),
                           'report-dir': str,
                           'dburi': str,
                           'log-file': str,
                           })
        return schema


class Config(object):
    def __init__(self, path=None, data=None):
        """Load and validate a suite configuration.

        Either path (a YAML file) or data (an already parsed mapping) is
        given; every validation failure is a ConfigError.
        """
        if data is None:
            data = self.load(path)
        self.path = path
        if not isinstance(data, dict):
            raise ConfigError('configuration must be a mapping of key: value lines')
        try:
            ConfigSchema().getSchema(data)(data)
        except v.Invalid as e:
            raise ConfigError('invalid configuration: %s' % (e,))
        self.config = data
        self.suites = list(data['suites'])
        self.forms = data.get('forms')
        if self.forms is not None:
            self.forms = os.path.expanduser(self.forms)
        self.seed = data.get('seed', 0)
        self.synthetic_count = data.get('synthetic-count', 5)
        tolerance = data.get('tolerance')
        self.tolerance = float(tolerance) if tolerance is not None else None
        self.n_max = data.get('n-max', DEFAULT_N_MAX)
        grid = data.get('voronoi-grid', {})
        self.voronoi_grid = {'kinds': grid.get('kinds', ['Phi', 'E4']),
                             'm': grid.get('m', [1, 2, 3, 4]),
                             'c': grid.get('c', list(range(1, 13))),
                             'windows': grid.get('windows', ['gauss', 'cos']),
                             'scale': float(grid.get('scale', 30.0))}
        self.workers = data.get('workers', 1)
        self.epsilon = float(data.get('epsilon', DEFAULT_EPSILON))
        if 'report-dir' in data:
            self.report_dir = os.path.expanduser(data['report-dir'])
        else:
            self.report_dir = os.path.join(data_path(), 'reports')
        if 'dburi' in data:
            self.dburi = data['dburi']
        else:
            self.dburi = 'sqlite:///' + os.path.join(data_path(), 'spectral3.db')
        log_file = data.get('log-file')
        self.log_file = os.path.expanduser(log_file) if log_file else None

    @staticmethod
    def load(path):
        try:
            with open(os.path.expanduser(path)) as f:
                return yaml.safe_load(f)
        except (OSError, TypeError) as e:
            raise ConfigError('cannot read configuration %s: %s' % (path, e))
        except yaml.YAMLError as e:
            raise ConfigError('cannot parse configuration %s: %s' % (path, e))

    @property
    def epsilon1(self):
        return 26 * self.epsilon

    def asDict(self):
        return dict(self.config)
