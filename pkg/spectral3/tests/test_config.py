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

import pytest

from spectral3 import coefficients
from spectral3 import config
from spectral3.errors import ConfigError


def write(tmp_path, text):
    path = tmp_path / 'spectral3.yaml'
    path.write_text(text)
    return str(path)


def test_defaults(tmp_path):
    cfg = config.Config(write(tmp_path, 'suites: [hecke]\nreport-dir: %s\ndburi: sqlite://\n'
                              % (tmp_path,)))
    assert cfg.suites == ['hecke']
    assert cfg.forms is None
    assert cfg.seed == 0
    assert cfg.synthetic_count == 5
    assert cfg.tolerance is None
    assert cfg.n_max == 3000
    assert cfg.workers == 1
    assert cfg.epsilon == 0.01
    assert cfg.epsilon1 == pytest.approx(0.26)
    assert cfg.voronoi_grid['kinds'] == ['Phi', 'E4']
    assert cfg.voronoi_grid['m'] == [1, 2, 3, 4]
    assert cfg.voronoi_grid['c'] == list(range(1, 13))
    assert cfg.report_dir == str(tmp_path)
    assert cfg.dburi == 'sqlite://'
    assert cfg.log_file is None


def test_every_key(tmp_path):
    text = '\n'.join([
        'suites:',
        '  - hecke',
        '  - sieve',
        'forms: ~/forms.json',
        'seed: 7',
        'synthetic-count: 3',
        'tolerance: 1e-6',
        'n-max: 500',
        'voronoi-grid:',
        '  kinds: [E4]',
        '  m: [1]',
        '  c: [1, 2, 3]',
        '  windows: [cos]',
        '  scale: 20',
        'workers: 4',
        'epsilon: 0.05',
        'report-dir: %s' % (tmp_path,),
        'dburi: sqlite:///%s/index.db' % (tmp_path,),
        'log-file: %s/spectral3.log' % (tmp_path,),
        ''])
    cfg = config.Config(write(tmp_path, text))
    assert cfg.suites == ['hecke', 'sieve']
    assert cfg.forms == os.path.expanduser('~/forms.json')
    assert (cfg.seed, cfg.synthetic_count, cfg.n_max, cfg.workers) == (7, 3, 500, 4)
    assert cfg.tolerance == 1e-6
    assert cfg.voronoi_grid == {'kinds': ['E4'], 'm': [1], 'c': [1, 2, 3],
                                'windows': ['cos'], 'scale': 20.0}
    assert cfg.epsilon1 == pytest.approx(1.3)
    assert cfg.log_file == '%s/spectral3.log' % (tmp_path,)
    assert cfg.asDict()['seed'] == 7


@pytest.mark.parametrize('text', [
    'suites: [hecke, gl3]\n',
    'seed: 1\n',
    'suites: []\n',
    'suites: [hecke]\nworkers: 0\n',
    'suites: [hecke]\nvoronoi-grid:\n  kinds: [GL3]\n',
    'suites: [hecke]\ncolour: red\n',
    '- hecke\n',
    'suites: [hecke\n',
])
def test_invalid_configuration(tmp_path, text):
    with pytest.raises(ConfigError):
        config.Config(write(tmp_path, text))


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError) as err:
        config.Config(str(tmp_path / 'absent.yaml'))
    assert 'absent.yaml' in err.value.message


def test_config_from_data():
    cfg = config.Config(data={'suites': ['voronoi'], 'dburi': 'sqlite://', 'report-dir': '.'})
    assert cfg.path is None
    assert cfg.suites == ['voronoi']


def test_cache_dir_environment(monkeypatch, tmp_path):
    monkeypatch.setenv('SPECTRAL3_CACHE_DIR', str(tmp_path))
    assert coefficients.cache_dir() == str(tmp_path)
    monkeypatch.delenv('SPECTRAL3_CACHE_DIR')
    assert coefficients.cache_dir() == os.path.join('.', '.cache')


def test_find_config(monkeypatch, tmp_path):
    monkeypatch.setattr(config.BaseDirectory, 'xdg_config_home', str(tmp_path))
    assert config.find_config() is None
    assert config.find_config('~/other.yaml') == os.path.expanduser('~/other.yaml')
    (tmp_path / 'spectral3').mkdir()
    (tmp_path / 'spectral3' / 'spectral3.yaml').write_text('suites: [hecke]\n')
    assert config.find_config() == str(tmp_path / 'spectral3' / 'spectral3.yaml')
