# -*- coding: utf-8 -*-
#
# Spectral3 documentation build configuration file.

import datetime
import os
import sys

sys.path.insert(0, os.path.abspath('../..'))

extensions = []
templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = u'Spectral3'
copyright = u'%s, The Spectral3 Authors' % datetime.date.today().year

from spectral3.version import version_info as spectral3_version  # noqa
release = spectral3_version.version_string_with_vcs()
version = spectral3_version.canonical_version_string()

exclude_patterns = []
pygments_style = 'sphinx'
html_theme = 'default'
htmlhelp_basename = 'Spectral3doc'
man_pages = [
    ('index', 'spectral3', u'Spectral3 Documentation',
     [u'The Spectral3 Authors'], 1)
]
