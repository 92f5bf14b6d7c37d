# Sphinx configuration for the splitfed documentation.
import os
import sys

sys.path.insert(0, os.path.abspath('../../'))

from splitfed.version import version as package_version  # noqa: E402

project = 'splitfed'
copyright = '2026, splitfed developers'
author = 'splitfed developers'
release = package_version()
version = '.'.join(release.split('.')[:2])

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.napoleon',
]

# docstrings are Google style, Args/Returns/Raises
napoleon_google_docstring = True
napoleon_numpy_docstring = False
napoleon_use_param = False
napoleon_use_ivar = True
autodoc_member_order = 'bysource'

master_doc = 'index'
exclude_patterns = []
pygments_style = 'sphinx'

html_theme = 'sphinx_rtd_theme'
