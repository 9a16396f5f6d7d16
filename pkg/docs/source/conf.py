# -*- coding: utf-8 -*-
#
# DChannel documentation build configuration file.
#
# This file is execfile()d with the current directory set to its
# containing dir.

import sys
import os

# The package and the DChannel entry script live two levels up.
sys.path.insert(0, os.path.abspath('../../'))

# -- General configuration ------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.doctest',
    'sphinx.ext.mathjax',
]

templates_path = ['_templates']

source_suffix = '.rst'

master_doc = 'index'

project = u'DChannel'
copyright = u'The DChannel Authors'
author = u'The DChannel Authors'

version = u'1.0'
release = u'1.0.0'

language = 'en'

exclude_patterns = []

pygments_style = 'sphinx'

todo_include_todos = False

# keep members in source order, as the modules group them
autodoc_member_order = 'bysource'

# -- Options for HTML output ----------------------------------------------

html_static_path = []

htmlhelp_basename = 'DChanneldoc'

# -- Options for LaTeX output ---------------------------------------------

latex_elements = {
}

latex_documents = [
    (master_doc, 'DChannel.tex', u'DChannel Documentation',
     author, 'manual'),
]

# -- Options for manual page output ---------------------------------------

man_pages = [
    (master_doc, 'dchannel', u'DChannel Documentation',
     [author], 1)
]

# -- Options for Texinfo output -------------------------------------------

texinfo_documents = [
    (master_doc, 'DChannel', u'DChannel Documentation',
     author, 'DChannel', 'D-band MIMO channel simulator.',
     'Miscellaneous'),
]
