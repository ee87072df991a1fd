# Sphinx configuration of the cartan-py documentation, built by ../../build_docs.sh
import os
import sys

sys.path.insert(0, os.path.abspath("../../"))

project = "cartan-py"
author = "cartan-py developers"
copyright = "2026, cartan-py developers"
release = "0.1.0"
version = ".".join(release.split(".")[:2])

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.intersphinx",
    "sphinx.ext.mathjax",
]

# Docstrings are reST field lists (``:param:``, ``:raises:``)
autodoc_default_options = {
    "members": True,
    "undoc-members": False,
    "show-inheritance": True,
}
autodoc_member_order = "bysource"
autodoc_typehints = "description"

intersphinx_mapping = {
    "python": ("https://docs.python.org/3", None),
    "numpy": ("https://numpy.org/doc/stable/", None),
    "scipy": ("https://docs.scipy.org/doc/scipy/", None),
}

exclude_patterns = ["cartan.*.tests*.rst"]
html_theme = "sphinx_rtd_theme"
