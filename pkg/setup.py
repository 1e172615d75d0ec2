"""Build script: compiles the optional Levenshtein extension if Cython is available.

The package works without the extension (a pure-Python fallback is selected
at import time), so any build failure here downgrades to a warning instead
of aborting the install.
"""

import sys
import warnings

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/tutordesk/_lev.pyx"],
        compiler_directives={"language_level": 3},
    )
except ImportError:
    warnings.warn(
        "Cython not installed - building without the compiled distance kernel "
        "(pure-Python fallback will be used)."
    )
except Exception as exc:  # noqa: BLE001 - any compile problem is non-fatal
    warnings.warn(f"Could not build the distance extension ({exc}); using pure Python.")
    ext_modules = []

setup(ext_modules=ext_modules)
