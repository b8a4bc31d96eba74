"""Build script: compiles the optional Cython kernel extension.

The package works without the extension (a pure-numpy fallback is selected
at import time); building it makes the optimizer inner loops ~10-40x faster.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

DIRECTIVES = {
    "language_level": "3",
    "boundscheck": False,
    "wraparound": False,
    "cdivision": True,
}

if cythonize is not None:
    ext_modules = cythonize(
        [Extension("qcoh._kernels", ["src/qcoh/_kernels.pyx"])],
        compiler_directives=DIRECTIVES,
    )
else:
    ext_modules = []

setup(ext_modules=ext_modules)
