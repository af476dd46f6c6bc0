"""Build script for the optional compiled kernel backend.

The package is fully functional without the extension (a NumPy fallback is
selected at import time); building it just makes the per-step Q-network
math faster.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "submask.backends._native",
                ["src/submask/backends/_native.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
else:
    ext_modules = []

setup(ext_modules=ext_modules)
