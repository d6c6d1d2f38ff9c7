"""Build script for the optional compiled kernels.

The package works without the extension: rceval.lexical.kernels falls back
to the pure-Python implementations when the compiled module is missing.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "rceval.lexical._ckernels",
                ["src/rceval/lexical/_ckernels.pyx"],
            )
        ],
        language_level="3",
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
