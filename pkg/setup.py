"""Build glue for the optional compiled training kernel.

The package works without the extension (a pure-Python kernel is selected at
import time), so a failed compilation degrades to a slower install rather
than a broken one.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "popmachine.trainer._qcore",
                ["src/popmachine/trainer/_qcore.pyx"],
                # No -march/-ffast-math: the pure and compiled kernels must
                # produce bit-identical float64 results.
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
