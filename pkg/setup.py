"""Build script for the optional compiled event kernel.

The package is pure Python plus one Cython extension (fireline._kernel) that
mirrors the pure-Python engine bit for bit.  If Cython or a C compiler is
missing the build falls back to the pure-Python engine; nothing else changes.
"""

from setuptools import setup

try:
    import numpy
    from setuptools import Extension
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "fireline._kernel",
                ["src/fireline/_kernel.pyx"],
                include_dirs=[numpy.get_include()],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
