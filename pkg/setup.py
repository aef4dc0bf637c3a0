"""Build script for the optional compiled kernels.

The package works without the extension: ``buspo._kernels`` falls back to a
pure-Python implementation of the same routines. ``optional=True`` keeps a
failed compile from failing the install.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "buspo._kernels._speedups",
                ["src/buspo/_kernels/_speedups.pyx"],
                optional=True,
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
