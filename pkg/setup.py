"""Build the optional Cython kernels.

    pip install -e . --no-build-isolation      # builds infconv._kernels in place

If Cython or a C compiler is unavailable the package still installs and
falls back to the pure-Python kernels in ``infconv._fallback``.
"""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("INFCONV_NO_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "infconv._kernels",
                    ["src/infconv/_kernels.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
                "language_level": "3",
            },
        )

setup(ext_modules=ext_modules)
