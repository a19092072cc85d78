"""Build script: compiles the optional jet-arithmetic extension.

The package works without the extension (a pure-numpy backend is selected
at import time); a failed compile therefore only costs speed.
"""

from setuptools import setup

try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "jetsketch._kernels._jetcore",
                ["src/jetsketch/_kernels/_jetcore.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
