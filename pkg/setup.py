from setuptools import Extension, setup

import numpy
from Cython.Build import cythonize

# Compiled time-step kernels (LSTM recurrence, biquad cascade).  The package
# falls back to the pure-numpy implementations in cirpeaks.kernels._pure when
# this extension is unavailable.
extensions = [
    Extension(
        "cirpeaks.kernels._speedups",
        ["src/cirpeaks/kernels/_speedups.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

setup(ext_modules=cythonize(extensions, language_level=3))
