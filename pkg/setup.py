"""Build script: compiles the hot decoder kernels when Cython is available.

The package works without the extension (a numpy fallback is selected at
import time), so the build degrades gracefully on machines without a
compiler toolchain.
"""

from setuptools import setup

ext_modules = []
try:
    import os.path

    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    if not os.path.exists("src/mimqms/_kernels.pyx"):
        raise ImportError
    ext_modules = cythonize(
        [
            Extension(
                "mimqms._kernels",
                ["src/mimqms/_kernels.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
