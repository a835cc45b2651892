import os

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install; scsframe.kernels falls back at import
    cythonize = None

ext_modules = []
if cythonize is not None and not os.environ.get("SCS_NO_EXT"):
    ext_modules = cythonize(
        [
            Extension(
                "scsframe._ckernels",
                ["src/scsframe/_ckernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                optional=True,
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )

setup(ext_modules=ext_modules)
