import os

import numpy as np
from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("QDSLOW_NO_EXT"):
    from Cython.Build import cythonize

    extensions = [
        Extension(
            "qdslow._kernels",
            ["src/qdslow/_kernels.pyx"],
            include_dirs=[np.get_include()],
            extra_compile_args=["-O3"],
        )
    ]
    ext_modules = cythonize(
        extensions,
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )

setup(ext_modules=ext_modules)
