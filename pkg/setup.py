import os

import numpy as np
from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("SASAKI3_PURE_PYTHON"):
    try:
        from Cython.Build import cythonize
    except ImportError:  # pure-Python install; jets fall back to numpy kernels
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "sasaki3._jetcore",
                    ["src/sasaki3/_jetcore.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
