import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    # No Cython: ship the pure-Python kernels only (selected at import).
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "pfoco._kernels._core",
                ["src/pfoco/_kernels/_core.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
