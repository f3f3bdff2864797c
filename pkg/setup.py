"""Builds the optional compiled instantiation kernel.

The package works without it (a pure-numpy fallback is selected at import),
but template instantiation is roughly an order of magnitude faster with the
extension built.
"""
from setuptools import Extension, setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "pamc.kernels._core",
                ["src/pamc/kernels/_core.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
