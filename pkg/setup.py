import os

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install; kernels fall back at import time
    cythonize = None

ext_modules = []
if cythonize is not None and os.environ.get("CMKISIN_NO_EXT") != "1":
    ext_modules = cythonize(
        [
            Extension(
                "cmkisin._kernels",
                ["src/cmkisin/_kernels.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
