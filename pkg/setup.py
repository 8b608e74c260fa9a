import os

from setuptools import Extension, setup

# The compiled enumeration kernel is optional: without Cython (or with
# WITTHEIGHT_NO_EXT=1) the package installs and runs on the pure-Python kernel.
ext_modules = []
if not os.environ.get("WITTHEIGHT_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "wittheight.kernels._cenum",
                    ["src/wittheight/kernels/_cenum.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
