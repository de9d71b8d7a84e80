"""Build script for the optional compiled kernels.

Without Cython the package installs in pure-Python mode.
"""

from setuptools import setup

try:
    from Cython.Build import cythonize
    from setuptools import Extension
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("strata_lab._kernels._ckernels", ["src/strata_lab/_kernels/_ckernels.pyx"],
                   extra_compile_args=["-O2"])],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
