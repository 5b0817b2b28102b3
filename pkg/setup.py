"""Build the optional Cython kernels.

The package works without them: if Cython or a C compiler is missing the
build falls back to the pure numpy kernels.  OpenMP is used when the
compiler supports it and dropped otherwise.
"""

import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext
from setuptools.errors import CCompilerError, CompileError, LinkError

BUILD_ERRORS = (CCompilerError, CompileError, LinkError, OSError)


class OptionalBuildExt(build_ext):
    def build_extension(self, ext):
        try:
            super().build_extension(ext)
            return
        except BUILD_ERRORS:
            if "-fopenmp" not in ext.extra_compile_args:
                return self._skip(ext)
        ext.extra_compile_args.remove("-fopenmp")
        ext.extra_link_args.remove("-fopenmp")
        try:
            super().build_extension(ext)
        except BUILD_ERRORS:
            self._skip(ext)

    def _skip(self, ext):
        print(f"warning: could not build {ext.name}; using the numpy kernels",
              file=sys.stderr)


ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "infusedlasso._kernels",
                ["src/infusedlasso/_kernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3", "-fopenmp"],
                extra_link_args=["-fopenmp"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
