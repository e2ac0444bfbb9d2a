"""Build script: compiles the optional fast-kernel extension when possible.

The package is fully functional without the extension (a numpy fallback is
selected at import time), so any compilation failure downgrades to a warning
instead of aborting the install.  Build the extension in place for development
with:

    python setup.py build_ext --inplace
"""

import warnings

from setuptools import setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """build_ext that tolerates a missing compiler toolchain."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, headers missing, ...
            warnings.warn(f"skipping compiled kernels ({exc}); "
                          "atrisk will use the pure-python backend")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"skipping compiled kernels ({exc}); "
                          "atrisk will use the pure-python backend")


def extensions():
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError as exc:
        warnings.warn(f"Cython/numpy unavailable ({exc}); "
                      "building without compiled kernels")
        return []
    ext = Extension(
        "atrisk._ckernels",
        sources=["src/atrisk/_ckernels.pyx"],
        include_dirs=[numpy.get_include()],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(
    ext_modules=extensions(),
    cmdclass={"build_ext": optional_build_ext},
)
