"""Build script.

The compiled kernel extension is optional: if Cython or a C compiler is
unavailable the package installs anyway and falls back to the numpy
implementations in tkhodge.kernels._backend_np at import time.
"""

import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the extension if possible, warn and continue otherwise."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(
            "WARNING: building the compiled kernels failed (%s); "
            "falling back to the pure numpy backend." % exc,
            file=sys.stderr,
        )


def _extensions():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError as exc:
        print(
            "WARNING: %s; compiled kernels will not be built." % exc,
            file=sys.stderr,
        )
        return []
    from setuptools import Extension

    ext = Extension(
        "tkhodge.kernels._core",
        sources=["src/tkhodge/kernels/_core.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], compiler_directives={"language_level": 3})


setup(
    ext_modules=_extensions(),
    cmdclass={"build_ext": OptionalBuildExt},
)
