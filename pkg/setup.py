"""Build script: compiles the optional Cython kernels.

The package works without the extension (a pure-numpy fallback is selected at
import time), so build failures of the extension are demoted to warnings.
"""

import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Build the extension if possible, warn and continue otherwise."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # pragma: no cover - toolchain dependent
            sys.stderr.write(
                "warning: building tantrix._speed failed (%s); "
                "falling back to the pure-numpy kernels\n" % exc
            )

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # pragma: no cover - toolchain dependent
            sys.stderr.write(
                "warning: building %s failed (%s); "
                "falling back to the pure-numpy kernels\n" % (ext.name, exc)
            )


def extensions():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError:  # pragma: no cover - build environment dependent
        return []
    from setuptools import Extension

    ext = Extension(
        "tantrix.kernels._speed",
        sources=["src/tantrix/kernels/_speed.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], language_level=3)


setup(
    ext_modules=extensions(),
    cmdclass={"build_ext": optional_build_ext},
)
