"""Build script: compiles the optional BDD kernel extension.

The extension is a performance accelerator only.  If Cython or a C++
compiler is unavailable (or FTAKIT_SKIP_EXT is set), the build proceeds
without it and the package falls back to the pure-Python kernel.
"""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


def extensions():
    if os.environ.get("FTAKIT_SKIP_EXT"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "ftakit.bdd._core",
        sources=["src/ftakit/bdd/_core.pyx"],
        language="c++",
        extra_compile_args=["-O2", "-std=c++11"],
    )
    return cythonize([ext], language_level="3")


class OptionalBuildExt(build_ext):
    """Never fail the whole install over a broken compiler."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001 - any toolchain failure
            print(f"warning: skipping compiled kernel ({exc}); "
                  f"pure-Python fallback will be used")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            print(f"warning: could not build {ext.name} ({exc}); "
                  f"pure-Python fallback will be used")


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
