"""Build script: compiles the optional fast kernel extension.

The extension is a performance twin of geosim.kernels._pure; the package
works without it. Set GEOSIM_SKIP_EXT=1 to skip the compile entirely.
"""

import os

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the extension if possible, fall back to pure Python otherwise."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler or Cython missing
            print(f"geosim: skipping fast kernel build ({exc}); "
                  "pure-Python fallback will be used")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"geosim: could not build {ext.name} ({exc}); "
                  "pure-Python fallback will be used")


def extensions():
    if os.environ.get("GEOSIM_SKIP_EXT") == "1":
        return []
    if not os.path.exists("src/geosim/kernels/_core.pyx"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    from setuptools import Extension

    ext = Extension(
        "geosim.kernels._core",
        ["src/geosim/kernels/_core.pyx"],
    )
    return cythonize([ext], language_level=3)


setup(
    ext_modules=extensions(),
    cmdclass={"build_ext": OptionalBuildExt},
)
