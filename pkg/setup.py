"""Build script: compiles the optional Cython kernel extension.

The extension is a pure speed-up; if Cython or a C compiler is missing the
package installs anyway and falls back to the NumPy kernels at import time.
"""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """build_ext that downgrades compiler failures to a warning."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # pragma: no cover - depends on toolchain
            print(f"warning: compiled kernels skipped ({exc!r}); "
                  "falling back to NumPy kernels")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # pragma: no cover - depends on toolchain
            print(f"warning: building {ext.name} failed ({exc!r}); "
                  "falling back to NumPy kernels")


ext_modules = []
cmdclass = {}
if os.environ.get("DIRPOLY_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "dirpoly._kernels",
                    ["src/dirpoly/_kernels.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level=3,
        )
        cmdclass["build_ext"] = optional_build_ext
    except Exception as exc:  # pragma: no cover - depends on toolchain
        print(f"warning: Cython unavailable ({exc!r}); "
              "falling back to NumPy kernels")

setup(ext_modules=ext_modules, cmdclass=cmdclass)
