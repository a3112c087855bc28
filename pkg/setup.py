"""Build script: compiles the Java token scanner extension when possible.

The package works without the extension (a pure-Python scanner is selected
at import time), so a failed compile only costs speed.  Set MIGMINE_PURE=1
to skip the extension build entirely.
"""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Demote extension build failures to a warning."""

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
        print(f"WARNING: scanner extension not built ({exc}); "
              "falling back to the pure-Python scanner")


extensions = []
if not os.environ.get("MIGMINE_PURE"):
    try:
        from Cython.Build import cythonize

        extensions = cythonize(
            [Extension("migmine.javafacts._scanner",
                       ["src/migmine/javafacts/_scanner.pyx"])],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
            },
        )
    except ImportError:
        print("WARNING: Cython not available; using the pure-Python scanner")

setup(ext_modules=extensions, cmdclass={"build_ext": optional_build_ext})
