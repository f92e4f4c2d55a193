"""Build the optional compiled evaluator core.

The extension compiles the same source as the pure-Python evaluator.  When
Cython or a C compiler is missing the package still installs and runs on the
pure-Python core.
"""
import os

from setuptools import setup

ext_modules = []
if not os.environ.get("FAASFORGE_NO_EXT"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("faasforge.interpreter._walk_c", ["src/faasforge/interpreter/_walk_c.pyx"],
                       extra_compile_args=["-O2"])],
            compiler_directives={"language_level": "3"},
            quiet=True,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
