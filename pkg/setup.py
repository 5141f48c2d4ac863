"""Builds the optional compiled kernel; the package works without it."""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("LOZENGE_NO_EXT", "") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("lozenge._kernels", ["src/lozenge/_kernels.pyx"], include_dirs=[np.get_include()])],
            compiler_directives={"language_level": 3, "boundscheck": False, "wraparound": False},
        )

setup(ext_modules=ext_modules)
