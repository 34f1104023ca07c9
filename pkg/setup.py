"""Build script: compiles the simplex hot-loop extension when a toolchain is
available, otherwise the package falls back to the pure-numpy kernel."""

import os

from setuptools import setup
from setuptools.extension import Extension


def ext_modules():
    if os.environ.get("DCFED_NO_EXT"):
        return []
    pyx = os.path.join("src", "dcfed", "_kernels", "_simplex.pyx")
    c = os.path.join("src", "dcfed", "_kernels", "_simplex.c")
    try:
        import numpy
    except ImportError:
        return []
    if os.path.exists(pyx):
        try:
            from Cython.Build import cythonize
        except ImportError:
            if not os.path.exists(c):
                return []
            sources = [c]
        else:
            return cythonize(
                [
                    Extension(
                        "dcfed._kernels._simplex",
                        [pyx],
                        include_dirs=[numpy.get_include()],
                    )
                ],
                language_level=3,
            )
    elif os.path.exists(c):
        sources = [c]
    else:
        return []
    return [
        Extension(
            "dcfed._kernels._simplex",
            sources,
            include_dirs=[numpy.get_include()],
        )
    ]


setup(ext_modules=ext_modules())
