"""Build hook for the optional compiled Bessel kernels.

The package works without the extension; ``epdkit._backend`` falls back to
the numpy implementation when ``epdkit._kernels`` cannot be imported.
"""
import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("EPDKIT_NO_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError:  # pragma: no cover - build without Cython
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "epdkit._kernels",
                    ["src/epdkit/_kernels.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
            },
        )

setup(ext_modules=ext_modules)
