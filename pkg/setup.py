import os

from setuptools import Extension, setup

# The VM hot loop is compiled with Cython when available; the package falls
# back to the pure-Python interpreter in emoc.vm otherwise.
ext_modules = []
if os.environ.get("EMOC_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "emoc.vm._vmcore",
                    ["src/emoc/vm/_vmcore.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "initializedcheck": False,
                "cdivision": True,
            },
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
