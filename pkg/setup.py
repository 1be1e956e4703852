"""Builds the optional Cython kernel; the package falls back to pure Python without it."""
import os

from setuptools import setup

ext_modules = []
if not os.environ.get("JASTROW_FORGE_NO_EXT"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "jastrow_forge.kernels._ckernel",
                    ["src/jastrow_forge/kernels/_ckernel.pyx"],
                    extra_compile_args=["-O2", "-fno-fast-math", "-ffp-contract=off"],
                )
            ],
            compiler_directives={"language_level": 3},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
