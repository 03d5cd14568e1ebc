"""Build the optional Cython kernels; the package works without them."""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
    import numpy  # noqa: F401  (checked so a missing numpy skips the build)
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("vbma._kernels._ckernels",
                   ["src/vbma/_kernels/_ckernels.pyx"],
                   extra_compile_args=["-O3"],
                   optional=True)],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
