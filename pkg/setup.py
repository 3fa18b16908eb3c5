from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "ldsim._kernels",
                ["src/ldsim/_kernels.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
else:
    # Pure-Python fallback in ldsim._kernels_py is used at import time.
    ext_modules = []

setup(ext_modules=ext_modules)
