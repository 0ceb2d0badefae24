from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [Extension("actr._kernels._core", ["src/actr/_kernels/_core.pyx"])],
        language_level=3,
    )
except ImportError:
    # Pure-Python install: the package falls back to the numpy kernels.
    extensions = []

setup(ext_modules=extensions)
