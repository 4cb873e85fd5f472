from setuptools import Extension, setup

# The compiled search kernel is optional: the package falls back to the
# pure-Python twin (flc._kernel_py) when the extension is unavailable.
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("flc._speedups", ["src/flc/_speedups.pyx"])],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
