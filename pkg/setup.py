# The Cython word kernels are optional: without Cython (or a compiler) the package
# installs with the pure-Python fallback.
from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize
    ext_modules = cythonize(
        [Extension("lsym._kernels_c", ["src/lsym/_kernels_c.pyx"])],
        language_level=3, quiet=True)
except Exception:
    pass

setup(ext_modules=ext_modules)
