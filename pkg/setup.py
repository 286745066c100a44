from setuptools import setup

try:
    from Cython.Build import cythonize
except ImportError:  # the pure-Python kernels take over at import time
    ext_modules = []
else:
    ext_modules = cythonize(["src/tropicount/_ckernels.pyx"], language_level=3)

setup(ext_modules=ext_modules)
