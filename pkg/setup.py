from setuptools import setup, Extension

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("pearlforge._ckernel", ["src/pearlforge/_ckernel.pyx"])],
        language_level=3,
    )
except ImportError:
    # The pure-Python kernel is a full functional fallback; build without
    # the extension if Cython is unavailable.
    ext_modules = []

setup(ext_modules=ext_modules)
