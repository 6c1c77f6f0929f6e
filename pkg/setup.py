from setuptools import Extension, setup

# The compiled kernel is optional: gdstbc falls back to a NumPy
# implementation when the extension is missing (see gdstbc/_kernels.py).
ext = Extension(
    "gdstbc._ckernels",
    ["src/gdstbc/_ckernels.pyx"],
    extra_compile_args=["-O3"],
    optional=True,
)

try:
    from Cython.Build import cythonize

    ext_modules = cythonize([ext], compiler_directives={"language_level": "3"})
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
