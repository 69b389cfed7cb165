import numpy
from setuptools import Extension, setup
from Cython.Build import cythonize

# -ffp-contract=off: the pure-Python fallback must reproduce the compiled
# kernel bit for bit, so fused multiply-adds are disabled.
ext = Extension(
    "peelperc._kernel",
    ["src/peelperc/_kernel.pyx"],
    include_dirs=[numpy.get_include()],
    extra_compile_args=["-O3", "-ffp-contract=off"],
    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
)

setup(ext_modules=cythonize([ext], language_level=3))
