import os

import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

# numpy ships its C random-distribution routines as a static library;
# the walk kernels use random_binomial from it.
npyrandom_dir = os.path.join(os.path.dirname(np.random.__file__), "lib")

ext = Extension(
    "cylwalk._kernels",
    ["src/cylwalk/_kernels.pyx"],
    include_dirs=[np.get_include()],
    library_dirs=[npyrandom_dir],
    libraries=["npyrandom"],
    extra_compile_args=["-O3"],
    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
)

setup(
    ext_modules=cythonize(
        [ext],
        compiler_directives={"language_level": "3"},
    )
)
