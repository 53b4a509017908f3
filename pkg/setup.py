import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "dziobek._ccore",
        ["src/dziobek/_ccore.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
]

# The compiled core is a speedup only; dziobek.kernels falls back to the
# numpy implementation when the extension is missing.
for ext in extensions:
    ext.optional = True

setup(
    ext_modules=cythonize(extensions, compiler_directives={"language_level": "3"}),
)
