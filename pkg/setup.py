import sys

from setuptools import setup

# The compiled kernels are an optional accelerator: if Cython or a C compiler
# is missing the package installs with the pure-numpy backend only.
ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools.extension import Extension

    ext_modules = cythonize(
        [
            Extension(
                "ahyper._ckernels",
                ["src/ahyper/_ckernels.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover
    sys.stderr.write(f"ahyper: building without compiled kernels ({exc})\n")

setup(ext_modules=ext_modules)
