import os

from setuptools import Extension, setup


def extensions():
    """Compiled kernels are optional: ACTIVEIDS_NO_EXT=1 skips the build and
    the package falls back to the pure-numpy implementations at import."""
    if os.environ.get("ACTIVEIDS_NO_EXT"):
        return []
    import numpy
    from Cython.Build import cythonize

    ext = Extension(
        "activeids.kernels._fast",
        ["src/activeids/kernels/_fast.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=extensions())
