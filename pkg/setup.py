"""Build script for the optional compiled spectrum kernel.

The package is fully functional without the extension: caseq._kernels
falls back to a vectorized numpy implementation when the compiled module
is absent.  Run ``python setup.py build_ext --inplace`` (or a normal pip
install) to build it.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "caseq._kernels._spectrum_cy",
                sources=["src/caseq/_kernels/_spectrum_cy.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3", "-fopenmp"],
                extra_link_args=["-fopenmp"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
