from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "statemix.numerics._cyclic_jacobi",
                ["src/statemix/numerics/_cyclic_jacobi.pyx"],
            )
        ],
        language_level="3",
    )
except ImportError:
    # No Cython at build time: the package falls back to the pure-Python
    # kernel in statemix.numerics._cyclic_jacobi_py at import.
    extensions = []

setup(ext_modules=extensions)
