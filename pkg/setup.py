from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "windowgame._filtercore",
                ["src/windowgame/_filtercore.pyx"],
                include_dirs=[np.get_include()],
            )
        ],
        language_level=3,
    )
except ImportError:
    # No Cython/numpy at build time: install pure-Python only, the package
    # falls back to the numpy kernel at import.
    ext_modules = []

setup(ext_modules=ext_modules)
