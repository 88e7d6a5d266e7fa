"""Build script for the optional compiled training kernel.

The package is fully functional without the extension (a NumPy fallback is
selected at import time); the extension exists because the training inner
loop dominates runtime on real corpora.
"""

from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "zipfvec._inner",
                ["src/zipfvec/_inner.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3", "-funroll-loops"],
                optional=True,
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
