import os

from setuptools import setup

ext_modules = []
if os.environ.get("ROBBINS_NO_EXT") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "robbins._kernels",
                    ["src/robbins/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    # no fast-math: results must match the numpy fallback bit for bit
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
