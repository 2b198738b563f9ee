import os

from setuptools import Extension, setup


def ext_modules():
    if os.environ.get("GAUSSRADON_PURE_PYTHON"):
        return []
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        return []
    extensions = [
        Extension(
            "gaussradon._ckernels",
            ["src/gaussradon/_ckernels.pyx"],
            include_dirs=[np.get_include()],
            extra_compile_args=["-O3"],
        )
    ]
    return cythonize(extensions, compiler_directives={"language_level": "3"})


setup(ext_modules=ext_modules())
