import os

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

# -ffp-contract=off keeps the compiler from fusing a*b+c into FMA, and
# -fno-builtin-sin/-cos from merging the cos/sin pair into glibc sincos
# (which rounds differently from separate calls in ~0.1% of arguments);
# both are needed for the compiled loop to reproduce the pure-Python
# backend bit for bit.
extensions = [
    Extension(
        "kacbgk._event_loop",
        ["src/kacbgk/_event_loop.pyx"],
        extra_compile_args=["-O3", "-ffp-contract=off",
                            "-fno-builtin-sin", "-fno-builtin-cos"],
    )
]

if cythonize is not None and not os.environ.get("KACBGK_SKIP_EXTENSION"):
    ext_modules = cythonize(extensions, language_level=3)
else:
    ext_modules = []

setup(ext_modules=ext_modules)
