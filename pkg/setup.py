import sys

from setuptools import Extension, setup

# the compiled DFS core is optional: if Cython (or a C compiler) is missing
# the package installs pure-Python and search falls back to _solver_py
ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "polarscheme._solver_core",
                ["src/polarscheme/_solver_core.pyx"],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover
    sys.stderr.write("building without compiled solver core: %s\n" % exc)

setup(ext_modules=ext_modules)
