from setuptools import Extension, setup

# The compiled DFS kernel is optional: without Cython the package installs
# with the pure-Python fallback (kleinnet._kernel_py) selected at import.
try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "kleinnet._kernel",
                ["src/kleinnet/_kernel.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
