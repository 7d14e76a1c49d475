import numpy
from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Build the compiled kernels if a toolchain is available.

    The package works without the extension (a pure-numpy fallback is
    selected at import time), so a failed compile downgrades to a
    warning instead of aborting the install.
    """

    def run(self):
        try:
            super().run()
        except Exception as exc:
            print(f"WARNING: compiled kernels skipped ({exc}); "
                  "pure-python fallback will be used")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"WARNING: {ext.name} did not compile ({exc}); "
                  "pure-python fallback will be used")


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        print("WARNING: Cython not available; compiled kernels skipped")
        return []
    ext = Extension(
        "scramble.kernels._core",
        ["src/scramble/kernels/_core.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})
