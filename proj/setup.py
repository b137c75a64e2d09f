import glob

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

ext = Pybind11Extension(
    "natpatl._core",
    sorted(glob.glob("src/*.cpp", recursive=False)) + ["bindings/py_natpatl.cpp"],
    include_dirs=["include", "vendor"],
    cxx_std=20,
)
# cli_main.cpp has its own main; the extension builds only the library part.
ext.sources = [s for s in ext.sources if not s.endswith("cli_main.cpp")]

setup(ext_modules=[ext], cmdclass={"build_ext": build_ext})
