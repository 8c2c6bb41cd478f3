import glob

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

core_sources = sorted(
    s for s in glob.glob("src/*.cpp") if not s.endswith("bindings.cpp")
)

ext = Pybind11Extension(
    "sketchmom._core",
    ["src/bindings.cpp"] + core_sources,
    include_dirs=["include", "vendor", "/usr/include/eigen3"],
    cxx_std=20,
    extra_compile_args=["-O2"],
)

setup(ext_modules=[ext], cmdclass={"build_ext": build_ext})
