"""CMake-driven build of the spaql._core extension.

The CMake project owns the actual compilation; this shim configures it into a
scratch directory and drops the resulting module next to the python package.
"""

import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        source_dir = Path(__file__).resolve().parent
        build_dir = Path(self.build_temp) / "cmake"
        build_dir.mkdir(parents=True, exist_ok=True)
        out_dir = Path(self.get_ext_fullpath(ext.name)).resolve().parent

        subprocess.run(
            [
                "cmake",
                "-S", str(source_dir),
                "-B", str(build_dir),
                "-DCMAKE_BUILD_TYPE=Release",
                "-DSPAQL_BUILD_TESTS=OFF",
                "-DSPAQL_BUILD_PYTHON=ON",
                f"-DPython3_EXECUTABLE={sys.executable}",
            ],
            check=True,
        )
        subprocess.run(
            ["cmake", "--build", str(build_dir), "--target", "_core", "--parallel"],
            check=True,
        )

        out_dir.mkdir(parents=True, exist_ok=True)
        staged = build_dir / "python" / "spaql"
        for lib in staged.glob("_core.*"):
            self.copy_file(str(lib), str(out_dir / lib.name))


setup(
    ext_modules=[CMakeExtension("spaql._core")],
    cmdclass={"build_ext": CMakeBuild},
)
