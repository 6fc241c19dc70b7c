"""CMake-driven extension build for the calibdesign package.

The C++ core and the pybind11 module are configured and compiled by the
project's own CMake tree; this shim only asks CMake for the `_core` target
and drops the resulting shared object where setuptools expects it.
"""

import shutil
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
        subprocess.run(
            [
                "cmake",
                "-S",
                str(source_dir),
                "-B",
                str(build_dir),
                "-DCMAKE_BUILD_TYPE=Release",
                "-DCALIB_BUILD_TESTS=OFF",
                f"-DPython3_EXECUTABLE={sys.executable}",
            ],
            check=True,
        )
        subprocess.run(
            ["cmake", "--build", str(build_dir), "--target", "calibdesign_core", "-j"],
            check=True,
        )
        built = list((build_dir / "python_pkg" / "calibdesign").glob("_core*"))
        if not built:
            raise RuntimeError("CMake did not produce the _core extension module")
        target = Path(self.get_ext_fullpath(ext.name))
        target.parent.mkdir(parents=True, exist_ok=True)
        shutil.copy2(built[0], target)


setup(
    ext_modules=[CMakeExtension("calibdesign._core")],
    cmdclass={"build_ext": CMakeBuild},
)
