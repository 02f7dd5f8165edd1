import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name, sourcedir=""):
        super().__init__(name, sources=[])
        self.sourcedir = str(Path(sourcedir).resolve())


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        ext_dir = Path(self.get_ext_fullpath(ext.name)).resolve().parent
        build_dir = Path(self.build_temp).resolve() / ext.name.replace(".", "_")
        build_dir.mkdir(parents=True, exist_ok=True)

        config = "Debug" if self.debug else "Release"
        cmake_args = [
            f"-DCMAKE_BUILD_TYPE={config}",
            f"-DRMTDE_EXT_DIR={ext_dir}",
            f"-DPython3_EXECUTABLE={sys.executable}",
            "-DRMTDE_PYTHON=ON",
            "-DRMTDE_BUILD_TESTS=OFF",
            "-DRMTDE_BUILD_CLI=OFF",
        ]
        subprocess.run(["cmake", ext.sourcedir, *cmake_args], cwd=build_dir, check=True)
        subprocess.run(
            ["cmake", "--build", ".", "--target", "_core", f"-j{self.parallel or 4}"],
            cwd=build_dir,
            check=True,
        )


setup(
    ext_modules=[CMakeExtension("rmtde._core")],
    cmdclass={"build_ext": CMakeBuild},
)
