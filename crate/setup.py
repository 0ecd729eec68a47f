"""Builds the Rust extension with cargo; all metadata lives in pyproject.toml.

Install with `pip install -e . --no-build-isolation` (setuptools only, no
extra build backend needed).
"""

import shutil
import subprocess
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

ROOT = Path(__file__).parent.resolve()


class CargoExtension(Extension):
    def __init__(self, name: str, crate: str, artifact: str) -> None:
        super().__init__(name, sources=[])
        self.crate = crate
        self.artifact = artifact


class CargoBuildExt(build_ext):
    def build_extension(self, ext: CargoExtension) -> None:
        subprocess.run(
            ["cargo", "build", "--release", "-p", ext.crate],
            cwd=ROOT,
            check=True,
        )
        built = ROOT / "target" / "release" / ext.artifact
        dest = Path(self.get_ext_fullpath(ext.name))
        dest.parent.mkdir(parents=True, exist_ok=True)
        shutil.copyfile(built, dest)


setup(
    ext_modules=[CargoExtension("atc._native", crate="atc-py", artifact="lib_native.so")],
    cmdclass={"build_ext": CargoBuildExt},
)
