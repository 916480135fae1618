"""Builds the `qcgeom_py` extension module by delegating to cargo.

The standard Rust build backends are not assumed to be installed, so a
minimal build_ext override compiles the cdylib with cargo and copies it
to wherever setuptools expects the extension.  Install with

    pip install -e . --no-build-isolation
"""

import shutil
import subprocess
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CargoExtension(Extension):
    def __init__(self, name: str) -> None:
        super().__init__(name, sources=[])


class CargoBuildExt(build_ext):
    def build_extension(self, ext: Extension) -> None:
        if not isinstance(ext, CargoExtension):
            super().build_extension(ext)
            return
        root = Path(__file__).parent.resolve()
        subprocess.run(
            [
                "cargo",
                "build",
                "--release",
                "--package",
                "qcgeom-py",
                "--features",
                "extension-module",
            ],
            cwd=root,
            check=True,
        )
        built = root / "target" / "release" / "libqcgeom_py.so"
        destination = Path(self.get_ext_fullpath(ext.name))
        destination.parent.mkdir(parents=True, exist_ok=True)
        shutil.copyfile(built, destination)


setup(
    ext_modules=[CargoExtension("qcgeom_py")],
    cmdclass={"build_ext": CargoBuildExt},
)
