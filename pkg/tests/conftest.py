import importlib.util
import pathlib
import sys

import pytest

sys.dont_write_bytecode = True  # keep __pycache__ out of the corpus fixtures

REPO_ROOT = pathlib.Path(__file__).resolve().parent.parent
CASES_ROOT = REPO_ROOT / "cases"


@pytest.fixture(scope="session")
def cases_root():
    return CASES_ROOT


def load_model_file(path: pathlib.Path):
    """Import a behavioral model file and hand back a fresh RefModel."""
    spec = importlib.util.spec_from_file_location(
        f"sample_model_{path.parent.name}", path
    )
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module.RefModel()


def case_submodules(case_dir: pathlib.Path) -> dict[str, str]:
    from chipeval.interface import parse_module_interface

    subs = {}
    subdir = case_dir / "submodules"
    if subdir.is_dir():
        for sv in sorted(subdir.glob("*.sv")):
            text = sv.read_text()
            subs[parse_module_interface(text).module_name] = text
    return subs


def all_case_dirs():
    return sorted(p.parent for p in CASES_ROOT.glob("*/*/golden.sv"))
