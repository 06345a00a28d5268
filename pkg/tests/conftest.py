import json
from pathlib import Path

import pytest

from nbdoc.kb import load_kb
from nbdoc.notebook import parse_notebook

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"
DATA = Path(__file__).resolve().parent / "data"
KB_PATH = ROOT / "kb" / "seed.jsonl"


@pytest.fixture(scope="session")
def kb():
    return load_kb(KB_PATH)


@pytest.fixture(scope="session")
def house_doc():
    return parse_notebook((FIXTURES / "house.ipynb").read_bytes())


@pytest.fixture(scope="session")
def covid_doc():
    return parse_notebook((FIXTURES / "covid.ipynb").read_bytes())


@pytest.fixture(scope="session")
def candidate_goldens():
    return json.loads((DATA / "candidate_goldens.json").read_text())


@pytest.fixture(scope="session")
def calibration_rows():
    return json.loads((DATA / "provenance_calibration.json").read_text())
