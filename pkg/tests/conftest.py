import sys
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import settings

settings.register_profile("suite", deadline=None, max_examples=60)
settings.load_profile("suite")

sys.path.insert(0, str(Path(__file__).resolve().parent))

MODELS = Path(__file__).resolve().parent.parent / "models"


@pytest.fixture(scope="session")
def pmdp_path() -> str:
    return str(MODELS / "paris_bologna.pmdp.json")


@pytest.fixture(scope="session")
def pdwg_path() -> str:
    return str(MODELS / "four_node.pdwg.json")


@pytest.fixture(scope="session")
def travel_model(pmdp_path):
    from polypol import load_model
    return load_model(pmdp_path)


@pytest.fixture(scope="session")
def travel_pi0() -> dict[str, Fraction]:
    return {"p1": Fraction(7), "p2": Fraction(11), "p3": Fraction(1)}


@pytest.fixture(scope="session")
def graph_model(pdwg_path):
    from polypol import load_model
    return load_model(pdwg_path)


@pytest.fixture(scope="session")
def graph_pi0() -> dict[str, Fraction]:
    values = dict(w11=1, w12=2, w14=7, w22=3, w23=5, w32=4, w34=3, w42=2, w43=8)
    return {name: Fraction(v) for name, v in values.items()}
