import functools
import os
import sys
from importlib import resources

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

CORPUS = resources.files("ainfpers") / "corpus"

# small simplicial corpus (the 3-torus is handled separately because it is slower)
FLT = ["point.flt", "circle.flt", "disk.flt", "s2.flt", "torus.flt", "torus_open.flt", "wedge.flt", "rp2.flt"]


def corpus_path(name: str) -> str:
    return str(CORPUS / name)


def load_corpus(name: str):
    from ainfpers.simplicial import read_filtration

    return read_filtration(corpus_path(name), autoclose=name.endswith("_open.flt"))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def fourstep():
    from ainfpers.persistence import load_abstract_filtration

    return load_abstract_filtration((CORPUS / "fourstep.json").read_text())


@functools.lru_cache(maxsize=None)
def transferred(name: str, p: int, n_max: int = 4):
    """Cached AInftyFiltration of a corpus file over GF(p) (Q when p == 0)."""
    from ainfpers.linalg import Field
    from ainfpers.persistence import from_filtered_complex

    return from_filtered_complex(load_corpus(name), Field(p), n_max)
