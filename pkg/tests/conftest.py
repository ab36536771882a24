import json
import sys
from importlib import resources
from pathlib import Path

import hypothesis
import pytest
from hypothesis import strategies as st

from metapres.presentation import Presentation
from metapres.words import GroupWord, free_reduce

hypothesis.settings.register_profile("default", max_examples=100, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=20, deadline=None)
hypothesis.settings.load_profile("default")

FIXTURES = Path(__file__).parent / "fixtures"


def raw_letters(n, max_size=12):
    return st.lists(
        st.integers(1, n).flatmap(lambda j: st.sampled_from([j, -j])),
        max_size=max_size,
    )


@st.composite
def words(draw, n=None, max_size=12):
    n = draw(st.integers(1, 4)) if n is None else n
    return free_reduce(draw(raw_letters(n, max_size)), n)


@st.composite
def presentations(draw, max_n=4, max_m=4, max_len=12):
    n = draw(st.integers(1, max_n))
    m = draw(st.integers(0, max_m))
    names = tuple("abcd"[:n])
    rels = tuple(draw(words(n, max_len)) for _ in range(m))
    return Presentation(names, rels)


@st.composite
def int_matrices(draw, max_dim=6, lo=-20, hi=20):
    r = draw(st.integers(1, max_dim))
    c = draw(st.integers(1, max_dim))
    return draw(st.lists(st.lists(st.integers(lo, hi), min_size=c, max_size=c), min_size=r, max_size=r))


@pytest.fixture(scope="session")
def schema_validator():
    from jsonschema import Draft202012Validator
    from referencing import Registry, Resource

    root = resources.files("metapres") / "schemas"
    schemas = {p.name: json.loads(p.read_text()) for p in root.iterdir() if p.name.endswith(".json")}
    registry = Registry().with_resources(
        (name, Resource.from_contents(s)) for name, s in schemas.items()
    )

    def validate(name, instance):
        Draft202012Validator(schemas[name], registry=registry).validate(instance)

    return validate


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
