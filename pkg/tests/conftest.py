"""
Shared fixtures: the golden transducer files under golden/
"""
from pathlib import Path

import pytest

from mtt_workbench.formats import load_transducer, parse_brel, parse_trel

GOLDEN = Path(__file__).resolve().parent.parent / "golden"

# Alternates a and # labels on monadic inputs; reads and writes abcd's input alphabet.
ALTERNATE_TREL = """
trel alternate {
  input { #/1 a/1 e/0 }
  output { #/1 a/1 e/0 }
  states { k s }
  initial k
  rule k # -> #(k)
  rule k a -> a(s)
  rule k e -> e
  rule s # -> #(s)
  rule s a -> #(k)
  rule s e -> e
}
"""

PARITY_BREL = """
// parity of the number of a's below each node
brel parity {
  input { a/1 e/0 }
  output { a0/1 a1/1 e/0 }
  states { even odd }
  rule e -> even : e
  rule a(even) -> odd : a0
  rule a(odd) -> even : a1
}
"""


@pytest.fixture(scope="session")
def golden_dir() -> Path:
    return GOLDEN


def _golden(name: str):
    return load_transducer(GOLDEN / name)


@pytest.fixture(scope="session")
def abcd():
    return _golden("abcd.mtt")


@pytest.fixture(scope="session")
def abcd_padded():
    return _golden("abcd_padded.mtt")


@pytest.fixture(scope="session")
def loopy():
    return _golden("loopy.mtt")


@pytest.fixture(scope="session")
def twins():
    return _golden("twins.mtt")


@pytest.fixture(scope="session")
def twins_nonerasing():
    return _golden("twins_nonerasing.mtt")


@pytest.fixture(scope="session")
def diverging():
    return _golden("diverging.mtt")


@pytest.fixture(scope="session")
def crafted():
    return _golden("crafted_circular.att")


@pytest.fixture(scope="session")
def mirror():
    return _golden("mirror.att")


@pytest.fixture(scope="session")
def const_e():
    return _golden("const_e.mtt")


@pytest.fixture(scope="session")
def const_delta():
    return _golden("const_delta.mtt")


@pytest.fixture(scope="session")
def alternate():
    return parse_trel(ALTERNATE_TREL)


@pytest.fixture
def parity():
    return parse_brel(PARITY_BREL)

