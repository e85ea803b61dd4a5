import pytest

from oracles import HOSPITAL_34, TRAUMA
from ordbayes import BinomialTable, MultinomialTable


@pytest.fixture
def trauma():
    return BinomialTable.from_counts(TRAUMA, ("placebo", "low", "medium", "high"))


@pytest.fixture
def hospital34():
    return MultinomialTable(HOSPITAL_34)
