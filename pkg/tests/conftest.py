import re

import pytest

from wfprop.program import parse_program

EX_CHOICE_LOOPS = """
a :- not b.
b :- not a.
c :- d.
d :- c.
e :- f.
f :- e.
c :- a.
e :- not a.
"""

EX_BODY_DOMINATOR = """
a :- b, c.
b :- a.
b :- not c.
c :- not b.
"""

EX_ATOM_DOMINATOR = """
a :- b, not c.
a :- b, not d.
b :- not c.
c :- not d.
d :- not c.
"""

# one line per acceptance criterion, filled by test_acceptance.py
ACCEPTANCE_LINES: dict[str, str] = {}


@pytest.fixture
def choice_loops():
    return parse_program(EX_CHOICE_LOOPS)


@pytest.fixture
def body_dominator():
    return parse_program(EX_BODY_DOMINATOR)


@pytest.fixture
def atom_dominator():
    return parse_program(EX_ATOM_DOMINATOR)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES, key=lambda k: (int(re.match(r"\d+", k).group()), k)):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
