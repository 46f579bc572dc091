import itertools
import math
from fractions import Fraction

import pytest


def all_coin_seqs(n):
    return ["".join(x) for x in itertools.product("HT", repeat=n)]


def brute_elias_table(n):
    """Materialise every class, sort it, and hand out power-of-two blocks."""
    table = {}
    for heads in range(n + 1):
        members = sorted(x for x in all_coin_seqs(n) if x.count("H") == heads)
        start = 0
        while len(members) - start > 0:
            left = len(members) - start
            j = left.bit_length() - 1
            for offset in range(2 ** j):
                table[members[start + offset]] = format(offset, f"0{j}b") if j else ""
            start += 2 ** j
    return table


def stop_rule_rational(h, t, k):
    """Stopping rule in its original divided form."""
    low = min(h, t)
    if low == 0:
        return False
    return Fraction(math.comb(h + t, h)) >= Fraction(2 ** k * (h + t), low)


@pytest.fixture(scope="session")
def elias_table_6():
    return brute_elias_table(6)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
