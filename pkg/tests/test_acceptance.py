"""Acceptance gate: one test and one printed verdict line per criterion.

Run with -s (or read the captured stdout) to see the lines:

    PASS criterion 1: enumeration anchors - ...
    ...
    PASS criterion 9: shuffle span - ...

Criteria 1-7 and 9 are exact; criterion 8 is statistical at pinned
seeds and tolerances (1e6 samples, so it dominates the runtime).
"""

import pytest

from homlink import accept


@pytest.mark.parametrize(
    "num,name,func",
    [(num, name, func) for num, name, func, _tier in accept.CRITERIA],
    ids=[f"criterion_{num}" for num, *_ in accept.CRITERIA],
)
def test_criterion(num, name, func):
    ok, detail = func()
    print(f"{'PASS' if ok else 'FAIL'} criterion {num}: {name} - {detail}")
    assert ok, f"criterion {num} ({name}): {detail}"
