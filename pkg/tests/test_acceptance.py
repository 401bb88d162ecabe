"""Acceptance gate: every headline claim at its stated tolerance.

One test per named criterion; each prints the criterion's summary line
so the verbose run shows one pass/fail verdict per claim.
"""

import pytest

from anngf import verify
from anngf.config import RunConfig

CFG = RunConfig(d=3, samples=2000, seed=20250817)

ORDER = sorted(verify.CRITERIA, key=lambda n: int(n.rsplit("-", 1)[1]))


@pytest.mark.parametrize("name", ORDER)
def test_criterion(name):
    result = verify.CRITERIA[name](CFG)
    line = verify.format_line(result)
    print(line)
    assert result.passed, line
