import random

import pytest

import oracle16
from bigslice.natural import MASK, Natural


def rand_nat(rng: random.Random, n: int) -> Natural:
    """n limbs (top limb nonzero), mostly random, sometimes carry-heavy."""
    if n == 0:
        return Natural()
    r = rng.random()
    if r < 0.1:
        limbs = [MASK] * n
    elif r < 0.2:
        limbs = [0] * (n - 1) + [1 << rng.randrange(64)]
    elif r < 0.3:
        limbs = [rng.choice((0, 1, MASK, 1 << 63)) for _ in range(n)]
    else:
        limbs = [rng.getrandbits(64) for _ in range(n)]
    limbs[-1] = limbs[-1] or 1
    return Natural(limbs)


def o16(a: Natural) -> list[int]:
    return oracle16.from_limbs(a.limbs)


def from16(d: list[int]) -> Natural:
    return Natural(oracle16.to_limbs(d))


def canonical(a: Natural) -> bool:
    return not a.limbs or a.limbs[-1] != 0


@pytest.fixture
def rng(request):
    return random.Random(request.node.name)


# one line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
