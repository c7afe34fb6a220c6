"""Randomized differential checks of every fast path against the classical
routines, shared by ``bigslice check`` and the test suite.

Each case is reproducible from ``(seed, pair, index)`` alone.  Sizes are
log-uniform up to ``max_limbs`` so small shapes, where boundary mistakes
live, are common while large ones still appear.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Callable, Iterable

from .divengine import divide_block_short, divide_classical, divide_fast
from .mulengine import mul, mul_classical
from .natural import BASE, MASK, Natural, add, compare
from .sliceprod import SliceRequest, slice_classical, slice_mulders

PAIRS = ("mul", "div-fast", "div-block", "quotient-only", "slices")


@dataclass(frozen=True)
class Mismatch:
    pair: str
    seed: int
    index: int
    detail: str

    def __str__(self) -> str:
        return f"{self.pair}: seed={self.seed} case={self.index}: {self.detail}"


def case_rng(seed: int, pair: str, index: int) -> random.Random:
    return random.Random(f"{seed}/{pair}/{index}")


def log_uniform(rng: random.Random, lo: int, hi: int) -> int:
    if hi <= lo:
        return lo
    return min(hi, int(math.exp(rng.uniform(math.log(lo), math.log(hi + 1)))))


def natural(rng: random.Random, n: int) -> Natural:
    """An n-limb value, random or one of the carry-heavy patterns."""
    if n == 0:
        return Natural()
    kind = rng.random()
    if kind < 0.08:
        limbs = [MASK] * n
    elif kind < 0.14:
        limbs = [0] * (n - 1) + [1 << rng.randrange(64)]
    elif kind < 0.20:
        limbs = [rng.choice((0, MASK, 1, 1 << 63)) for _ in range(n)]
    elif kind < 0.24:
        limbs = [MASK] * (n - 1) + [rng.getrandbits(64)]
    else:
        limbs = [rng.getrandbits(64) for _ in range(n)]
    if limbs[-1] == 0:
        limbs[-1] = rng.getrandbits(64) or 1
    return Natural(limbs)


def division_case(rng: random.Random, max_limbs: int,
                  min_ratio: float = 0.0) -> tuple[Natural, Natural]:
    """(u, v) with u >= v mostly, including exact and near-half remainders."""
    n = log_uniform(rng, 1, max(1, max_limbs // 2 if min_ratio else max_limbs))
    v = natural(rng, n)
    lo_q = max(1, int(min_ratio * n))
    kq = log_uniform(rng, lo_q, max(lo_q, max_limbs - n + 1))
    q = natural(rng, kq)
    vq = mul_classical(v, q)
    kind = rng.random()
    if kind < 0.15:
        u = vq                                    # exact division
    elif kind < 0.30:
        half = Natural.from_int(max(0, int(v) // 2 + rng.choice((-1, 0, 1))))
        u = add(vq, half)                         # remainder near v/2
    elif kind < 0.38:
        u = add(vq, Natural.from_int(int(v) - 1))  # remainder v - 1
    elif kind < 0.42:
        u = natural(rng, max(1, n - rng.randrange(2)))  # u may be below v
    else:
        u = add(vq, natural(rng, rng.randrange(n + 1)) if n else Natural())
    return u, v


def _euclid(u: Natural, v: Natural, q: Natural, r: Natural) -> str | None:
    # independent multiply-and-compare
    if compare(r, v) >= 0:
        return "remainder not below divisor"
    if add(mul_classical(q, v), r) != u:
        return "u != q*v + r"
    return None


def _check_mul(rng: random.Random, max_limbs: int) -> str | None:
    a = natural(rng, log_uniform(rng, 1, max_limbs))
    b = natural(rng, log_uniform(rng, 1, max_limbs))
    ref = mul_classical(a, b)
    got = mul(a, b, threads=rng.choice((1, 3)))
    if got != ref:
        return f"mul {len(a)}x{len(b)} differs"
    if mul(b, a, threads=1) != ref:
        return f"mul {len(b)}x{len(a)} not commutative"
    return None


def _check_div(rng: random.Random, max_limbs: int, kind: str) -> str | None:
    u, v = division_case(rng, max_limbs, 2.0 if kind == "div-block" else 0.0)
    ref = divide_classical(u, v)
    msg = _euclid(u, v, ref.q, ref.r)
    if msg:
        return f"classical {len(u)}/{len(v)}: {msg}"
    if kind == "div-block":
        got = divide_block_short(u, v)
    else:
        trace: list = []
        got = divide_fast(u, v, True, trace=trace)
        qp = trace[0]["q_prime"]
        if abs(int(qp) - int(ref.q)) > 1:
            return f"estimate off by more than one on {len(u)}/{len(v)}"
    if got.q != ref.q or got.r != ref.r:
        return f"{kind} {len(u)}/{len(v)} differs from classical"
    msg = _euclid(u, v, got.q, got.r)
    if msg:
        return f"{kind} {len(u)}/{len(v)}: {msg}"
    if kind == "quotient-only":
        only = divide_fast(u, v, False)
        if only.r is not None or only.q != ref.q:
            return f"quotient-only {len(u)}/{len(v)} differs"
    return None


def _check_slices(rng: random.Random, max_limbs: int) -> str | None:
    a = natural(rng, log_uniform(rng, 1, max_limbs))
    b = natural(rng, log_uniform(rng, 1, max_limbs))
    total = len(a) + len(b)
    full = mul_classical(a, b).limbs
    lo = rng.randrange(total)
    hi = rng.randint(lo + 1, total)
    req = SliceRequest(lo, hi, rng.choice((0, 1, 2, 2, 2, 3)))
    width = BASE ** (hi - lo)
    exact = int(Natural._wrap(list(full[lo:hi])))
    for name, s in (("classical", slice_classical(a, b, req)),
                    ("mulders", slice_mulders(a, b, req))):
        short = (exact - int(s.value)) % width
        if short >= s.deficit_bound:
            return f"{name} slice [{lo},{hi}) of {len(a)}x{len(b)} short by {short}"
        if hi >= len(full) and int(s.value) > exact:
            return f"{name} top slice [{lo},{hi}) above exact"
        if lo == 0 and short:
            return f"{name} low slice [0,{hi}) not exact"
    return None


CHECKS: dict[str, Callable[[random.Random, int], str | None]] = {
    "mul": _check_mul,
    "div-fast": lambda rng, m: _check_div(rng, m, "div-fast"),
    "div-block": lambda rng, m: _check_div(rng, m, "div-block"),
    "quotient-only": lambda rng, m: _check_div(rng, m, "quotient-only"),
    "slices": _check_slices,
}


def run_case(pair: str, seed: int, index: int, max_limbs: int) -> Mismatch | None:
    msg = CHECKS[pair](case_rng(seed, pair, index), max_limbs)
    return Mismatch(pair, seed, index, msg) if msg else None


def run(cases: int, seed: int, max_limbs: int, pairs: Iterable[str] = PAIRS,
        start: int = 0) -> Iterable[Mismatch | None]:
    """Yield one result per case (None for a pass), pair by pair."""
    for pair in pairs:
        for i in range(start, start + cases):
            yield run_case(pair, seed, i, max_limbs)
