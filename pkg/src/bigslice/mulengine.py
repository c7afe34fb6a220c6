"""Full-product multiplication.

Three tiers: the plain quadratic reference (`mul_classical`), Karatsuba with
block handling for unbalanced operands (`mul_karatsuba`), and the dispatcher
`mul`, which above ``parallel_cutoff`` runs the three top-level Karatsuba
sub-products as concurrent tasks.

The Karatsuba kernel works on coefficient lists (see `natural`): operand
sums are formed without carry propagation and the product's column sums are
carried once at the end.  Because the middle term is then an exact
polynomial identity, ``(a0+a1)(b0+b1) - a0*b0 - a1*b1`` never goes negative
coefficient-wise and no signed intermediate is needed.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from itertools import repeat
from operator import add, mul as _imul, sub as _isub
import threading

from .natural import LIMB_BITS, MASK, Natural, Workspace, _carry

DEFAULT_THREADS = 3


@dataclass(frozen=True)
class MulThresholds:
    karatsuba_cutoff: int = 24
    parallel_cutoff: int = 200

    def __post_init__(self) -> None:
        if self.karatsuba_cutoff < 2:
            raise ValueError("karatsuba_cutoff must be at least 2")
        if self.parallel_cutoff < self.karatsuba_cutoff:
            raise ValueError("parallel_cutoff must be >= karatsuba_cutoff")


def _active() -> MulThresholds:
    from . import tuning
    return tuning.active().mul


# -- reference --------------------------------------------------------------

def mul_classical(a: Natural, b: Natural) -> Natural:
    """Schoolbook long multiplication, one carry chain per row.

    Deliberately plain: this is the correctness oracle for every other
    product routine and the reference timing in the benchmark tables.
    """
    x, y = a.limbs, b.limbs
    if not x or not y:
        return Natural()
    r = [0] * (len(x) + len(y))
    for i, xi in enumerate(x):
        carry = 0
        k = i
        for yj in y:
            t = xi * yj + r[k] + carry
            r[k] = t & MASK
            carry = t >> LIMB_BITS
            k += 1
        r[k] = carry
    return Natural._wrap(r)


# -- coefficient kernels ----------------------------------------------------

def _basecase(a: list[int], b: list[int]) -> list[int]:
    """Quadratic product of coefficient lists, one row per entry of the shorter."""
    if len(a) < len(b):
        a, b = b, a
    la = len(a)
    if not b:
        return []
    out = [0] * (la + len(b) - 1)
    for j, bj in enumerate(b):
        if bj:
            out[j:j + la] = map(add, out[j:j + la], map(_imul, a, repeat(bj)))
    return out


def _kmul(a: list[int], b: list[int], cut: int, ws: Workspace) -> list[int]:
    """Product coefficients of a and b (length len(a)+len(b)-1, or [])."""
    la, lb = len(a), len(b)
    if la < lb:
        a, b, la, lb = b, a, lb, la
    if lb < cut:
        return _basecase(a, b)
    if la >= 2 * lb:
        return _kmul_blocks(a, b, cut, ws)
    m = (la + 1) >> 1
    a0, a1, b0, b1 = a[:m], a[m:], b[:m], b[m:]
    z0 = _kmul(a0, b0, cut, ws)
    z2 = _kmul(a1, b1, cut, ws)
    sa = ws.acquire(m)
    sb = ws.acquire(m)
    try:
        _fold_halves(sa, a0, a1)
        _fold_halves(sb, b0, b1)
        z1 = _kmul(sa, sb, cut, ws)
    finally:
        ws.release(sb)
        ws.release(sa)
    return _combine(z0, z1, z2, m, la + lb - 1)


def _fold_halves(dst: list[int], lo: list[int], hi: list[int]) -> None:
    dst[:] = lo
    dst[:len(hi)] = map(add, lo, hi)


def _combine(z0: list[int], z1: list[int], z2: list[int], m: int, n: int) -> list[int]:
    out = z0 + [0] * (n - len(z0))
    if z2:
        out[2 * m:2 * m + len(z2)] = z2
    z1[:len(z0)] = map(_isub, z1, z0)
    z1[:len(z2)] = map(_isub, z1, z2)
    end = m + len(z1)
    out[m:end] = map(add, out[m:end], z1)
    return out


def _kmul_blocks(a: list[int], b: list[int], cut: int, ws: Workspace) -> list[int]:
    # len(a) >= 2*len(b): walk a in len(b)-sized blocks so every
    # sub-product is near-balanced.
    la, lb = len(a), len(b)
    out = [0] * (la + lb - 1)
    for i in range(0, la, lb):
        p = _kmul(a[i:i + lb], b, cut, ws)
        out[i:i + len(p)] = map(add, out[i:i + len(p)], p)
    return out


def _mul_coeffs(a: list[int], b: list[int], t: MulThresholds | None = None,
                ws: Workspace | None = None) -> list[int]:
    """Sequential product as coefficient lists; the entry used by slices."""
    if t is None:
        t = _active()
    if ws is None:
        ws = Workspace()
    return _kmul(a, b, t.karatsuba_cutoff, ws)


# -- public entry points ----------------------------------------------------

@lru_cache(maxsize=4096)
def _bound(la: int, lb: int, cut: int) -> int:
    if la < lb:
        la, lb = lb, la
    if lb < cut:
        return 0
    if la >= 2 * lb:
        tail = la % lb
        return max(_bound(lb, lb, cut), _bound(lb, tail, cut) if tail else 0)
    m = (la + 1) >> 1
    return max(_bound(m, m, cut), _bound(la - m, lb - m, cut),
               2 * m + _bound(m, m, cut))


def workspace_bound(len_a: int, len_b: int, t: MulThresholds | None = None) -> int:
    """Upper bound on scratch limbs one `mul` call of this shape may hold.

    Mirrors the recursion: a balanced split holds its two m-limb operand
    sums only while the middle sub-product runs, so the peak is a sum over a
    single root-to-leaf path, 2*(n/2 + n/4 + ...) < 2n plus rounding.  The
    concurrent top level holds the sums while all three subtrees run.
    """
    if t is None:
        t = _active()
    cut = t.karatsuba_cutoff
    la, lb = max(len_a, len_b), min(len_a, len_b)
    seq = _bound(la, lb, cut)
    if lb < t.parallel_cutoff or la >= 2 * lb:
        return seq
    m = (la + 1) >> 1
    par = 2 * m + 2 * _bound(m, m, cut) + _bound(la - m, lb - m, cut)
    return max(seq, par)


def mul_karatsuba(a: Natural, b: Natural, ws: Workspace | None = None,
                  t: MulThresholds | None = None) -> Natural:
    """Sequential Karatsuba product; classical below ``karatsuba_cutoff``."""
    if t is None:
        t = _active()
    if ws is None:
        ws = Workspace(capacity=workspace_bound(len(a), len(b), t))
    return Natural._wrap(_carry(_kmul(list(a.limbs), list(b.limbs),
                                      t.karatsuba_cutoff, ws)))


_pool: ThreadPoolExecutor | None = None
_pool_lock = threading.Lock()


def _executor() -> ThreadPoolExecutor:
    global _pool
    with _pool_lock:
        if _pool is None:
            _pool = ThreadPoolExecutor(max_workers=3, thread_name_prefix="kmul")
        return _pool


def _kmul_top_parallel(a: list[int], b: list[int], cut: int, ws: Workspace) -> list[int]:
    la, lb = len(a), len(b)
    m = (la + 1) >> 1
    a0, a1, b0, b1 = a[:m], a[m:], b[:m], b[m:]
    sa = ws.acquire(m)
    sb = ws.acquire(m)
    try:
        _fold_halves(sa, a0, a1)
        _fold_halves(sb, b0, b1)
        pool = _executor()
        f0 = pool.submit(_kmul, a0, b0, cut, ws)
        f2 = pool.submit(_kmul, a1, b1, cut, ws)
        f1 = pool.submit(_kmul, sa, sb, cut, ws)
        # join all three before recombining
        z0, z1, z2 = f0.result(), f1.result(), f2.result()
    finally:
        ws.release(sb)
        ws.release(sa)
    return _combine(z0, z1, z2, m, la + lb - 1)


def mul(a: Natural, b: Natural, t: MulThresholds | None = None, *,
        threads: int | None = None, ws: Workspace | None = None) -> Natural:
    """Product of a and b, dispatched on operand size.

    Classical below ``karatsuba_cutoff``, sequential Karatsuba up to
    ``parallel_cutoff``, and above it the three top-level sub-products run
    concurrently (``threads=1`` forces the sequential path).  Output is
    limb-identical in every regime.
    """
    if t is None:
        t = _active()
    if threads is None:
        threads = DEFAULT_THREADS
    x, y = list(a.limbs), list(b.limbs)
    if len(x) < len(y):
        x, y = y, x
    if not y:
        return Natural()
    if ws is None:
        ws = Workspace(capacity=workspace_bound(len(x), len(y), t))
    if threads > 1 and len(y) >= t.parallel_cutoff and len(x) < 2 * len(y):
        coeffs = _kmul_top_parallel(x, y, t.karatsuba_cutoff, ws)
    else:
        coeffs = _kmul(x, y, t.karatsuba_cutoff, ws)
    return Natural._wrap(_carry(coeffs))
