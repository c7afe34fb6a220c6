"""Partial products: a contiguous range of limbs of ``a*b`` without the rest.

Every routine here reduces to one primitive: the exact column sums
``c[k] = sum(a[i]*b[j] for i+j == k)`` over a band of columns ``[L, H)``.
A request for limbs ``[lo, hi)`` with ``g`` guard limbs uses the band
``L = max(0, lo - g)``, carries it once, and drops the ``lo - L`` bottom
limbs.  Columns below ``L`` are never looked at; their carry into column
``L`` is what makes a slice fall short, and it is bounded by

    carry < m*(B - 1),   m = min(len(a), len(b), L)

because column ``k < L`` holds at most ``m`` terms of size ``(B-1)**2``.
After discarding ``lo - L`` carried limbs that shortfall shrinks to at most
``ceil(m*(B-1) / B**(lo-L))``; `deficit_bound` is that plus one.  So a slice
with at least two guards is short by 0 or 1 in its last limb, and a slice
starting at limb 0 is exact.

The shortfall is measured modulo ``B**(hi-lo)``: when limbs above ``hi``
exist, a borrow can wrap the returned window.  For top slices (``hi`` at or
past the product's length) there is nothing to wrap into and the returned
value is never above the exact one.
"""

from __future__ import annotations

from dataclasses import dataclass
import math
from itertools import repeat
from operator import add, mul as _imul

from .mulengine import MulThresholds, _mul_coeffs
from .natural import BASE, LIMB_BITS, MASK, Natural, Workspace, _carry


@dataclass(frozen=True)
class SliceRequest:
    lo: int
    hi: int
    guards: int = 2

    def __post_init__(self) -> None:
        if self.lo < 0 or self.hi <= self.lo:
            raise ValueError(f"bad slice [{self.lo}, {self.hi})")
        if self.guards < 0:
            raise ValueError("guards must be non-negative")

    def check(self, len_a: int, len_b: int) -> None:
        if self.hi > len_a + len_b:
            raise ValueError(
                f"slice [{self.lo}, {self.hi}) outside a {len_a}x{len_b} product")


@dataclass(frozen=True)
class ProductSlice:
    """Limbs ``[lo, hi)`` of an approximation to a product.

    ``0 <= (exact - value) mod B**(hi-lo) < deficit_bound``, where ``exact``
    is ``floor(a*b / B**lo) mod B**(hi-lo)``.  A bound of 1 means exact.
    """
    value: Natural
    lo: int
    hi: int
    deficit_bound: int

    @property
    def limbs(self) -> tuple[int, ...]:
        return self.value.limbs

    @property
    def exact(self) -> bool:
        return self.deficit_bound == 1


@dataclass(frozen=True)
class MuldersConfig:
    beta: float = 0.7
    mulders_cutoff: int = 20

    def __post_init__(self) -> None:
        if not 0.0 < self.beta < 1.0:
            raise ValueError("beta must lie strictly between 0 and 1")
        if self.mulders_cutoff < 1:
            raise ValueError("mulders_cutoff must be positive")


def _active() -> tuple[MuldersConfig, MulThresholds]:
    from . import tuning
    t = tuning.active()
    return t.mulders, t.mul


def deficit_bound(len_a: int, len_b: int, lo: int, guards: int) -> int:
    """Strict shortfall bound (units of B**lo) for a slice computed from
    columns ``max(0, lo - guards)`` upward."""
    start = max(0, lo - guards)
    m = min(len_a, len_b, start)
    if m == 0:
        return 1
    scale = BASE ** (lo - start)
    return (scale - 1 + m * (BASE - 1) - 1) // scale + 1


def _finish(cols: list[int], start: int, lo: int, hi: int) -> Natural:
    # carry the band, drop the guard limbs, keep hi - lo limbs
    limbs = _carry(cols)
    return Natural._wrap(limbs[lo - start:hi - start])


def _band(len_a: int, len_b: int, req: SliceRequest) -> tuple[int, int]:
    start = max(0, req.lo - req.guards)
    stop = min(req.hi, len_a + len_b - 1)
    return start, stop


# -- classical column accumulation -----------------------------------------

def _comba(a: list[int], b: list[int], start: int, stop: int) -> list[int]:
    """Exact column sums ``c[start:stop]`` of a*b, one column at a time."""
    la, lb = len(a), len(b)
    rb = b[::-1]
    top = lb - 1
    out = []
    push = out.append
    for c in range(start, stop):
        i0 = c - top if c > top else 0
        i1 = c + 1 if c < la else la
        if i0 >= i1:
            push(0)
        else:
            push(sum(map(_imul, a[i0:i1], rb[top - c + i0:top - c + i1])))
    return out


def _band_rows(a: list[int], b: list[int], start: int, stop: int) -> list[int]:
    """Same as `_comba`, row by row; cheaper when b is short."""
    la = len(a)
    out = [0] * (stop - start)
    for j, bj in enumerate(b):
        i0 = max(0, start - j)
        i1 = min(la, stop - j)
        if bj and i0 < i1:
            o = j + i0 - start
            e = o + i1 - i0
            out[o:e] = map(add, out[o:e], map(_imul, a[i0:i1], repeat(bj)))
    return out


def slice_classical(a: Natural, b: Natural, req: SliceRequest) -> ProductSlice:
    """Slice by direct column summation; the reference for `slice_mulders`."""
    x, y = list(a.limbs), list(b.limbs)
    req.check(len(x), len(y))
    start, stop = _band(len(x), len(y), req)
    cols = _comba(x, y, start, stop) if x and y else []
    return ProductSlice(_finish(cols, start, req.lo, req.hi), req.lo, req.hi,
                        deficit_bound(len(x), len(y), req.lo, req.guards))


# -- Mulders recursion ------------------------------------------------------

def _low_rows(a: list[int], b: list[int], n: int) -> list[int]:
    """Columns [0, n) by rows truncated at the diagonal."""
    out = [0] * n
    la = len(a)
    for j, bj in enumerate(b[:n]):
        if bj:
            e = min(n, j + la)
            out[j:e] = map(add, out[j:e], map(_imul, a, repeat(bj)))
    return out


def _low(a: list[int], b: list[int], n: int, cfg: MuldersConfig,
         t: MulThresholds, ws: Workspace) -> list[int]:
    """Exact column sums [0, n) of a*b (zero-padded to n)."""
    a, b = a[:n], b[:n]
    la, lb = len(a), len(b)
    if not la or not lb:
        return [0] * n
    if la + lb - 1 <= n:
        full = _mul_coeffs(a, b, t, ws)
        return full + [0] * (n - len(full))
    if min(la, lb) < cfg.mulders_cutoff or n < cfg.mulders_cutoff:
        return _low_rows(a, b, n)
    k = max(math.ceil(cfg.beta * n), (n + 1) >> 1)
    if k >= n:
        return _low_rows(a, b, n)
    out = _mul_coeffs(a[:k], b[:k], t, ws)[:n]
    out += [0] * (n - len(out))
    # the two triangles the square a[:k]*b[:k] does not cover
    m = n - k
    buf = ws.acquire(m)
    try:
        buf[:] = _low(a[k:], b[:m], m, cfg, t, ws)
        out[k:] = map(add, out[k:], buf)
        buf[:] = _low(a[:m], b[k:], m, cfg, t, ws)
        out[k:] = map(add, out[k:], buf)
    finally:
        ws.release(buf)
    return out


def _high(a: list[int], b: list[int], start: int, cfg: MuldersConfig,
          t: MulThresholds, ws: Workspace) -> list[int]:
    """Exact column sums [start, len(a)+len(b)-1) of a*b, by limb reversal."""
    top = len(a) + len(b) - 1
    ra = ws.acquire(len(a))
    rb = ws.acquire(len(b))
    try:
        ra[:] = a[::-1]
        rb[:] = b[::-1]
        cols = _low(ra, rb, top - start, cfg, t, ws)
    finally:
        ws.release(rb)
        ws.release(ra)
    cols.reverse()
    return cols


def _columns(a: list[int], b: list[int], start: int, stop: int,
             cfg: MuldersConfig, t: MulThresholds, ws: Workspace) -> list[int]:
    """Exact column sums ``c[start:stop]`` of a*b (stop <= len(a)+len(b)-1)."""
    if start >= stop:
        return []
    # limbs at or above `stop` cannot reach the band
    a, b = a[:stop], b[:stop]
    la, lb = len(a), len(b)
    top = la + lb - 1
    if stop > top:
        return _columns(a, b, start, top, cfg, t, ws) + [0] * (stop - max(start, top))
    # limbs of a below start-lb+1 only reach columns below start
    skip = start - lb + 1
    if skip > 0:
        return _columns(a[skip:], b, start - skip, stop - skip, cfg, t, ws)
    skip = start - la + 1
    if skip > 0:
        return _columns(a, b[skip:], start - skip, stop - skip, cfg, t, ws)
    if stop - start < cfg.mulders_cutoff:
        return _comba(a, b, start, stop)
    if min(la, lb) < cfg.mulders_cutoff:
        return _band_rows(a, b, start, stop) if lb <= la else _band_rows(b, a, start, stop)
    if start == 0:
        return _low(a, b, stop, cfg, t, ws)
    if stop == top:
        return _high(a, b, start, cfg, t, ws)
    # middle band: a[:start]*b reaches it from below, a[start:]*b from above
    out = _columns(a[:start], b, start, min(stop, start + lb - 1), cfg, t, ws)
    out += [0] * (stop - start - len(out))
    upper = _low(a[start:], b, stop - start, cfg, t, ws)
    out[:] = map(add, out, upper)
    return out


def slice_mulders(a: Natural, b: Natural, req: SliceRequest,
                  cfg: MuldersConfig | None = None,
                  ws: Workspace | None = None,
                  t: MulThresholds | None = None) -> ProductSlice:
    """Slice of a*b by Mulders' short-product recursion.

    Low bands split at ``k = max(ceil(beta*n), ceil(n/2))`` into one full
    ``k x k`` product plus two recursive triangles; high bands are low bands
    of the limb-reversed operands; a middle band is a high band of the
    lower part of ``a`` plus a low band of the upper part.  Same deficit
    contract as `slice_classical`.
    """
    if cfg is None or t is None:
        acfg, at = _active()
        cfg = cfg or acfg
        t = t or at
    if ws is None:
        ws = Workspace()
    x, y = list(a.limbs), list(b.limbs)
    req.check(len(x), len(y))
    start, stop = _band(len(x), len(y), req)
    cols = _columns(x, y, start, stop, cfg, t, ws) if x and y else []
    return ProductSlice(_finish(cols, start, req.lo, req.hi), req.lo, req.hi,
                        deficit_bound(len(x), len(y), req.lo, req.guards))


def low_product(a: Natural, b: Natural, n: int,
                cfg: MuldersConfig | None = None,
                ws: Workspace | None = None) -> Natural:
    """``a*b mod B**n``, exactly."""
    return slice_mulders(a, b, SliceRequest(0, n, 0), cfg, ws).value


def high_product(a: Natural, b: Natural, lo: int, guards: int = 2,
                 cfg: MuldersConfig | None = None,
                 ws: Workspace | None = None) -> ProductSlice:
    """Limbs ``[lo, len(a)+len(b))`` of a*b."""
    return slice_mulders(a, b, SliceRequest(lo, len(a) + len(b), guards), cfg, ws)


def middle_product(v2k: Natural, wk: Natural, k: int, guards: int = 2,
                   cfg: MuldersConfig | None = None,
                   ws: Workspace | None = None) -> ProductSlice:
    """Limbs ``[k - guards, 2k + guards)`` of ``v2k * wk``.

    ``v2k`` may be shorter than 2k limbs; the window is clipped to the
    product's length.
    """
    if len(v2k) > 2 * k or len(wk) > k:
        raise ValueError("middle_product expects len(v2k) <= 2k, len(wk) <= k")
    lo = max(0, k - guards)
    hi = min(2 * k + guards, len(v2k) + len(wk))
    if hi <= lo:
        return ProductSlice(Natural(), lo, lo + 1, 1)
    return slice_mulders(v2k, wk, SliceRequest(lo, hi, guards), cfg, ws)


def product_digit_at_bit(a: Natural, b: Natural, bit_pos: int) -> tuple[int, int]:
    """The 64 bits of a*b starting at ``bit_pos``, from four columns only.

    Returns ``(digit, max_deficit)`` with ``0 <= (true - digit) mod 2**64 <=
    max_deficit``.  Columns ``p-2 .. p+1`` (``p = bit_pos // 64``) are summed
    exactly; the two guard columns below the window bound the omitted carry
    to at most 1, and nothing is omitted when ``p <= 2``.
    """
    x, y = a.limbs, b.limbs
    if bit_pos < 0 or bit_pos + LIMB_BITS > LIMB_BITS * (len(x) + len(y)):
        raise ValueError(f"bit position {bit_pos} outside the product")
    if not x or not y:
        return 0, 0
    p, s = divmod(bit_pos, LIMB_BITS)
    start = max(0, p - 2)
    stop = min(p + 2, len(x) + len(y) - 1)
    cols = _comba(list(x), list(y), start, stop) if start < stop else []
    acc = 0
    for c in reversed(cols):
        acc = (acc << LIMB_BITS) + c
    digit = (acc >> (LIMB_BITS * (p - start) + s)) & MASK
    return digit, (1 if start > 0 else 0)


__all__ = [
    "SliceRequest", "ProductSlice", "MuldersConfig", "deficit_bound",
    "slice_classical", "slice_mulders", "low_product", "high_product",
    "middle_product", "product_digit_at_bit",
]
