"""Division: classical long division, inverse-based fast division, block
short division by super-digits, and the dispatcher choosing between them.

Fast division multiplies the top of ``u`` by a shifted inverse of ``v`` and
rounds (rather than truncates) at the cut, which leaves the estimate ``q'``
equal to ``q`` or ``q + 1``.  Deciding which usually needs one 64-bit
window of ``v*q'`` at the bit position of ``v``'s top bit: there the
discrepancy ``r' = u - v*q'`` (either ``r`` or ``r - v``) shows up with a
clear sign unless ``|r'|`` is tiny compared to ``v``.  Only then, or when
the remainder is wanted anyway, is the low part of ``v*q'`` formed.
"""

from __future__ import annotations

from dataclasses import dataclass

from .natural import (BASE, LIMB_BITS, MASK, ONE, Natural, Workspace, _add, _bits_at,
                      _cmp, _shl, _shr, _sub, _trim, add, sub, sub_signed)
from .shinv import ShiftedInverse, shifted_inverse
from .sliceprod import (MuldersConfig, SliceRequest, low_product, product_digit_at_bit,
                        slice_mulders)


@dataclass(frozen=True)
class DivResult:
    """Quotient, and the remainder unless only the quotient was asked for."""
    q: Natural
    r: Natural | None = None

    def __iter__(self):
        yield self.q
        yield self.r


@dataclass(frozen=True)
class DivThresholds:
    fast_cutoff: int = 50
    block_ratio: float = 2.0

    def __post_init__(self) -> None:
        if self.fast_cutoff < 2:
            raise ValueError("fast_cutoff must be at least 2")
        if not self.block_ratio > 1.0:
            raise ValueError("block_ratio must exceed 1")


def _active() -> DivThresholds:
    from . import tuning
    return tuning.active().div


# -- classical ---------------------------------------------------------------

def _divmod_classical(u: list[int], v: list[int]) -> tuple[list[int], list[int]]:
    """Long division of limb lists (Knuth's algorithm D)."""
    n, m = len(v), len(u)
    if n == 0:
        raise ZeroDivisionError("division by zero")
    if _cmp(u, v) < 0:
        return [], _trim(list(u))
    if n == 1:
        d = v[0]
        q = [0] * m
        r = 0
        for i in range(m - 1, -1, -1):
            q[i], r = divmod((r << LIMB_BITS) | u[i], d)
        return _trim(q), ([r] if r else [])
    s = LIMB_BITS - v[-1].bit_length()
    vn = _shl(v, s)
    un = _shl(u, s)
    un += [0] * (m + 1 - len(un))
    vtop, vnext = vn[-1], vn[-2]
    q = [0] * (m - n + 1)
    for j in range(m - n, -1, -1):
        qhat, rhat = divmod((un[j + n] << LIMB_BITS) | un[j + n - 1], vtop)
        # trial digit from two limbs: at most two too large, usually exact
        while qhat >= BASE or qhat * vnext > ((rhat << LIMB_BITS) | un[j + n - 2]):
            qhat -= 1
            rhat += vtop
            if rhat >= BASE:
                break
        carry = borrow = 0
        for i in range(n):
            p = qhat * vn[i] + carry
            carry = p >> LIMB_BITS
            t = un[i + j] - (p & MASK) - borrow
            un[i + j] = t & MASK
            borrow = t < 0
        t = un[j + n] - carry - borrow
        un[j + n] = t & MASK
        if t < 0:
            qhat -= 1
            carry = 0
            for i in range(n):
                t = un[i + j] + vn[i] + carry
                un[i + j] = t & MASK
                carry = t >> LIMB_BITS
            un[j + n] = (un[j + n] + carry) & MASK
        q[j] = qhat
    return _trim(q), _shr(_trim(un[:n]), s)


def divide_classical(u: Natural, v: Natural) -> DivResult:
    """Schoolbook long division; exact q and r.  The reference for every
    other division routine."""
    if not v:
        raise ZeroDivisionError("division by zero")
    q, r = _divmod_classical(u.limbs, v.limbs)
    return DivResult(Natural._wrap(q), Natural._wrap(r))


# -- fast ----------------------------------------------------------------------

def _inverse_precision(ub: int, nb: int) -> int:
    # limbs of inverse so that its relative error costs < 1/16 of a quotient unit
    return max(2, -(-(ub - nb + 8) // LIMB_BITS))


def _estimate(u: Natural, v: Natural, inv: ShiftedInverse,
              cfg: MuldersConfig | None, ws: Workspace) -> list[int]:
    """Rounded quotient estimate; equals floor(u/v) or one more."""
    ub, nb = u.bit_length(), v.bit_length()
    inv = inv.truncated(_inverse_precision(ub, nb))
    # limbs of u below bit nb-5 move the estimate by less than 1/16
    j = max(0, (nb - 5) // LIMB_BITS)
    top = Natural._wrap(list(u.limbs[j:]))
    sp = inv.s - LIMB_BITS * j
    lo = max(0, sp // LIMB_BITS - 1)
    hi = len(top) + len(inv.w)
    if lo >= hi:
        return []
    x = slice_mulders(top, inv.w, SliceRequest(lo, hi, 2), cfg, ws).value.limbs
    sh = sp - LIMB_BITS * lo
    if sh <= 0:
        return _shl(x, -sh)
    return _shr(_add(x, _shl([1], sh - 1)), sh)


def _window_verdict(u: Natural, v: Natural, qp: Natural) -> int | None:
    """-1 if q' is one too large, 0 if correct, +1 if one too small, None
    when the window of v*q' cannot tell."""
    nb = v.bit_length()
    p = max(0, nb - 61)
    wu = _bits_at(u.limbs, p)
    wp, md = product_digit_at_bit(v, qp, p) if qp else (0, 0)
    diff = (wu - wp) & MASK
    if diff >> (LIMB_BITS - 1):
        diff -= BASE
    fv = _bits_at(v.limbs, p)
    if diff <= -1:
        return -1
    if md + 1 <= diff <= fv - 1:
        return 0
    if diff - md >= fv + 2:
        return 1
    return None


def _remainder(u: Natural, v: Natural, qp: Natural,
               cfg: MuldersConfig | None, ws: Workspace) -> tuple[int, Natural]:
    """(adjustment to q', exact remainder) from the low n+1 limbs of v*q'."""
    n = len(v)
    ulow = Natural._wrap(list(u.limbs[:n + 1]))
    plow = low_product(v, qp, n + 1, cfg, ws) if qp else Natural()
    mag, neg = sub_signed(ulow, plow)
    # |u - v*q'| < B**n, so the difference mod B**(n+1) pins it down
    if len(mag) > n:
        mag = Natural._wrap(_sub(_shl([1], LIMB_BITS * (n + 1)), mag.limbs))
        neg = not neg
    adj = 0
    if neg:
        while True:
            adj -= 1
            if _cmp(mag.limbs, v.limbs) <= 0:
                return adj, sub(v, mag)
            mag = sub(mag, v)
    while _cmp(mag.limbs, v.limbs) >= 0:
        mag = sub(mag, v)
        adj += 1
    return adj, mag


def divide_fast(u: Natural, v: Natural, want_remainder: bool = True,
                t: DivThresholds | None = None, ws: Workspace | None = None, *,
                inv: ShiftedInverse | None = None,
                cfg: MuldersConfig | None = None,
                trace: list | None = None) -> DivResult:
    """Division through a shifted inverse of v.

    ``inv`` may be a precomputed inverse of ``v`` at any precision at least
    the one this quotient needs.  When ``trace`` is a list, one record per
    call is appended: the pre-correction estimate and the path that fixed it.
    """
    if not v:
        raise ZeroDivisionError("division by zero")
    if _cmp(u.limbs, v.limbs) < 0:
        if trace is not None:
            trace.append({"q_prime": Natural(), "path": "small"})
        return DivResult(Natural(), u if want_remainder else None)
    if ws is None:
        ws = Workspace()
    ub, nb = u.bit_length(), v.bit_length()
    need = _inverse_precision(ub, nb)
    if inv is None or inv.k < need:
        inv = shifted_inverse(v, need, ws, cfg)
    qp = Natural._wrap(_estimate(u, v, inv, cfg, ws))
    if not want_remainder:
        verdict = _window_verdict(u, v, qp)
        if verdict is not None:
            if trace is not None:
                trace.append({"q_prime": qp, "path": "window"})
            if verdict < 0:
                return DivResult(sub(qp, ONE))
            return DivResult(add(qp, ONE) if verdict else qp)
    adj, r = _remainder(u, v, qp, cfg, ws)
    if trace is not None:
        trace.append({"q_prime": qp, "path": "lowprod"})
    if adj < 0:
        q = sub(qp, Natural.from_int(-adj))
    else:
        q = add(qp, Natural.from_int(adj)) if adj else qp
    return DivResult(q, r if want_remainder else None)


def divide_block_short(u: Natural, v: Natural, t: DivThresholds | None = None,
                       ws: Workspace | None = None, *,
                       cfg: MuldersConfig | None = None,
                       trace: list | None = None) -> DivResult:
    """Short division of u by the super-digit v.

    u is consumed from the top in blocks of ``n = len(v)`` limbs; each step
    is a 2n-by-n fast division of ``carry*B**n + block`` that yields ``n``
    quotient limbs and the next carry.  A single inverse of v at ``n + 1``
    limbs serves every step.
    """
    if not v:
        raise ZeroDivisionError("division by zero")
    if ws is None:
        ws = Workspace()
    n = len(v)
    ul = u.limbs
    m = len(ul)
    if m < n:
        return DivResult(Natural(), u)
    inv = shifted_inverse(v, n + 1, ws, cfg)
    nblocks = -(-m // n)
    q = [0] * (nblocks * n)
    r: tuple[int, ...] = ()
    for b in range(nblocks - 1, -1, -1):
        block = list(ul[b * n:(b + 1) * n])
        if r:
            block += [0] * (n - len(block))
        cur = Natural._wrap(block + list(r))
        qb, rb = divide_fast(cur, v, True, t, ws, inv=inv, cfg=cfg, trace=trace)
        q[b * n:b * n + len(qb)] = qb.limbs
        r = rb.limbs
    return DivResult(Natural._wrap(q), Natural._wrap(list(r)))


def divide(u: Natural, v: Natural, want_remainder: bool = True,
           t: DivThresholds | None = None) -> DivResult:
    """Quotient (and remainder) of u by v, choosing the algorithm by shape.

    Classical while the divisor or the quotient is short, block short
    division once the quotient is much longer than the divisor, fast
    division in between.  A quotient-only request with a long divisor takes
    the fast path even for a short quotient, since it can skip the product
    with the whole divisor.
    """
    if not v:
        raise ZeroDivisionError("division by zero")
    if t is None:
        t = _active()
    if _cmp(u.limbs, v.limbs) < 0:
        return DivResult(Natural(), u if want_remainder else None)
    n = len(v)
    kq = len(u) - n + 1
    if n < t.fast_cutoff or (kq < t.fast_cutoff and want_remainder):
        res = divide_classical(u, v)
        return res if want_remainder else DivResult(res.q)
    if kq > t.block_ratio * n:
        res = divide_block_short(u, v, t)
        return res if want_remainder else DivResult(res.q)
    return divide_fast(u, v, want_remainder, t)


__all__ = [
    "DivResult", "DivThresholds", "divide_classical", "divide_fast",
    "divide_block_short", "divide",
]
