"""Unsigned multi-precision integers stored as little-endian 64-bit limbs.

This module holds the representation (`Natural`), the linear-time primitives
every other layer builds on, the scratch `Workspace` pool used by the
recursive multipliers, and decimal text conversion.

Internally the arithmetic works on plain Python lists.  Two list flavours
circulate between modules:

* limb lists: every entry in ``[0, 2**64)``; possibly with zero top limbs.
* coefficient lists: non-negative entries of any size whose value is
  ``sum(c[i] * B**i)``.  The multipliers produce these (column sums that have
  not yet had their carries propagated); `_carry` turns them into limbs.
  Python ints stand in for the two- and three-word machine accumulators a
  compiled implementation would use; entries never exceed a few limbs.
"""

from __future__ import annotations

import threading
from contextlib import contextmanager
from typing import Iterable, Iterator, Sequence

LIMB_BITS = 64
BASE = 1 << LIMB_BITS
MASK = BASE - 1
MAX_LIMBS = (1 << 32) - 1

_DEC_CHUNK = 10**19
_DEC_CHUNK_DIGITS = 19


class UnderflowError(ArithmeticError):
    """Raised by `sub` when the subtrahend exceeds the minuend."""


class WorkspaceExhausted(MemoryError):
    """Raised when a bounded `Workspace` would exceed its capacity."""


class Natural:
    """An immutable unsigned integer.

    ``limbs`` is a tuple of 64-bit words, least significant first.  Zero is
    the empty tuple; otherwise the top limb is nonzero.
    """

    __slots__ = ("limbs",)

    def __init__(self, limbs: Iterable[int] = ()) -> None:
        t = tuple(limbs)
        n = len(t)
        while n and t[n - 1] == 0:
            n -= 1
        if n != len(t):
            t = t[:n]
        if t and (min(t) < 0 or max(t) > MASK):
            raise ValueError("limb out of range for a 64-bit word")
        if n > MAX_LIMBS:
            raise OverflowError("Natural limited to 2**32 - 1 limbs")
        self.limbs = t

    @classmethod
    def _wrap(cls, limbs: list[int]) -> Natural:
        # Trusted constructor for kernel output: limbs already in range.
        _trim(limbs)
        self = object.__new__(cls)
        self.limbs = tuple(limbs)
        return self

    @classmethod
    def from_int(cls, value: int) -> Natural:
        if value < 0:
            raise ValueError("Natural cannot hold a negative value")
        nbytes = (value.bit_length() + 7) // 8
        raw = value.to_bytes(nbytes, "little")
        raw += b"\0" * (-len(raw) % 8)
        return cls._wrap([int.from_bytes(raw[i:i + 8], "little")
                          for i in range(0, len(raw), 8)])

    def __int__(self) -> int:
        return int.from_bytes(
            b"".join(x.to_bytes(8, "little") for x in self.limbs), "little")

    def __len__(self) -> int:
        return len(self.limbs)

    def __bool__(self) -> bool:
        return bool(self.limbs)

    def __repr__(self) -> str:
        if len(self.limbs) <= 4:
            return f"Natural({to_decimal(self)})"
        return f"Natural(<{len(self.limbs)} limbs>)"

    def __str__(self) -> str:
        return to_decimal(self)

    def __hash__(self) -> int:
        return hash(self.limbs)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Natural):
            return self.limbs == other.limbs
        return NotImplemented

    def __lt__(self, other: Natural) -> bool:
        return compare(self, other) < 0

    def __le__(self, other: Natural) -> bool:
        return compare(self, other) <= 0

    def __gt__(self, other: Natural) -> bool:
        return compare(self, other) > 0

    def __ge__(self, other: Natural) -> bool:
        return compare(self, other) >= 0

    def bit_length(self) -> int:
        if not self.limbs:
            return 0
        return LIMB_BITS * (len(self.limbs) - 1) + self.limbs[-1].bit_length()

    def __add__(self, other: Natural) -> Natural:
        return add(self, other)

    def __sub__(self, other: Natural) -> Natural:
        return sub(self, other)

    def __mul__(self, other: Natural) -> Natural:
        from .mulengine import mul
        return mul(self, other)

    def __divmod__(self, other: Natural) -> tuple[Natural, Natural]:
        from .divengine import divide
        res = divide(self, other, want_remainder=True)
        return res.q, res.r

    def __floordiv__(self, other: Natural) -> Natural:
        from .divengine import divide
        return divide(self, other, want_remainder=False).q

    def __mod__(self, other: Natural) -> Natural:
        return divmod(self, other)[1]

    def __lshift__(self, n: int) -> Natural:
        return shift_left_bits(self, n)

    def __rshift__(self, n: int) -> Natural:
        return shift_right_bits(self, n)


ZERO = Natural()
ONE = Natural((1,))


# -- list kernels -----------------------------------------------------------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _cmp(a: Sequence[int], b: Sequence[int]) -> int:
    """Compare two trimmed limb sequences."""
    la, lb = len(a), len(b)
    if la != lb:
        return 1 if la > lb else -1
    for i in range(la - 1, -1, -1):
        x, y = a[i], b[i]
        if x != y:
            return 1 if x > y else -1
    return 0


def _add(a: Sequence[int], b: Sequence[int]) -> list[int]:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    carry = 0
    i = 0
    for y in b:
        s = out[i] + y + carry
        out[i] = s & MASK
        carry = s >> LIMB_BITS
        i += 1
    n = len(out)
    while carry and i < n:
        s = out[i] + 1
        out[i] = s & MASK
        carry = s >> LIMB_BITS
        i += 1
    if carry:
        out.append(carry)
    return out


def _sub(a: Sequence[int], b: Sequence[int]) -> list[int]:
    """a - b for limb lists with value(a) >= value(b); result untrimmed."""
    out = list(a)
    borrow = 0
    i = 0
    for y in b:
        d = out[i] - y - borrow
        out[i] = d & MASK
        borrow = d < 0
        i += 1
    n = len(out)
    while borrow and i < n:
        d = out[i] - 1
        out[i] = d & MASK
        borrow = d < 0
        i += 1
    if borrow:
        raise UnderflowError("subtraction would go negative")
    return out


def _carry(coeffs: Sequence[int], start: int = 0) -> list[int]:
    """Propagate carries through a non-negative coefficient list."""
    out = []
    push = out.append
    carry = 0
    for i in range(start, len(coeffs)):
        x = coeffs[i] + carry
        push(x & MASK)
        carry = x >> LIMB_BITS
    while carry:
        push(carry & MASK)
        carry >>= LIMB_BITS
    return _trim(out)


def _shl(a: Sequence[int], n: int) -> list[int]:
    if not a:
        return []
    words, bits = divmod(n, LIMB_BITS)
    if bits == 0:
        return [0] * words + list(a)
    out = [0] * words
    back = LIMB_BITS - bits
    prev = 0
    for x in a:
        out.append(((x << bits) & MASK) | (prev >> back))
        prev = x
    top = prev >> back
    if top:
        out.append(top)
    return out


def _shr(a: Sequence[int], n: int) -> list[int]:
    words, bits = divmod(n, LIMB_BITS)
    if words >= len(a):
        return []
    if bits == 0:
        return list(a[words:])
    back = LIMB_BITS - bits
    src = a[words:]
    out = [(src[i] >> bits) | ((src[i + 1] << back) & MASK)
           for i in range(len(src) - 1)]
    out.append(src[-1] >> bits)
    return _trim(out)


def _low_bits(a: Sequence[int], n: int) -> list[int]:
    """a mod 2**n."""
    words, bits = divmod(n, LIMB_BITS)
    out = list(a[:words])
    if bits and words < len(a):
        out.append(a[words] & ((1 << bits) - 1))
    return _trim(out)


def _bits_at(a: Sequence[int], pos: int, width: int = LIMB_BITS) -> int:
    """The ``width``-bit field of ``a`` starting at bit ``pos`` (width <= 64)."""
    w, s = divmod(pos, LIMB_BITS)
    n = len(a)
    lo = a[w] if w < n else 0
    hi = a[w + 1] if w + 1 < n else 0
    return ((lo >> s) | (hi << (LIMB_BITS - s))) & ((1 << width) - 1)


# -- public operations ------------------------------------------------------

def add(a: Natural, b: Natural) -> Natural:
    return Natural._wrap(_add(a.limbs, b.limbs))


def sub(a: Natural, b: Natural) -> Natural:
    """a - b; raises UnderflowError if b > a."""
    if _cmp(a.limbs, b.limbs) < 0:
        raise UnderflowError("subtraction would go negative")
    return Natural._wrap(_sub(a.limbs, b.limbs))


def sub_signed(a: Natural, b: Natural) -> tuple[Natural, bool]:
    """Return ``(|a - b|, a < b)``."""
    c = _cmp(a.limbs, b.limbs)
    if c < 0:
        return Natural._wrap(_sub(b.limbs, a.limbs)), True
    return Natural._wrap(_sub(a.limbs, b.limbs)), False


def compare(a: Natural, b: Natural) -> int:
    """-1, 0 or 1 as a is less than, equal to or greater than b."""
    return _cmp(a.limbs, b.limbs)


def shift_left_bits(a: Natural, n: int) -> Natural:
    if n < 0:
        raise ValueError("negative shift count")
    return Natural._wrap(_shl(a.limbs, n))


def shift_right_bits(a: Natural, n: int) -> Natural:
    if n < 0:
        raise ValueError("negative shift count")
    return Natural._wrap(_shr(a.limbs, n))


def leading_zero_bits(a: Natural) -> int:
    """Zero bits above the highest set bit of the top limb (0..63)."""
    if not a.limbs:
        raise ValueError("leading_zero_bits of zero is undefined")
    return LIMB_BITS - a.limbs[-1].bit_length()


def branch_free_select(x: int, threshold: int) -> int:
    """``0 if x >= threshold + 1 else (x - threshold) mod 2**64``, without a branch.

    Same mask-and idiom as ``(-(c)) & (x - M)``; the mask is built from the
    complementary test ``x < M + 1`` so that an all-ones mask keeps
    ``x - M`` and a zero mask yields 0, which is what the conditional says.
    """
    mask = -(x < threshold + 1) & MASK
    return mask & ((x - threshold) & MASK)


# -- decimal text -----------------------------------------------------------

def from_decimal(text: str) -> Natural:
    if not text or not text.isascii() or not text.isdigit():
        raise ValueError(f"not an unsigned decimal literal: {text!r}")
    acc: list[int] = []
    head = len(text) % _DEC_CHUNK_DIGITS or _DEC_CHUNK_DIGITS
    pos = 0
    width = head
    while pos < len(text):
        chunk = int(text[pos:pos + width])
        scale = 10**width
        carry = chunk
        for i, x in enumerate(acc):
            t = x * scale + carry
            acc[i] = t & MASK
            carry = t >> LIMB_BITS
        if carry:
            acc.append(carry)
        pos += width
        width = _DEC_CHUNK_DIGITS
    return Natural._wrap(acc)


def to_decimal(a: Natural) -> str:
    if not a.limbs:
        return "0"
    work = list(a.limbs)
    chunks = []
    while work:
        rem = 0
        for i in range(len(work) - 1, -1, -1):
            cur = (rem << LIMB_BITS) | work[i]
            work[i], rem = divmod(cur, _DEC_CHUNK)
        _trim(work)
        chunks.append(rem)
    parts = [str(chunks[-1])]
    parts.extend(f"{c:019d}" for c in reversed(chunks[:-1]))
    return "".join(parts)


# -- scratch workspace ------------------------------------------------------

class Workspace:
    """A pool of reusable scratch limb buffers.

    ``acquire(n)`` hands out a list the caller must fully overwrite before
    reading; ``release`` returns it for reuse.  Buffers are pooled by
    requested size so repeated operations of one shape stop allocating once
    warm.  ``high_water`` records the peak number of limbs on loan, which
    tests compare with `mulengine.workspace_bound`.  Acquisition and release
    are locked, so concurrent tasks can share one pool; each still gets its
    own disjoint buffers.
    """

    POISON = -1

    def __init__(self, capacity: int | None = None, *, poison: bool = False) -> None:
        self.capacity = capacity
        self.poison = poison
        self.in_use = 0
        self.high_water = 0
        self.allocations = 0
        self._free: dict[int, list[list[int]]] = {}
        self._loaned: dict[int, int] = {}
        self._lock = threading.Lock()

    def acquire(self, n: int) -> list[int]:
        with self._lock:
            if self.capacity is not None and self.in_use + n > self.capacity:
                raise WorkspaceExhausted(
                    f"need {n} limbs, {self.capacity - self.in_use} free")
            pool = self._free.get(n)
            if pool:
                buf = pool.pop()
            else:
                buf = [self.POISON] * n if self.poison else [0] * n
                self.allocations += 1
            self._loaned[id(buf)] = n
            self.in_use += n
            if self.in_use > self.high_water:
                self.high_water = self.in_use
            return buf

    def release(self, buf: list[int]) -> None:
        with self._lock:
            n = self._loaned.pop(id(buf))
            self.in_use -= n
            if self.poison:
                buf[:] = [self.POISON] * n
            self._free.setdefault(n, []).append(buf)

    @contextmanager
    def scratch(self, n: int) -> Iterator[list[int]]:
        buf = self.acquire(n)
        try:
            yield buf
        finally:
            self.release(buf)

    def reserve(self, n: int) -> None:
        """Raise the capacity (if bounded) so at least n limbs are free."""
        with self._lock:
            if self.capacity is not None and self.capacity - self.in_use < n:
                self.capacity = self.in_use + n
