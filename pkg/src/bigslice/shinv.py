"""Shifted inverses: integers ``w`` with ``w ~ 2**s / v``.

For a normalized ``V`` of ``n`` limbs (top bit set) the precision-``k``
inverse is ``T_k = floor(2**(64*(n+k) - 1) / V)``, a ``k``-limb integer
whose top bit is set.  Everything here maintains ``W <= T_k <= W + 2``.

One Newton step from ``k`` to ``k + d`` limbs (``d < k``) needs only a
narrow band of ``V*W``.  With ``X = 2**(64*(n+k) - 1)`` the residual
``r = X - V*W`` lies in ``[0, 3V)``, and since ``X`` is a multiple of a
high power of B the top ``k`` limbs of ``V*W`` cancel against it.  The
residual's leading ``d+2`` limbs are the negated limbs ``[n-d-1, n+1)`` of
``V*W``, which a middle slice supplies.  Multiplying those by ``W`` and
keeping the top limbs gives the correction ``r*B**d/V`` to within about
1/2 + 26/B; rounding it and subtracting one lands ``W'`` in
``[T' - 1, T']``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .natural import LIMB_BITS, MASK, Natural, Workspace, _shl, leading_zero_bits
from .sliceprod import MuldersConfig, SliceRequest, slice_mulders

# Precision of `initial_inverse` when none is given.
BASE_PRECISION = 2
# Below this many limbs one classical division beats the Newton ladder.
DIRECT_CUTOFF = 24
# Extra limb of the residual kept below the correction's ulp.
_G = 1


@dataclass(frozen=True)
class ShiftedInverse:
    """``w <= floor(2**s / v) <= w + ulp_bound`` for the ``v`` it was built for."""
    w: Natural
    s: int
    k: int
    ulp_bound: int = 2

    def truncated(self, k: int) -> ShiftedInverse:
        """The same inverse at ``k`` limbs; dropping limbs keeps the bound."""
        if k >= self.k:
            return self
        e = self.k - k
        return ShiftedInverse(Natural._wrap(list(self.w.limbs[e:])),
                              self.s - LIMB_BITS * e, k,
                              min(self.ulp_bound, 1) if e else self.ulp_bound)


@dataclass(frozen=True)
class PrecisionSchedule:
    steps: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        st = self.steps
        if not st:
            raise ValueError("empty precision schedule")
        for a, b in zip(st, st[1:]):
            if not a < b <= 2 * a + 1:
                raise ValueError(f"invalid schedule step {a} -> {b}")

    @classmethod
    def build(cls, k: int, k0: int = BASE_PRECISION) -> PrecisionSchedule:
        """Halve ``k`` (rounding up) while the result stays at or above
        ``k0``, then reverse; the ladder starts between ``k0`` and ``2*k0``.

        Each predecessor is ``ceil((k+1)/2)``, so every step grows by at
        most ``k - 1`` limbs and the Newton truncation stays far below an ulp.
        """
        if k < 1:
            raise ValueError("precision must be positive")
        ks = [k]
        while ks[-1] > k0 and (ks[-1] + 2) // 2 >= k0:
            ks.append((ks[-1] + 2) // 2)
        return cls(tuple(reversed(ks)))

    @property
    def k0(self) -> int:
        return self.steps[0]

    @property
    def k(self) -> int:
        return self.steps[-1]


def normalize(v: Natural) -> tuple[Natural, int, bool]:
    """``(v << shift, shift, v is a power of two)`` with the top bit set."""
    if not v:
        raise ZeroDivisionError("cannot normalize zero")
    shift = leading_zero_bits(v)
    limbs = v.limbs
    pow2 = limbs[-1] & (limbs[-1] - 1) == 0 and not any(limbs[:-1])
    return Natural._wrap(_shl(limbs, shift)), shift, pow2


def _base_inverse(V: list[int], k: int) -> list[int]:
    # floor(2**(64(t+k)-1) / (V_t + 1)) from the top t limbs; exact when t = n
    from .divengine import _divmod_classical
    n = len(V)
    t = min(n, k + 1)
    top = V[n - t:]
    if t < n:
        i = 0
        while i < t and top[i] == (1 << LIMB_BITS) - 1:
            top[i] = 0
            i += 1
        if i == t:
            top.append(1)
        else:
            top[i] += 1
    num = [0] * (t + k - 1) + [1 << (LIMB_BITS - 1)]
    q, _ = _divmod_classical(num, top)
    return _clamp(q, k)


def _clamp(W: list[int], k: int) -> list[int]:
    # T lies in [2**(64k-1), 2**(64k)], the top end only for a power of two;
    # saturate there and lift anything below the bottom end
    if len(W) > k:
        return [MASK] * k
    if len(W) < k or W[-1] >> (LIMB_BITS - 1) == 0:
        return [0] * (k - 1) + [1 << (LIMB_BITS - 1)]
    return W


def initial_inverse(v_norm: Natural, k: int = BASE_PRECISION) -> ShiftedInverse:
    """Inverse of a normalized value at ``k`` limbs by direct division.

    Divides ``2**(64(t+k)-1)`` by the top ``t = min(n, k+1)`` limbs of
    ``v_norm`` rounded up, so the result never exceeds the true inverse
    and is at most 2 below it (1 below when ``t = k + 1``).
    """
    V = list(v_norm.limbs)
    if not V or V[-1] >> (LIMB_BITS - 1) == 0:
        raise ValueError("initial_inverse needs a normalized value")
    W = _base_inverse(V, k)
    return ShiftedInverse(Natural._wrap(W), LIMB_BITS * (len(V) + k) - 1, k, 2)


def _refine(V: list[int], W: list[int], k: int, k_next: int,
            cfg: MuldersConfig | None, ws: Workspace) -> list[int]:
    """One Newton step on normalized limb lists; requires k_next <= 2k - 1."""
    n = len(V)
    d = k_next - k
    j = n - d - _G
    width = d + _G + 1
    mod = 1 << (LIMB_BITS * width)
    Vn, Wn = Natural._wrap(V), Natural._wrap(W)
    if j >= 0:
        band = slice_mulders(Vn, Wn, SliceRequest(j, n + 1, 2), cfg, ws).value
        e = (-int(band)) % mod
    else:
        # V too short for the band: form the residual exactly
        from .mulengine import mul
        vw = int(mul(Vn, Wn))
        e = ((1 << (LIMB_BITS * (n + k) - 1)) - vw) << (LIMB_BITS * -j)
    if e == 0:
        return _clamp([0] * d + W if d else W[:], k_next)
    E = Natural.from_int(e)
    # top limbs of E*W: floor(E*W / B**(k+G-1)) to within 1
    lo = k + _G - 1
    hi = len(E) + k
    c = slice_mulders(E, Wn, SliceRequest(lo, hi, 2), cfg, ws).value
    corr = (int(c) + (1 << (LIMB_BITS - 2))) >> (LIMB_BITS - 1)
    out = (int(Wn) << (LIMB_BITS * d)) + corr - 1
    return _clamp(list(Natural.from_int(out).limbs), k_next)


def _refine_to(V: list[int], W: list[int], k: int, k_next: int,
               cfg: MuldersConfig | None, ws: Workspace) -> list[int]:
    if k_next > 2 * k - 1:
        mid = (k_next + 2) // 2
        if k < mid < k_next:
            W = _refine(V, W, k, mid, cfg, ws)
            k = mid
    return _refine(V, W, k, k_next, cfg, ws)


def refine(w_k: ShiftedInverse, v: Natural, k_next: int,
           ws: Workspace | None = None,
           cfg: MuldersConfig | None = None) -> ShiftedInverse:
    """One Newton step ``w <- w + w*(1 - v*w)`` from ``w_k.k`` to ``k_next`` limbs.

    Accepts ``k_next <= 2k + 1``; targets above ``2k - 1`` are reached via
    one intermediate precision so the error analysis above still applies.
    """
    k = w_k.k
    if not k <= k_next <= 2 * k + 1:
        raise ValueError(f"refine step {k} -> {k_next} out of range")
    V, shift, pow2 = normalize(v)
    if pow2:
        return _pow2_inverse(v, k_next)
    if ws is None:
        ws = Workspace()
    W = list(w_k.w.limbs)
    Wn = _refine_to(list(V.limbs), W, k, k_next, cfg, ws)
    return ShiftedInverse(Natural._wrap(Wn), w_k.s + LIMB_BITS * (k_next - k), k_next, 2)


def _pow2_inverse(v: Natural, k: int) -> ShiftedInverse:
    nb = v.bit_length()
    w = Natural._wrap([0] * (k - 1) + [1 << (LIMB_BITS - 1)])
    return ShiftedInverse(w, nb + LIMB_BITS * k - 2, k, 0)


def inverse_limbs(V: list[int], k: int, cfg: MuldersConfig | None = None,
                  ws: Workspace | None = None) -> list[int]:
    """``W`` with ``W <= T_k <= W + 2`` for a normalized, non-power-of-two V."""
    if ws is None:
        ws = Workspace()
    sched = PrecisionSchedule.build(k, min(k, DIRECT_CUTOFF))
    W = _base_inverse(V, sched.k0)
    cur = sched.k0
    for nxt in sched.steps[1:]:
        W = _refine(V, W, cur, nxt, cfg, ws)
        cur = nxt
    return W


def _top_normalized(limbs: tuple[int, ...], shift: int, t: int) -> list[int]:
    """Top ``t`` limbs of ``limbs << shift`` without shifting the rest."""
    src = list(limbs[-(t + 1):])
    out = _shl(src, shift)
    return out[-t:]


def _round_up(top: list[int]) -> list[int]:
    top = top[:]
    for i, x in enumerate(top):
        if x != MASK:
            top[i] = x + 1
            return top
        top[i] = 0
    top.append(1)
    return top


def shifted_inverse(v: Natural, k: int, ws: Workspace | None = None,
                    cfg: MuldersConfig | None = None) -> ShiftedInverse:
    """A ``k``-limb ``w`` with ``w <= floor(2**s / v) <= w + 2``.

    ``s = bit_length(v) + 64k - 1``, so ``w`` has its top bit set; an
    exact power of two gets ``s`` one smaller and an exact ``w = 2**(64k-1)``.

    Only the top ``k + 1`` normalized limbs of ``v`` are read, rounded up
    when more exist: that moves the true inverse down by at most one, and
    the Newton steps leave at most one more.
    """
    if not v:
        raise ZeroDivisionError("inverse of zero")
    if k < 1:
        raise ValueError("precision must be positive")
    limbs = v.limbs
    if limbs[-1] & (limbs[-1] - 1) == 0 and not any(limbs[:-1]):
        return _pow2_inverse(v, k)
    shift = leading_zero_bits(v)
    n = len(limbs)
    t = min(n, k + 1)
    V = _top_normalized(limbs, shift, t)
    if t < n:
        V = _round_up(V)
        if len(V) > t:
            # rounded up to a power of two: its inverse is exact
            W = [0] * (k - 1) + [1 << (LIMB_BITS - 1)]
            return ShiftedInverse(Natural._wrap(W), v.bit_length() + LIMB_BITS * k - 1, k, 2)
    W = inverse_limbs(V, k, cfg, ws)
    return ShiftedInverse(Natural._wrap(W), v.bit_length() + LIMB_BITS * k - 1, k, 2)


__all__ = [
    "ShiftedInverse", "PrecisionSchedule", "BASE_PRECISION", "DIRECT_CUTOFF", "normalize",
    "initial_inverse", "refine", "shifted_inverse", "inverse_limbs",
]
