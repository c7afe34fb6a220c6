"""Acceptance criteria, each at its stated tolerance.

Every test prints one ``PASS``/``FAIL`` line (also repeated in the pytest
terminal summary).  Run alone with::

    pytest tests/test_acceptance.py -s

Timing criteria compare ratios measured within this process, never
absolute times, using interleaved rounds and medians.
"""

import random
import statistics
import time
from pathlib import Path

from conftest import ACCEPTANCE
from bigslice import benchkit, divengine, fuzz
from bigslice.benchkit import BenchSpec, TunePlan, drift, run_bench
from bigslice.divengine import divide, divide_block_short, divide_classical, divide_fast
from bigslice.mulengine import mul, mul_classical
from bigslice.natural import BASE, MASK, Natural, add, compare, shift_left_bits
from bigslice.shinv import shifted_inverse
from bigslice.sliceprod import (SliceRequest, middle_product, product_digit_at_bit,
                                slice_classical, slice_mulders)
from bigslice.tuning import active

GOLDEN = Path(__file__).parent / "golden" / "checksums.txt"


def report(crit: str, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'}  criterion {crit:3s} {detail}"
    print(line)
    ACCEPTANCE.append(line)
    assert ok, line


def paired_ratio(f, g, rounds: int) -> float:
    """Median over interleaved rounds of time(f) / time(g)."""
    f(), g()
    rs = []
    for _ in range(rounds):
        t0 = time.perf_counter()
        f()
        t1 = time.perf_counter()
        g()
        t2 = time.perf_counter()
        rs.append((t1 - t0) / (t2 - t1))
    return statistics.median(rs)


def test_1_differential_correctness():
    cases, seed, max_limbs = 10_000, 20261015, 512
    counts = {}
    bad = []
    for pair in fuzz.PAIRS:
        n = 0
        for m in fuzz.run(cases, seed, max_limbs, (pair,)):
            n += 1
            if m:
                bad.append(str(m))
        counts[pair] = n
    # named adversarial shapes on top of the random mix
    ones = [Natural([MASK] * n) for n in (1, 2, 7, 64, 300, 512)]
    bits = [Natural([0] * (n - 1) + [1 << (n * 7 % 64)]) for n in (1, 3, 40, 257, 512)]
    extra = 0
    for a in ones + bits:
        for b in ones + bits:
            extra += 1
            if mul(a, b) != mul_classical(a, b):
                bad.append(f"mul {len(a)}x{len(b)} adversarial")
            if compare(a, b) >= 0:
                ref = divide_classical(a, b)
                for got in (divide_fast(a, b), divide_block_short(a, b)):
                    if got != ref:
                        bad.append(f"div {len(a)}/{len(b)} adversarial")
                if divide_fast(a, b, False).q != ref.q:
                    bad.append(f"quotient-only {len(a)}/{len(b)} adversarial")
    detail = (", ".join(f"{p} {c}" for p, c in counts.items())
              + f", adversarial {extra}; mismatches {len(bad)}")
    report("1", not bad and min(counts.values()) >= 10_000, detail + "".join(f"\n  {b}" for b in bad[:5]))


def test_2_euclidean_identity():
    rng = random.Random(2)
    checked = 0
    failures = []
    for i in range(3000):
        u, v = fuzz.division_case(rng, 300, 2.0 if i % 3 == 0 else 0.0)
        results = {"classical": divide_classical(u, v), "fast": divide_fast(u, v),
                   "dispatch": divide(u, v)}
        if len(u) >= 2 * len(v):
            results["block"] = divide_block_short(u, v)
        for name, (q, r) in results.items():
            checked += 1
            # multiply-and-compare, once through the library's classical
            # product and once through Python integers
            ok = (compare(r, v) < 0 and add(mul_classical(q, v), r) == u
                  and int(q) * int(v) + int(r) == int(u))
            if not ok:
                failures.append(f"{name} {len(u)}/{len(v)} case {i}")
    report("2", not failures, f"{checked} division results satisfy u = q*v + r, 0 <= r < v"
           + "".join(f"\n  {f}" for f in failures[:5]))


def test_3_shifted_inverse_ulp_bound():
    rng = random.Random(3)
    worst = 0
    failures = []
    for i in range(1000):
        v = fuzz.natural(rng, fuzz.log_uniform(rng, 1, 200))
        k = fuzz.log_uniform(rng, 1, 200)
        inv = shifted_inverse(v, k)
        exact = divide_classical(shift_left_bits(Natural([1]), inv.s), v).q
        gap = int(exact) - int(inv.w)
        worst = max(worst, gap)
        if not 0 <= gap <= 2:
            failures.append(f"case {i}: len(v)={len(v)} k={k} gap={gap}")
    report("3", not failures, f"1000 (v, k) up to 200 limbs, worst floor(2^s/v) - w = {worst}"
           + "".join(f"\n  {f}" for f in failures[:5]))


def test_4_pre_correction_quotient(monkeypatch):
    rng = random.Random(4)
    seen = []
    real = divengine.divide_fast

    def recording(u, v, want_remainder=True, *args, **kw):
        trace = kw.pop("trace", None)
        local = []
        res = real(u, v, want_remainder, *args, trace=local, **kw)
        seen.append((u, v, local[0]["q_prime"], local[0]["path"]))
        if trace is not None:
            trace.extend(local)
        return res

    # block short division calls divide_fast per super-digit; record those too
    monkeypatch.setattr(divengine, "divide_fast", recording)
    for i in range(4000):
        u, v = fuzz.division_case(rng, 256, 2.0 if i % 4 == 0 else 0.0)
        if i % 4 == 0:
            divengine.divide_block_short(u, v)
        else:
            recording(u, v, i % 2 == 0)
    monkeypatch.undo()
    worst = 0
    off = []
    paths = {}
    for u, v, qp, path in seen:
        q = divide_classical(u, v).q
        d = abs(int(q) - int(qp))
        worst = max(worst, d)
        paths[path] = paths.get(path, 0) + 1
        if d > 1:
            off.append(f"{len(u)}/{len(v)} off by {d}")
    report("4", not off, f"{len(seen)} traced estimates, max |q - q'| = {worst}, paths {paths}"
           + "".join(f"\n  {o}" for o in off[:5]))


def test_5_slice_deficit_soundness():
    rng = random.Random(5)
    n = 0
    failures = []
    low = top = 0

    def check(name, s, a, b):
        nonlocal n, low, top
        n += 1
        width = BASE ** (s.hi - s.lo)
        exact = (int(a) * int(b) >> (64 * s.lo)) % width
        got = int(s.value)
        short = (exact - got) % width
        if short >= s.deficit_bound:
            failures.append(f"{name} [{s.lo},{s.hi}) of {len(a)}x{len(b)} short by {short}")
        if s.hi >= len(a) + len(b):
            top += 1
            if got > exact:
                failures.append(f"{name} top slice [{s.lo},{s.hi}) above exact")
        if s.lo == 0:
            low += 1
            if got != exact:
                failures.append(f"{name} low slice [0,{s.hi}) not exact")

    for _ in range(4000):
        a = fuzz.natural(rng, fuzz.log_uniform(rng, 1, 256))
        b = fuzz.natural(rng, fuzz.log_uniform(rng, 1, 256))
        total = len(a) + len(b)
        lo = rng.choice((0, rng.randrange(total), total // 2, max(0, total - 3)))
        hi = rng.choice((total, rng.randint(lo + 1, total)))
        req = SliceRequest(lo, hi, rng.choice((0, 1, 2, 2, 3)))
        check("classical", slice_classical(a, b, req), a, b)
        check("mulders", slice_mulders(a, b, req), a, b)
    for _ in range(2000):
        k = fuzz.log_uniform(rng, 1, 100)
        v2k = fuzz.natural(rng, rng.randint(1, 2 * k))
        wk = fuzz.natural(rng, rng.randint(1, k))
        check("middle", middle_product(v2k, wk, k), v2k, wk)
    digits = 0
    for _ in range(10_000):
        a, b = fuzz.natural(rng, rng.randint(1, 12)), fuzz.natural(rng, rng.randint(1, 12))
        pos = rng.randrange(64 * (len(a) + len(b)) - 63)
        d, md = product_digit_at_bit(a, b, pos)
        digits += 1
        if ((int(a) * int(b) >> pos) - d) & MASK > md:
            failures.append(f"digit at bit {pos} of {len(a)}x{len(b)}")
    report("5", not failures,
           f"{n} slices ({top} top, never high; {low} low, exact) + {digits} bit-aligned digits"
           + "".join(f"\n  {f}" for f in failures[:5]))


def test_6a_karatsuba_asymptotic_win():
    rng = random.Random(61)
    probe = 4 * active().mul.karatsuba_cutoff
    ratios = {}
    for n, rounds in ((probe, 9), (500, 5)):
        a, b = fuzz.natural(rng, n), fuzz.natural(rng, n)
        ratios[n] = paired_ratio(lambda: mul_classical(a, b), lambda: mul(a, b), rounds)
    ok = ratios[probe] > 1 and ratios[500] > 4
    report("6a", ok, f"classical/mul = {ratios[probe]:.2f} at {probe} limbs (> 1), "
           f"{ratios[500]:.2f} at 500 limbs (> 4)")


def test_6b_mulders_low_half():
    rng = random.Random(62)
    a, b = fuzz.natural(rng, 100), fuzz.natural(rng, 100)
    req = SliceRequest(0, 100, 0)
    r = paired_ratio(lambda: [slice_mulders(a, b, req) for _ in range(5)],
                     lambda: [mul(a, b) for _ in range(5)], 11)
    report("6b", r <= 0.9, f"low-half slice / full product = {r:.3f} at 100 limbs (<= 0.9)")


def test_6c_fast_division_crossover():
    rng = random.Random(63)
    n = 2000
    u, v = fuzz.natural(rng, 2 * n), fuzz.natural(rng, n)
    r = paired_ratio(lambda: divide_fast(u, v, True), lambda: divide_classical(u, v), 3)
    report("6c", r < 1, f"fast div+rem / classical = {r:.3f} on {2 * n}/{n} limbs (< 1)")


def test_6d_quotient_only():
    rng = random.Random(64)
    u, v = fuzz.natural(rng, 1000), fuzz.natural(rng, 990)
    r = paired_ratio(lambda: divide_fast(u, v, True),
                     lambda: [divide_fast(u, v, False) for _ in range(5)], 9) * 5
    report("6d", r >= 5, f"div+rem / quotient-only = {r:.1f} on u = 1000, v = 990 limbs (>= 5)")


def test_6e_shifted_inverse_cost():
    rng = random.Random(65)
    k = 500
    v = fuzz.natural(rng, k)
    a, b = fuzz.natural(rng, k), fuzz.natural(rng, k)
    r = paired_ratio(lambda: shifted_inverse(v, k), lambda: mul(a, b), 7)
    report("6e", r <= 4, f"shifted_inverse / mul = {r:.2f} at k = {k} limbs (<= 4)")


def test_7_golden_checksums():
    rows = []
    for line in GOLDEN.read_text().splitlines():
        if line.strip() and not line.startswith("#"):
            op, la, lb, reps, seed, value = line.split()
            rows.append((op, int(la), int(lb), int(reps), int(seed), int(value, 16)))
    bad = []
    runs = 0
    for op, la, lb, reps, seed, value in rows:
        for threads in (1, 3, 1, 3):
            runs += 1
            got = run_bench(BenchSpec(op, la, lb, reps, seed, threads), reps=2).checksum
            if got != value:
                bad.append(f"{op} {la}x{lb} threads={threads}: {got:016x} != {value:016x}")
    # a product large enough for the concurrent top level to engage
    big = [run_bench(BenchSpec("mul", 600, 600, 1, 77, t), reps=1).checksum for t in (1, 3, 3)]
    if len(set(big)) != 1:
        bad.append("mul 600x600 differs between sequential and parallel")
    report("7", not bad, f"{len(rows)} golden specs x {runs // len(rows)} runs "
           f"(threads 1 and 3) + parallel 600x600 check" + "".join(f"\n  {b}" for b in bad))


def test_8_tuner_stability():
    first = benchkit.tune(TunePlan(), seed=1)
    second = benchkit.tune(TunePlan(), seed=1)
    d = drift(first, second)
    worst = max(d, key=d.get)
    detail = ", ".join(f"{k} {first.values()[k]:g}/{second.values()[k]:g}" for k in d)
    report("8", all(x <= 0.2 for x in d.values()),
           f"max drift {d[worst]:.1%} ({worst}); {detail}")
