"""Benchmark harness: seeded operands, checksummed timing loops, the four
comparison tables, and the threshold tuner.

Operand generator
-----------------
``gen_operand(seed, index, n)`` is fixed so checksums are reproducible in
any language.  With all arithmetic mod 2**64::

    z = seed + (index + 1) * 0x9E3779B97F4A7C15          # splitmix64 step
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    x = z ^ (z >> 31)  or 1 if that is 0
    repeat n times:                                      # xorshift64*
        x ^= x >> 12;  x ^= x << 25;  x ^= x >> 27
        emit x * 0x2545F4914F6CDD1D

The emitted words are the limbs, least significant first; a zero top limb
is replaced by 1.  Iteration ``i`` of a benchmark uses operands
``gen_operand(seed, 2i, len_a)`` and ``gen_operand(seed, 2i+1, len_b)``.

Checksum
--------
``acc = acc * 6364136223846793005 + limb  (mod 2**64)`` over every limb of
every result, least significant limb first; divisions fold the quotient
then the remainder.
"""

from __future__ import annotations

import csv
import io
import math
import statistics
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

from . import mulengine, tuning
from .divengine import divide_block_short, divide_classical, divide_fast
from .mulengine import mul, mul_classical
from .natural import MASK, Natural
from .shinv import shifted_inverse
from .sliceprod import SliceRequest, slice_classical, slice_mulders

MULT = 6364136223846793005
_GOLDEN = 0x9E3779B97F4A7C15
REPS = 5

OPERATIONS = (
    "mul", "mul-classical", "slice-low", "slice-high", "shinv",
    "div-classical", "div-fast", "div-quotient-only",
)
# helpers for the half-product and block tables
EXTRA_OPERATIONS = ("slice-low-classical", "mul-low", "div-block")


def _splitmix(z: int) -> int:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & MASK
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & MASK
    return z ^ (z >> 31)


def gen_operand(seed: int, index: int, n: int) -> Natural:
    if n < 1:
        raise ValueError("operand length must be at least 1")
    x = _splitmix((seed + (index + 1) * _GOLDEN) & MASK) or 1
    out = []
    push = out.append
    for _ in range(n):
        x ^= x >> 12
        x ^= (x << 25) & MASK
        x ^= x >> 27
        push(x * 0x2545F4914F6CDD1D & MASK)
    if out[-1] == 0:
        out[-1] = 1
    return Natural._wrap(out)


def checksum_fold(acc: int, limbs: Sequence[int]) -> int:
    for x in limbs:
        acc = (acc * MULT + x) & MASK
    return acc


@dataclass(frozen=True)
class BenchSpec:
    operation: str
    len_a: int
    len_b: int
    repeats: int = 1
    seed: int = 0
    threads: int = mulengine.DEFAULT_THREADS

    def __post_init__(self) -> None:
        if self.operation not in OPERATIONS + EXTRA_OPERATIONS:
            raise ValueError(f"unknown operation {self.operation!r}")
        if self.repeats < 1:
            raise ValueError("repeats must be at least 1")
        if self.len_a < 1 or self.len_b < 1:
            raise ValueError("operand lengths must be at least 1")
        if self.threads < 1:
            raise ValueError("threads must be at least 1")


@dataclass
class BenchRecord:
    spec: BenchSpec
    elapsed: float
    per_op: float
    checksum: int
    cpu: float = 0.0
    baseline_ratio: float | None = None
    samples: list[float] = field(default_factory=list)

    def ratio_to(self, baseline: BenchRecord) -> float:
        self.baseline_ratio = self.per_op / baseline.per_op
        return self.baseline_ratio


@contextmanager
def thread_cap(threads: int) -> Iterator[None]:
    prev = mulengine.DEFAULT_THREADS
    mulengine.DEFAULT_THREADS = threads
    try:
        yield
    finally:
        mulengine.DEFAULT_THREADS = prev


def _kernel(spec: BenchSpec) -> Callable[[Natural, Natural], Sequence[Sequence[int]]]:
    """The operation as a function returning the limb sequences to fold."""
    op = spec.operation
    if op == "mul":
        return lambda a, b: (mul(a, b).limbs,)
    if op == "mul-classical":
        return lambda a, b: (mul_classical(a, b).limbs,)
    if op in ("slice-low", "slice-low-classical", "mul-low", "slice-high"):
        n = max(spec.len_a, spec.len_b)
        total = spec.len_a + spec.len_b
        low = SliceRequest(0, n, 0)
        if op == "slice-low":
            return lambda a, b: (slice_mulders(a, b, low).limbs,)
        if op == "slice-low-classical":
            return lambda a, b: (slice_classical(a, b, low).limbs,)
        if op == "mul-low":
            return lambda a, b: (mul(a, b).limbs[:n],)
        high = SliceRequest(total - n, total, 2)
        return lambda a, b: (slice_mulders(a, b, high).limbs,)
    if op == "shinv":
        k = spec.len_b
        return lambda a, b: (shifted_inverse(a, k).w.limbs,)
    if op == "div-classical":
        return lambda a, b: tuple(x.limbs for x in divide_classical(a, b))
    if op == "div-fast":
        return lambda a, b: tuple(x.limbs for x in divide_fast(a, b, True))
    if op == "div-quotient-only":
        return lambda a, b: (divide_fast(a, b, False).q.limbs,)
    if op == "div-block":
        return lambda a, b: tuple(x.limbs for x in divide_block_short(a, b))
    raise ValueError(op)


def operands(spec: BenchSpec) -> list[tuple[Natural, Natural]]:
    return [(gen_operand(spec.seed, 2 * i, spec.len_a),
             gen_operand(spec.seed, 2 * i + 1, spec.len_b))
            for i in range(spec.repeats)]


def run_bench(spec: BenchSpec, reps: int = REPS) -> BenchRecord:
    """Time ``spec``: one untimed warm-up pass, then ``reps`` timed loops.

    Operands for every iteration are generated before the clock starts.
    Reports the median loop; the checksum must agree across loops.
    """
    fn = _kernel(spec)
    ops = operands(spec)
    clock, cpu_clock = time.perf_counter, time.process_time
    with thread_cap(spec.threads):
        for a, b in ops[:1]:
            fn(a, b)
        walls, cpus, sums = [], [], set()
        for _ in range(reps):
            acc = 0
            c0, t0 = cpu_clock(), clock()
            for a, b in ops:
                for limbs in fn(a, b):
                    acc = checksum_fold(acc, limbs)
            walls.append(clock() - t0)
            cpus.append(cpu_clock() - c0)
            sums.add(acc)
    if len(sums) != 1:
        raise RuntimeError(f"non-deterministic checksum for {spec}")
    elapsed = statistics.median(walls)
    return BenchRecord(spec, elapsed, elapsed / spec.repeats, sums.pop(),
                       statistics.median(cpus), samples=walls)


# -- tables -------------------------------------------------------------------

@dataclass
class Table:
    title: str
    columns: list[str]
    rows: list[list] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([_cell(x) for x in row])
        return buf.getvalue()

    def to_text(self) -> str:
        cells = [self.columns] + [[_cell(x) for x in row] for row in self.rows]
        widths = [max(len(r[i]) for r in cells) for i in range(len(self.columns))]
        lines = [self.title, ""]
        for n, r in enumerate(cells):
            lines.append("  ".join(c.rjust(w) for c, w in zip(r, widths)))
            if n == 0:
                lines.append("  ".join("-" * w for w in widths))
        return "\n".join(lines) + "\n"

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]


def _cell(x) -> str:
    if isinstance(x, float):
        return f"{x:.6g}"
    if isinstance(x, int) and not isinstance(x, bool) and x > 1 << 32:
        return f"{x:016x}"
    return str(x)


def _run(op: str, la: int, lb: int, repeats: int, seed: int, threads: int) -> BenchRecord:
    return run_bench(BenchSpec(op, la, lb, repeats, seed, threads))


def table_mul_equal_lengths(lengths: Sequence[int], repeats: int, seed: int,
                            threads: int = mulengine.DEFAULT_THREADS) -> Table:
    """Our multiplication against the classical reference, N x N limbs."""
    t = Table("Multiplication of two integers of the same length (limbs)",
              ["N", "ours_s", "ref_s", "ref/ours", "checksum", "agree"])
    for n in lengths:
        ours = _run("mul", n, n, repeats, seed, threads)
        ref = _run("mul-classical", n, n, repeats, seed, threads)
        t.rows.append([n, ours.per_op, ref.per_op, ref.per_op / ours.per_op,
                       ours.checksum, ours.checksum == ref.checksum])
    return t


def table_half_product(lengths: Sequence[int], repeats: int, seed: int,
                       threads: int = mulengine.DEFAULT_THREADS) -> Table:
    """Low half of an N x N product: classical slice, full Karatsuba then
    discard, and the Mulders slice."""
    t = Table("Lower half of the product of two N-limb values",
              ["N", "class_s", "kara_s", "fast_s", "kara/class", "fast/class",
               "fast/kara", "checksum", "agree"])
    for n in lengths:
        cl = _run("slice-low-classical", n, n, repeats, seed, threads)
        ka = _run("mul-low", n, n, repeats, seed, threads)
        fa = _run("slice-low", n, n, repeats, seed, threads)
        t.rows.append([n, cl.per_op, ka.per_op, fa.per_op, ka.per_op / cl.per_op,
                       fa.per_op / cl.per_op, fa.per_op / ka.per_op, fa.checksum,
                       fa.checksum == ka.checksum == cl.checksum])
    return t


def table_div_shapes(u_len: int, v_lens: Sequence[int], repeats: int, seed: int,
                     threads: int = mulengine.DEFAULT_THREADS) -> Table:
    """Division of a ``u_len``-limb value by divisors of several lengths,
    each time scaled by the cost of multiplying V by Q."""
    t = Table(f"Scaled multiplication and division, u = {u_len} limbs",
              ["v", "q", "mul_vq_s", "classical_mul", "classical_div",
               "fast_div_rem", "fast_quot_only", "agree"])
    for v in v_lens:
        if not 1 <= v <= u_len:
            raise ValueError(f"divisor length {v} outside 1..{u_len}")
        q = u_len - v + 1
        base = _run("mul", v, q, repeats, seed, threads)
        cm = _run("mul-classical", v, q, repeats, seed, threads)
        cd = _run("div-classical", u_len, v, repeats, seed, threads)
        fd = _run("div-fast", u_len, v, repeats, seed, threads)
        fq = _run("div-quotient-only", u_len, v, repeats, seed, threads)
        s = base.per_op
        t.rows.append([v, q, s, cm.per_op / s, cd.per_op / s, fd.per_op / s,
                       fq.per_op / s, cd.checksum == fd.checksum and base.checksum == cm.checksum])
    return t


def table_div_2n_n(sizes: Sequence[int], repeats: int, seed: int,
                   threads: int = mulengine.DEFAULT_THREADS) -> Table:
    """2N-by-N division; division times are given as multiples of an N x N
    multiplication."""
    t = Table("2N x N multiplication and division",
              ["N", "mul_s", "classical_div", "fast_div", "div_no_rem", "agree"])
    for n in sizes:
        m = _run("mul", n, n, repeats, seed, threads)
        cd = _run("div-classical", 2 * n, n, repeats, seed, threads)
        fd = _run("div-fast", 2 * n, n, repeats, seed, threads)
        fq = _run("div-quotient-only", 2 * n, n, repeats, seed, threads)
        s = m.per_op
        t.rows.append([n, s, cd.per_op / s, fd.per_op / s, fq.per_op / s,
                       cd.checksum == fd.checksum])
    return t


def table_shinv(sizes: Sequence[int], repeats: int, seed: int,
                threads: int = mulengine.DEFAULT_THREADS) -> Table:
    """Shifted inverse of an N-limb value at N limbs, against an N x N product."""
    t = Table("Shifted inverse against multiplication",
              ["N", "mul_s", "shinv_s", "shinv/mul", "checksum"])
    for n in sizes:
        m = _run("mul", n, n, repeats, seed, threads)
        s = _run("shinv", n, n, repeats, seed, threads)
        t.rows.append([n, m.per_op, s.per_op, s.per_op / m.per_op, s.checksum])
    return t


# -- tuner --------------------------------------------------------------------

@dataclass(frozen=True)
class TunePlan:
    """Candidate grids and probe sizes; every choice is a measured median."""
    karatsuba: tuple[int, ...] = (8, 12, 16, 20, 24, 32, 40, 48, 64)
    karatsuba_probe: tuple[int, ...] = (100, 300)
    mulders: tuple[int, ...] = (8, 12, 16, 20, 28, 40, 56)
    beta: tuple[float, ...] = (0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9)
    mulders_probe: tuple[int, ...] = (100, 200)
    parallel: tuple[int, ...] = (200, 400, 800, 1600)
    fast_probe: tuple[int, ...] = (16, 32, 64, 128, 256)
    block_n: int = 64
    block_ratios: tuple[float, ...] = (1.25, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0)
    repeats: int = 3
    rounds: int = 5
    # independent estimates per threshold; the median is kept
    passes: int = 5

    @classmethod
    def quick(cls) -> TunePlan:
        return cls(karatsuba=(12, 16, 24, 32, 48), karatsuba_probe=(120,),
                   mulders=(10, 20, 40), beta=(0.55, 0.7, 0.85), mulders_probe=(80,),
                   parallel=(200, 400), fast_probe=(16, 48, 128), block_n=32,
                   block_ratios=(1.25, 2.0, 4.0), repeats=2, rounds=3, passes=1)


# Snap grid: neighbours differ by 2**(1/4) ~ 19%, inside the 20% drift budget.
_GRID = 2 ** 0.25


def _snap(x: float) -> float:
    return _GRID ** round(math.log(x, _GRID))


def soft_argmin(candidates: Sequence[float], costs: Sequence[float], tau: float = 0.1) -> float:
    """Geometric mean of the candidates weighted by ``exp(-log(cost/best)/tau)``.

    Near-ties share the weight, so a flat valley yields its centre rather
    than whichever candidate happened to win the noise.
    """
    best = min(costs)
    ws = [math.exp(-math.log(c / best) / tau) for c in costs]
    return math.exp(sum(w * math.log(x) for w, x in zip(ws, candidates)) / sum(ws))


def _argmin(fns: dict, candidates: Sequence[float], plan: TunePlan) -> float:
    costs = _measure(fns, plan)
    return soft_argmin(candidates, [costs[c] for c in candidates])


def _crossover(xs: Sequence[float], ratios: Sequence[float]) -> float | None:
    """x where the log-log least-squares line through (x, ratio) crosses 1."""
    lx = [math.log(x) for x in xs]
    ly = [math.log(r) for r in ratios]
    slope, icpt = statistics.linear_regression(lx, ly)
    if slope >= 0:
        return None
    return math.exp(-icpt / slope)


def _measure(fns: dict, plan: TunePlan) -> dict:
    """Interleaved median per-call time of each zero-argument callable."""
    samples: dict = {k: [] for k in fns}
    for f in fns.values():
        f()
    for _ in range(plan.rounds):
        for key, f in fns.items():
            t0 = time.perf_counter()
            for _ in range(plan.repeats):
                f()
            samples[key].append((time.perf_counter() - t0) / plan.repeats)
    return {k: statistics.median(v) for k, v in samples.items()}


def _paired_ratio(f, g, plan: TunePlan) -> float:
    """Median over rounds of time(f)/time(g), each round timing both back to back."""
    f()
    g()
    rs = []
    for _ in range(plan.rounds):
        t0 = time.perf_counter()
        for _ in range(plan.repeats):
            f()
        t1 = time.perf_counter()
        for _ in range(plan.repeats):
            g()
        t2 = time.perf_counter()
        rs.append((t1 - t0) / (t2 - t1))
    return statistics.median(rs)


def _median_estimate(estimate: Callable[[], float], plan: TunePlan) -> float:
    """Median of independent runs of ``estimate``.

    On a flat cost curve one burst of noise can drag a single estimate far
    across the valley; the median of several passes ignores it.
    """
    return statistics.median(estimate() for _ in range(plan.passes))


def _clamped_crossover(xs: Sequence[float], ratios: Sequence[float]) -> float:
    """Crossover of the fitted line, held inside the probed range."""
    if all(r < 1 for r in ratios):
        return xs[0]
    if all(r >= 1 for r in ratios):
        return xs[-1]
    x = _crossover(xs, ratios)
    if x is None:
        return xs[-1]
    return min(xs[-1], max(xs[0], x))


def tune(plan: TunePlan | None = None, seed: int = 1,
         log: Callable[[str], None] | None = None) -> tuning.Tuning:
    """Measure every threshold in turn and return the tuned configuration.

    Order matters: multiplication first, since slices and divisions are
    built on it and are tuned with the new multiplication thresholds.
    """
    from .mulengine import MulThresholds
    from .sliceprod import MuldersConfig

    plan = plan or TunePlan()
    say = log or (lambda _msg: None)
    base = tuning.Tuning()

    # karatsuba_cutoff: summed time over the probe sizes
    ops = [(gen_operand(seed, 0, n), gen_operand(seed, 1, n)) for n in plan.karatsuba_probe]
    fns = {}
    for c in plan.karatsuba:
        t = MulThresholds(c, max(c, 1 << 30))
        fns[c] = lambda t=t: [mulengine.mul(a, b, t, threads=1) for a, b in ops]
    kc = _median_estimate(lambda: _argmin(fns, plan.karatsuba, plan), plan)
    kc = max(2, round(_snap(kc)))
    say(f"karatsuba_cutoff = {kc}")
    mt = MulThresholds(kc, max(kc, base.mul.parallel_cutoff))

    # parallel_cutoff: smallest size from which the concurrent top level
    # wins by 5% at every larger candidate too
    wins = []
    for n in plan.parallel:
        a, b = gen_operand(seed, 2, n), gen_operand(seed, 3, n)
        t = MulThresholds(kc, max(kc, n))
        r = _paired_ratio(lambda: mulengine.mul(a, b, t, threads=3),
                          lambda: mulengine.mul(a, b, t, threads=1), plan)
        wins.append(r < 0.95)
    pc = plan.parallel[-1]
    for i, n in enumerate(plan.parallel):
        if all(wins[i:]):
            pc = n
            break
    pc = max(pc, kc)
    mt = MulThresholds(kc, pc)
    say(f"parallel_cutoff = {pc}")

    # beta and mulders_cutoff: low-half slices at the probe sizes
    ops = [(gen_operand(seed, 4, n), gen_operand(seed, 5, n), SliceRequest(0, n, 0))
           for n in plan.mulders_probe]
    fns = {}
    for beta in plan.beta:
        cfg = MuldersConfig(beta, base.mulders.mulders_cutoff)
        fns[beta] = lambda cfg=cfg: [slice_mulders(a, b, r, cfg, t=mt) for a, b, r in ops]
    beta = _median_estimate(lambda: _argmin(fns, plan.beta, plan), plan)
    beta = round(min(0.95, max(0.5, beta)), 2)
    fns = {}
    for mc in plan.mulders:
        cfg = MuldersConfig(beta, mc)
        fns[mc] = lambda cfg=cfg: [slice_mulders(a, b, r, cfg, t=mt) for a, b, r in ops]
    mc = _median_estimate(lambda: _argmin(fns, plan.mulders, plan), plan)
    mc = max(2, round(_snap(mc)))
    say(f"beta = {beta}, mulders_cutoff = {mc}")
    cur = tuning.Tuning(mt, MuldersConfig(beta, mc), base.div)

    with tuning.using(cur):
        # fast_cutoff: where fast 2N/N division overtakes classical
        pairs = [(gen_operand(seed, 6, 2 * n), gen_operand(seed, 7, n)) for n in plan.fast_probe]
        ratios: list[float] = []

        def fast_crossover() -> float:
            ratios[:] = [_paired_ratio(lambda: divide_fast(u, v, True),
                                       lambda: divide_classical(u, v), plan) for u, v in pairs]
            return _clamped_crossover(plan.fast_probe, ratios)

        fc = max(2, round(_snap(_median_estimate(fast_crossover, plan))))
        say(f"fast_cutoff = {fc}  (fast/classical {', '.join(f'{r:.2f}' for r in ratios)})")

        # block_ratio: where block short division overtakes one big fast division
        n = plan.block_n
        v = gen_operand(seed, 8, n)
        ratios = []
        for q in plan.block_ratios:
            u = gen_operand(seed, 9, n + int(q * n))
            ratios.append(_paired_ratio(lambda: divide_block_short(u, v),
                                        lambda: divide_fast(u, v, True), plan))
        br = round(max(1.1, _snap(_clamped_crossover(plan.block_ratios, ratios))), 3)
        say(f"block_ratio = {br}  (block/fast {', '.join(f'{r:.2f}' for r in ratios)})")

    return cur.with_values(fast_cutoff=fc, block_ratio=br)


def drift(a: tuning.Tuning, b: tuning.Tuning) -> dict[str, float]:
    """Relative difference per threshold, ``|a - b| / max(a, b)``."""
    va, vb = a.values(), b.values()
    return {k: abs(va[k] - vb[k]) / max(va[k], vb[k]) for k in va}


__all__ = [
    "MULT", "OPERATIONS", "gen_operand", "checksum_fold", "BenchSpec", "BenchRecord",
    "run_bench", "Table", "table_mul_equal_lengths", "table_half_product",
    "table_div_shapes", "table_div_2n_n", "table_shinv", "TunePlan", "tune",
    "soft_argmin", "drift",
]
