import random
import threading

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracle16
from conftest import canonical, from16, o16, rand_nat
from bigslice.natural import (BASE, MASK, Natural, UnderflowError, Workspace,
                              WorkspaceExhausted, add, branch_free_select, compare,
                              from_decimal, leading_zero_bits, shift_left_bits,
                              shift_right_bits, sub, sub_signed, to_decimal)

naturals = st.lists(st.integers(0, MASK), max_size=8).map(Natural)


def N(*limbs):
    return Natural(limbs)


class TestConstruction:
    def test_zero_is_empty(self):
        assert Natural().limbs == ()
        assert Natural([0, 0]).limbs == ()
        assert not Natural()

    def test_trailing_zeros_trimmed(self):
        assert Natural([5, 0, 0]).limbs == (5,)

    @pytest.mark.parametrize("bad", [[-1], [BASE], [1, BASE + 3]])
    def test_limb_range_checked(self, bad):
        with pytest.raises(ValueError):
            Natural(bad)

    def test_int_round_trip(self, rng):
        for n in range(10):
            a = rand_nat(rng, n)
            assert Natural.from_int(int(a)) == a

    def test_from_int_negative(self):
        with pytest.raises(ValueError):
            Natural.from_int(-1)


class TestAdd:
    def test_zero_plus_zero(self):
        assert add(Natural(), Natural()) == Natural()

    def test_carry_into_new_limb(self):
        assert add(N(MASK), N(1)).limbs == (0, 1)

    def test_long_carry_chain(self):
        assert add(Natural([MASK] * 5), N(1)).limbs == (0, 0, 0, 0, 0, 1)

    def test_random_vs_oracle(self, rng):
        for _ in range(300):
            a, b = rand_nat(rng, rng.randrange(6)), rand_nat(rng, rng.randrange(6))
            assert o16(add(a, b)) == oracle16.add(o16(a), o16(b))


class TestSub:
    def test_minus_zero(self):
        a = N(3, 4)
        assert sub(a, Natural()) == a

    def test_borrow(self):
        assert sub(N(0, 1), N(1)).limbs == (MASK,)

    def test_result_trimmed(self):
        assert sub(N(5, 7), N(4, 7)).limbs == (1,)

    def test_underflow_is_error(self):
        with pytest.raises(UnderflowError):
            sub(N(1), N(2))
        with pytest.raises(UnderflowError):
            sub(N(MASK), N(0, 1))

    def test_random_vs_oracle(self, rng):
        for _ in range(300):
            a, b = rand_nat(rng, rng.randrange(6)), rand_nat(rng, rng.randrange(6))
            if a < b:
                a, b = b, a
            assert o16(sub(a, b)) == oracle16.sub(o16(a), o16(b))


class TestSubSigned:
    def test_negative(self):
        assert sub_signed(N(5), N(7)) == (N(2), True)

    def test_equal(self):
        assert sub_signed(N(7), N(7)) == (Natural(), False)

    def test_random_vs_oracle(self, rng):
        for _ in range(300):
            a, b = rand_nat(rng, rng.randrange(6)), rand_nat(rng, rng.randrange(6))
            mag, neg = sub_signed(a, b)
            x, y = o16(a), o16(b)
            want_neg = oracle16.cmp(x, y) < 0
            want = oracle16.sub(y, x) if want_neg else oracle16.sub(x, y)
            assert (o16(mag), neg) == (want, want_neg)


class TestCompare:
    def test_zeros_equal(self):
        assert compare(Natural(), Natural()) == 0

    def test_length_dominates(self):
        assert compare(N(0, 1), N(MASK)) > 0
        assert compare(N(MASK), N(0, 1)) < 0

    def test_random_vs_oracle(self, rng):
        for _ in range(300):
            n = rng.randrange(5)
            a, b = rand_nat(rng, n), rand_nat(rng, n + rng.choice((0, 0, 1)))
            if rng.random() < 0.2:
                b = a
            got = compare(a, b)
            assert (got > 0) - (got < 0) == oracle16.cmp(o16(a), o16(b))


class TestShifts:
    def test_by_zero(self):
        a = N(1, 2, 3)
        assert shift_left_bits(a, 0) == a
        assert shift_right_bits(a, 0) == a

    def test_whole_limb(self):
        assert shift_left_bits(N(1), 64).limbs == (0, 1)
        assert shift_right_bits(N(0, 1), 64).limbs == (1,)

    def test_right_past_end(self):
        assert shift_right_bits(N(5, 6), 200) == Natural()

    def test_zero_stays_zero(self):
        assert shift_left_bits(Natural(), 100) == Natural()

    def test_random_vs_oracle(self, rng):
        for _ in range(300):
            a = rand_nat(rng, rng.randrange(5))
            n = rng.randrange(300)
            assert o16(shift_left_bits(a, n)) == oracle16.shl(o16(a), n)
            assert o16(shift_right_bits(a, n)) == oracle16.shr(o16(a), n)


class TestLeadingZeroBits:
    def test_one(self):
        assert leading_zero_bits(N(1)) == 63

    def test_top_bit(self):
        assert leading_zero_bits(N(1 << 63)) == 0

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            leading_zero_bits(Natural())

    def test_random_vs_bit_loop(self, rng):
        for _ in range(500):
            a = rand_nat(rng, rng.randint(1, 4))
            a = Natural(a.limbs[:-1] + (a.limbs[-1] >> rng.randrange(64) or 1,))
            assert leading_zero_bits(a) == oracle16.leading_zero_bits(a.limbs)


def _branching(x, m):
    return 0 if x >= m + 1 else (x - m) % BASE


class TestBranchFreeSelect:
    def test_above_threshold(self):
        assert branch_free_select(5, 3) == 0

    def test_boundary(self):
        assert branch_free_select(3, 3) == 0

    def test_below_threshold_wraps(self):
        assert branch_free_select(2, 3) == MASK

    def test_exhaustive_small_domain(self):
        # every (x, M) pair of bytes: a 16-bit input space
        for x in range(256):
            for m in range(256):
                assert branch_free_select(x, m) == _branching(x, m), (x, m)

    def test_word_edges(self):
        edges = [0, 1, 2, 1 << 32, (1 << 63) - 1, 1 << 63, MASK - 1, MASK]
        for x in edges:
            for m in edges:
                if m + 1 <= MASK:
                    assert branch_free_select(x, m) == _branching(x, m)


class TestDecimal:
    def test_zero(self):
        assert from_decimal("0") == Natural()
        assert to_decimal(Natural()) == "0"

    def test_base(self):
        assert from_decimal("18446744073709551616").limbs == (0, 1)
        assert to_decimal(N(0, 1)) == "18446744073709551616"

    def test_leading_zeros_canonicalized(self):
        assert to_decimal(from_decimal("000123")) == "123"

    def test_random_200_digit_round_trip(self, rng):
        for _ in range(50):
            t = str(rng.randint(1, 9)) + "".join(rng.choice("0123456789") for _ in range(199))
            a = from_decimal(t)
            assert to_decimal(a) == t
            assert int(a) == int(t)

    @pytest.mark.parametrize("bad", ["", "12a", "-1", " 1", "1 ", "+5", "1_000", "١٢"])
    def test_malformed_rejected(self, bad):
        with pytest.raises(ValueError):
            from_decimal(bad)


class TestOracleAgreement:
    def test_ten_thousand_cases_up_to_8_limbs(self):
        rng = random.Random(2024)
        for i in range(10_000):
            a, b = rand_nat(rng, rng.randint(0, 8)), rand_nat(rng, rng.randint(0, 8))
            x, y = o16(a), o16(b)
            op = i % 6
            if op == 0:
                got, want = add(a, b), from16(oracle16.add(x, y))
            elif op == 1:
                if a < b:
                    a, b, x, y = b, a, y, x
                got, want = sub(a, b), from16(oracle16.sub(x, y))
            elif op == 2:
                got, neg = sub_signed(a, b)
                c = oracle16.cmp(x, y)
                want = from16(oracle16.sub(y, x) if c < 0 else oracle16.sub(x, y))
                assert neg == (c < 0)
            elif op == 3:
                c = compare(a, b)
                assert (c > 0) - (c < 0) == oracle16.cmp(x, y)
                continue
            elif op == 4:
                n = rng.randrange(600)
                got, want = shift_left_bits(a, n), from16(oracle16.shl(x, n))
            else:
                n = rng.randrange(600)
                got, want = shift_right_bits(a, n), from16(oracle16.shr(x, n))
            assert got == want, (i, a, b)
            assert canonical(got)


class TestProperties:
    @given(naturals, naturals)
    def test_add_sub_inverse(self, a, b):
        s = add(a, b)
        assert sub(s, b) == a
        assert canonical(s) and canonical(sub(s, b))

    @given(naturals, st.integers(0, 700))
    def test_shift_round_trip(self, a, n):
        assert shift_right_bits(shift_left_bits(a, n), n) == a

    @given(naturals, naturals)
    @settings(max_examples=200)
    def test_matches_python_ints(self, a, b):
        assert int(add(a, b)) == int(a) + int(b)
        mag, neg = sub_signed(a, b)
        assert (-1 if neg else 1) * int(mag) == int(a) - int(b)
        assert canonical(mag)


class TestWorkspace:
    def test_reuse_after_release(self):
        ws = Workspace()
        buf = ws.acquire(10)
        ws.release(buf)
        assert ws.acquire(10) is buf
        assert ws.allocations == 1

    def test_steady_state_stops_allocating(self):
        ws = Workspace()
        for _ in range(5):
            with ws.scratch(8) as a, ws.scratch(16) as b:
                a[:] = [1] * 8
                b[:] = [2] * 16
        assert ws.allocations == 2
        assert ws.in_use == 0
        assert ws.high_water == 24

    def test_capacity_enforced(self):
        ws = Workspace(capacity=10)
        ws.acquire(6)
        with pytest.raises(WorkspaceExhausted):
            ws.acquire(5)
        ws.reserve(5)
        ws.acquire(5)

    def test_poison_on_release(self):
        ws = Workspace(poison=True)
        buf = ws.acquire(3)
        assert buf == [Workspace.POISON] * 3
        buf[:] = [7, 8, 9]
        ws.release(buf)
        assert buf == [Workspace.POISON] * 3

    def test_concurrent_tasks_get_disjoint_buffers(self):
        ws = Workspace()
        seen, lock = [], threading.Lock()

        def task():
            for _ in range(200):
                with ws.scratch(4) as b:
                    with lock:
                        assert all(b is not x for x in seen)
                        seen.append(b)
                    with lock:
                        seen.remove(b)

        ts = [threading.Thread(target=task) for _ in range(3)]
        for t in ts:
            t.start()
        for t in ts:
            t.join()
        assert ws.in_use == 0
        assert ws.allocations <= 3
