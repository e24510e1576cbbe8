import pytest
from hypothesis import given, settings, strategies as st

from collatz_sieve import (
    AffineForm,
    IndeterminateParityError,
    Parity,
    build_trajectory,
    collatz_step,
    evaluate,
    parity,
    step,
    strictly_below,
    v2,
)


def test_evaluate_examples():
    assert evaluate(AffineForm(4, -3), 1) == 1
    assert evaluate(AffineForm(6, -1), 2) == 11
    assert evaluate(AffineForm(96, -25), 1) == 71


def test_evaluate_rejects_bad_k():
    with pytest.raises(ValueError):
        evaluate(AffineForm(4, -3), 0)


def test_parity_examples():
    assert parity(AffineForm(6, -4)) is Parity.EVEN
    assert parity(AffineForm(4, -3)) is Parity.ODD
    assert parity(AffineForm(3, -2)) is Parity.INDETERMINATE


def test_step_examples():
    assert step(AffineForm(4, -1)) == AffineForm(12, -2)
    assert step(AffineForm(12, -2)) == AffineForm(6, -1)
    assert step(AffineForm(128, -33)) == AffineForm(384, -98)


def test_step_rejects_indeterminate():
    with pytest.raises(IndeterminateParityError):
        step(AffineForm(3, -2))


def test_trajectory_of_4k_minus_3():
    assert build_trajectory(AffineForm(4, -3)) == (
        AffineForm(4, -3), AffineForm(12, -8), AffineForm(6, -4), AffineForm(3, -2),
    )


def test_trajectory_of_odd_numbers_pattern():
    # 2k+1 -> 6k+4 -> 3k+2, after which parity depends on k
    assert build_trajectory(AffineForm(2, 1)) == (
        AffineForm(2, 1), AffineForm(6, 4), AffineForm(3, 2),
    )


def test_trajectory_of_16k_minus_5():
    # The first six elements are the interesting ones (16k-5 reappears as
    # 18k-5 at element 6); stepping only stops at the odd coefficient 27.
    elements = build_trajectory(AffineForm(16, -5))
    assert elements[:6] == (
        AffineForm(16, -5), AffineForm(48, -14), AffineForm(24, -7),
        AffineForm(72, -20), AffineForm(36, -10), AffineForm(18, -5),
    )
    assert elements[5] == AffineForm(18, -5)
    assert elements[-1] == AffineForm(27, -7)
    assert len(elements) == 8  # 1 + 3 odd steps + v2(16)


def test_trajectory_rejects_odd_coefficient():
    with pytest.raises(ValueError):
        build_trajectory(AffineForm(3, -2))


def test_strictly_below_examples():
    assert strictly_below(AffineForm(3, -2), AffineForm(4, -3), 2)
    assert not strictly_below(AffineForm(3, -2), AffineForm(4, -3), 1)  # equal at k=1
    assert not strictly_below(AffineForm(4, -1), AffineForm(4, -3), 1)


# --- the two-column merge table: 128k-33 and 96k-25 meet at 486k-122 ---

TABLE_128 = [
    (128, -33), (384, -98), (192, -49), (576, -146), (288, -73), (864, -218),
    (432, -109), (1296, -326), (648, -163), (1944, -488), (972, -244), (486, -122),
]
TABLE_96 = [
    (96, -25), (288, -74), (144, -37), (432, -110), (216, -55), (648, -164),
    (324, -82), (162, -41), (486, -122),
]


def test_merge_table_128k33_96k25():
    left = build_trajectory(AffineForm(128, -33))
    right = build_trajectory(AffineForm(96, -25))
    assert [tuple(f) for f in left[:12]] == TABLE_128
    assert [tuple(f) for f in right[:9]] == TABLE_96
    assert left[11] == right[8] == AffineForm(486, -122)


# ----------------------------- properties -----------------------------

def steppable_forms():
    # even coefficient so parity is determined; value(1) >= 1 keeps the
    # concrete Collatz comparison meaningful
    return st.integers(1, 4096).flatmap(
        lambda half: st.integers(1 - 2 * half, 1 << 16).map(
            lambda off: AffineForm(2 * half, off)
        )
    )


@given(steppable_forms(), st.integers(1, 1000))
def test_step_matches_concrete_collatz(f, k):
    assert evaluate(step(f), k) == collatz_step(evaluate(f, k))


@given(steppable_forms(), st.integers(1, 1000))
def test_parity_matches_concrete_value(f, k):
    value = evaluate(f, k)
    assert (value % 2 == 0) == (parity(f) is Parity.EVEN)


@settings(max_examples=300)
@given(steppable_forms())
def test_trajectory_length_law(anchor):
    elements = build_trajectory(anchor)
    odd_steps = sum(
        1 for e in elements[:-1] if parity(e) is Parity.ODD
    )
    t = v2(anchor.coeff)
    assert len(elements) == 1 + odd_steps + t
    assert odd_steps <= t
    final = elements[-1]
    assert final.coeff % 2 == 1
    assert final.coeff == (anchor.coeff >> t) * 3**odd_steps


@given(
    st.integers(1, 100), st.integers(-1000, 1000),
    st.integers(1, 100), st.integers(-1000, 1000),
    st.integers(1, 50),
)
def test_strictly_below_agrees_with_brute_force(fc, fo, gc, go, from_k):
    # with these ranges any crossing point lies inside the window
    f, g = AffineForm(fc, fo), AffineForm(gc, go)
    window = range(from_k, from_k + 10_000)
    brute = all(f.coeff * k + f.offset < g.coeff * k + g.offset for k in window)
    assert strictly_below(f, g, from_k) == brute
