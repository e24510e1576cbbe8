"""
Modified stopping times: how long until a sequence is "known"?
==============================================================

The classical stopping time asks when a trajectory first gets below its
start.  The modified stopping time asks something weaker and more useful
for the sieve: when does the trajectory first touch ANY value that
already occurred in the trajectory of a smaller starting number?  From
that element on, nothing new can happen.
"""

from collatz_sieve import (
    longest_modified_stop,
    modified_stopping_time,
    stopping_time,
    visited_values_through,
)

# 27 is the classic stubborn small number.  It needs 96 elements before
# touching a known value: element 96 is 46, which is the 2nd element of
# 15's trajectory.  Along the way it endures 58 halvings, which hints
# that a congruence class containing 27 would need a modulus with at
# least 58 factors of two.
rec = modified_stopping_time(27, visited_values_through(26))
print(f"27 joins the sequence of {rec.joined_start} at element "
      f"{rec.stop_index} (value {rec.join_value})")
print(f"   divisions by 2 before that: {rec.divisions_by_2} "
      f"(modulus hint: 2^{rec.divisions_by_2})")
print(f"   classical stopping time of 27 for comparison: {stopping_time(27)}")

# Record holders: the scan is incremental, so each n is matched against
# exactly the trajectories of 2..n-1.
for bound in (10_000, 100_000):
    n, best = longest_modified_stop(bound)
    print(f"\nslowest joiner below {bound:,}: {n} at element {best.stop_index}")
    print(f"   joins the sequence of {best.joined_start} "
          f"at value {best.join_value}")

# Values inside these trajectories overshoot 2^31 well before n reaches
# one million (803871 peaks at 2,571,957,520), which is why everything
# here runs on exact unbounded integers; fixed 32-bit arithmetic would
# silently corrupt the records above that scale.
n, best = longest_modified_stop(1_000_000)
print(f"\nslowest joiner below 1,000,000 (exact arithmetic): "
      f"{n} at element {best.stop_index}")
