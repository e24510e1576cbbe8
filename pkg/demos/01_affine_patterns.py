"""
Symbolic Collatz steps on whole congruence classes
==================================================

A congruence class of starting numbers can be written as an affine
pattern b*k - c.  As long as the leading coefficient stays even, every
member of the class has the same parity, so one Collatz step applies to
all of them at once.
"""

from collatz_sieve import AffineForm, build_trajectory, evaluate, parity, step

# The class of numbers 4k-3 (that is 1, 5, 9, 13, ...).  Its members are
# odd, so the first step is n -> 3n+1 for every one of them:
form = AffineForm(4, -3)
print(f"pattern 4k-3 is {parity(form).value}; one step gives {step(form)}")

# Iterating until the coefficient turns odd gives the maximal symbolic
# trajectory.  The final element 3k-2 is pointwise below the anchor from
# k=2 on, and the single k=1 member is the number 1 itself: every member
# of this class provably reaches a smaller number.
for i, element in enumerate(build_trajectory(form), start=1):
    print(f"  element {i}: {element.coeff}k{element.offset:+d}"
          f"  (k=1 -> {evaluate(element, 1)}, k=2 -> {evaluate(element, 2)})")

# Two different classes can funnel into the same pattern.  The trajectory
# of 128k-33 reaches 486k-122 at element 12, and the trajectory of 96k-25
# reaches the same form at element 9: from that point on the two classes
# share everything.
left = build_trajectory(AffineForm(128, -33))
right = build_trajectory(AffineForm(96, -25))
print("\n128k-33 and 96k-25, side by side:")
for i in range(max(len(left), len(right))):
    l = f"{left[i].coeff}k{left[i].offset:+d}" if i < len(left) else ""
    r = f"{right[i].coeff}k{right[i].offset:+d}" if i < len(right) else ""
    print(f"  {i+1:2d}  {l:<12} {r:<12}")
meet = left.index(AffineForm(486, -122)) + 1, right.index(AffineForm(486, -122)) + 1
print(f"element {meet[0]} of the first equals element {meet[1]} of the second: "
      f"486k-122")
