"""Exact coverage bookkeeping for certified congruence classes.

The set of integers covered so far is kept as a union of pairwise
disjoint residue classes, so its natural density is simply the sum of
1/modulus over the stored classes, as an exact rational.  This sidesteps
materializing residues modulo the running LCM, which quickly becomes
astronomically large, while staying exact.

A residue class here uses value semantics: the pattern b*k - c covers the
integers congruent to -c (mod b).
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import TYPE_CHECKING, Iterable, NamedTuple

if TYPE_CHECKING:
    from .search import PatternClass


class ResidueClass(NamedTuple):
    """Integers congruent to residue (mod modulus), 0 <= residue < modulus."""

    modulus: int
    residue: int


def residue_class(modulus: int, residue: int) -> ResidueClass:
    if modulus < 1:
        raise ValueError(f"modulus must be >= 1, got {modulus}")
    return ResidueClass(modulus, residue % modulus)


def from_pattern(pattern: "PatternClass") -> ResidueClass:
    """Residue class of the values of the pattern b*k - c."""
    return residue_class(pattern.modulus, -pattern.remainder)


def _smallest_prime_factor(n: int) -> int:
    if n % 2 == 0:
        return 2
    if n % 3 == 0:
        return 3
    f = 5
    while f * f <= n:
        if n % f == 0:
            return f
        f += 2
    return n


class CoverageLedger:
    """Disjoint union of residue classes with an exact running density.

    Adding a class only ever grows the covered set by the members not
    already covered: the incoming class is recursively refined against
    the stored classes until each fragment is either contained in one of
    them (contributing nothing) or disjoint from all (stored as is).
    """

    def __init__(self) -> None:
        self._by_modulus: dict[int, set[int]] = {}
        self._density = Fraction(0)
        self._added_moduli_lcm = 1

    def __len__(self) -> int:
        return sum(len(s) for s in self._by_modulus.values())

    def stored_classes(self) -> tuple[ResidueClass, ...]:
        out = [
            ResidueClass(m, r)
            for m, residues in self._by_modulus.items()
            for r in residues
        ]
        out.sort()
        return tuple(out)

    def density(self) -> Fraction:
        return self._density

    def recomputed_density(self) -> Fraction:
        # Independent of the running sum; used as a self-check in tests.
        return sum(
            (Fraction(len(rs), m) for m, rs in self._by_modulus.items()),
            Fraction(0),
        )

    def lcm_of_moduli(self) -> int:
        """LCM of the stored (refined) moduli; 1 for an empty ledger."""
        return math.lcm(*self._by_modulus.keys()) if self._by_modulus else 1

    def lcm_of_added_moduli(self) -> int:
        """LCM of the moduli of every class ever passed to add_class."""
        return self._added_moduli_lcm

    # r is contained in a stored class iff some stored modulus divides
    # r.modulus with matching residue; it overlaps a stored class mod m'
    # iff the residues agree mod gcd.  For m' dividing m those two cases
    # coincide, so genuine overlap forces a split by a prime of m'/gcd.
    def _probe(self, r: ResidueClass) -> tuple[str, int]:
        m, rho = r
        split_prime = 0
        for m2, residues in self._by_modulus.items():
            g = math.gcd(m, m2)
            if m2 == g:  # m2 divides m: containment or disjoint
                if rho % m2 in residues:
                    return "inside", 0
                continue
            rho_g = rho % g
            if any(r2 % g == rho_g for r2 in residues):
                p = _smallest_prime_factor(m2 // g)
                if split_prime == 0 or p < split_prime:
                    split_prime = p
        if split_prime:
            return "split", split_prime
        return "disjoint", 0

    def _add(self, r: ResidueClass) -> Fraction:
        outcome, p = self._probe(r)
        if outcome == "inside":
            return Fraction(0)
        if outcome == "disjoint":
            self._by_modulus.setdefault(r.modulus, set()).add(r.residue)
            return Fraction(1, r.modulus)
        m, rho = r
        return sum(
            (self._add(ResidueClass(m * p, rho + j * m)) for j in range(p)),
            Fraction(0),
        )

    def add_class(self, r: ResidueClass) -> Fraction:
        """Cover the members of r; returns the exact density gain."""
        r = residue_class(*r)
        self._added_moduli_lcm = math.lcm(self._added_moduli_lcm, r.modulus)
        gain = self._add(r)
        self._density += gain
        return gain

    def covers(self, r: ResidueClass) -> bool:
        """True iff every member of r is already covered (read-only)."""
        r = residue_class(*r)
        outcome, p = self._probe(r)
        if outcome == "inside":
            return True
        if outcome == "disjoint":
            return False
        m, rho = r
        return all(self.covers(ResidueClass(m * p, rho + j * m)) for j in range(p))

    @classmethod
    def from_classes(cls, classes: Iterable[ResidueClass]) -> "CoverageLedger":
        ledger = cls()
        for r in classes:
            ledger.add_class(r)
        return ledger


def brute_force_density(classes: Iterable[ResidueClass], L: int) -> Fraction:
    """Density by marking residues 0..L-1 directly; desk-scale oracle only.

    L must be a common multiple of all the moduli and at most 10**7.
    """
    if not 1 <= L <= 10**7:
        raise ValueError(f"L must be in 1..10**7, got {L}")
    covered = bytearray(L)
    for m, r in classes:
        if L % m:
            raise ValueError(f"L={L} is not a multiple of modulus {m}")
        r %= m
        covered[r::m] = b"\x01" * len(range(r, L, m))
    return Fraction(sum(covered), L)


def format_percent(value: Fraction, decimals: int = 5) -> str:
    """Exact half-up rounding of a fraction of 1 to a percent string."""
    scale = 10**decimals
    num = value.numerator * 100 * scale
    q, rem = divmod(num, value.denominator)
    if 2 * rem >= value.denominator:
        q += 1
    whole, frac_part = divmod(q, scale)
    return f"{whole}.{frac_part:0{decimals}d}%"


def rounded_percent(value: Fraction, decimals: int = 5) -> Fraction:
    """The percent value after exact half-up rounding to `decimals` places."""
    scale = 10**decimals
    num = value.numerator * 100 * scale
    q, rem = divmod(num, value.denominator)
    if 2 * rem >= value.denominator:
        q += 1
    return Fraction(q, scale)


class DeltaReport(NamedTuple):
    """Density gains at power-of-two moduli and in the gaps between them.

    power_rows: (t, gain) where gain is the density change contributed by
    modulus 2**t itself.
    between_rows: (t, gain) where gain is the total change contributed by
    the moduli strictly between 2**t and 2**(t+1).
    """

    power_rows: tuple[tuple[int, Fraction], ...]
    between_rows: tuple[tuple[int, Fraction], ...]


def delta_report(checkpoints: Iterable[tuple[int, Fraction]]) -> DeltaReport:
    """Build both progress tables from per-modulus density checkpoints.

    Checkpoints must be (modulus, density) in ascending modulus order, one
    per processed modulus, densities non-decreasing.
    """
    points = list(checkpoints)
    if not points:
        return DeltaReport((), ())
    moduli = [m for m, _ in points]
    if any(b <= a for a, b in zip(moduli, moduli[1:])):
        raise ValueError("checkpoints must have strictly increasing moduli")

    density_at = dict(points)
    frontier = moduli[-1]

    power_rows = []
    prev = Fraction(0)
    for m, d in points:
        if m & (m - 1) == 0:  # power of two
            power_rows.append((m.bit_length() - 1, d - prev))
        prev = d

    # Gain strictly between 2^t and 2^(t+1): density at the last modulus
    # below 2^(t+1) minus density at 2^t.  Only complete gaps are reported;
    # t starts at 2 because (2, 4) holds no even modulus at all.
    between_rows = []
    t = 2
    while 2 ** (t + 1) - 2 <= frontier:
        lo = 2**t
        if lo in density_at:
            below_next = [d for m, d in points if lo < m < 2 ** (t + 1)]
            gain = (below_next[-1] if below_next else density_at[lo]) - density_at[lo]
            between_rows.append((t, gain))
        t += 1
    return DeltaReport(tuple(power_rows), tuple(between_rows))
