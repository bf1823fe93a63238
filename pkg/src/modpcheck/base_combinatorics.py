"""Cyclic-index subset and integer-vector calculus.

Everything downstream indexes data by j in Z/fZ.  Subsets of the index set
are bitmasks (bit j = membership of j), integer vectors are plain tuples.
All shifts are cyclic; the f=1 degeneracies (J-1 = J, boundary of the full
singleton is empty) fall out of the mod-f arithmetic with no special-casing.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

MAX_F = 16


@dataclass(frozen=True)
class SubsetJ:
    """Subset of Z/fZ as a bitmask."""

    f: int
    bits: int

    def __post_init__(self):
        if not 1 <= self.f <= MAX_F:
            raise ValueError(f"f={self.f} outside [1, {MAX_F}]")
        if not 0 <= self.bits < (1 << self.f):
            raise ValueError("bits out of range for f")

    @classmethod
    def of(cls, f, members=()):
        bits = 0
        for j in members:
            bits |= 1 << (j % f)
        return cls(f, bits)

    @classmethod
    def full(cls, f):
        return cls(f, (1 << f) - 1)

    def members(self):
        return tuple(j for j in range(self.f) if self.bits >> j & 1)

    def __contains__(self, j):
        return bool(self.bits >> (j % self.f) & 1)

    def __len__(self):
        return self.bits.bit_count()

    def __iter__(self):
        return iter(self.members())

    def __bool__(self):
        return self.bits != 0

    # set algebra; operands must share f
    def __and__(self, other):
        return SubsetJ(self.f, self.bits & other.bits)

    def __or__(self, other):
        return SubsetJ(self.f, self.bits | other.bits)

    def __sub__(self, other):
        return SubsetJ(self.f, self.bits & ~other.bits)

    def __xor__(self, other):
        return SubsetJ(self.f, self.bits ^ other.bits)

    def __le__(self, other):
        return self.bits & ~other.bits == 0

    def __lt__(self, other):
        return self <= other and self.bits != other.bits

    def complement(self):
        return SubsetJ(self.f, ~self.bits & ((1 << self.f) - 1))

    def shift(self, k):
        """J + k = {j + k mod f : j in J}."""
        f = self.f
        k %= f
        if k == 0:
            return self
        m = (1 << f) - 1
        return SubsetJ(f, ((self.bits << k) | (self.bits >> (f - k))) & m)

    def is_full(self):
        return self.bits == (1 << self.f) - 1

    def __repr__(self):
        return "{" + ",".join(str(j) for j in self.members()) + "}"


def shift_subset(J: SubsetJ, k: int) -> SubsetJ:
    return J.shift(k)


def all_subsets(f):
    """All 2^f subsets, in mask order."""
    for bits in range(1 << f):
        yield SubsetJ(f, bits)


def decompose_parts(J: SubsetJ, Jrho: SubsetJ):
    """Split J relative to Jrho into (J^ss, J^nss, J^sh).

    J^ss = J & Jrho, J^nss = J \\ Jrho, and J^sh = J & (J-1) & Jrho, the
    members of J^ss whose successor also lies in J.  J^sh is a subset of
    J^ss by construction.
    """
    Jss = J & Jrho
    Jnss = J - Jrho
    Jsh = J & J.shift(-1) & Jrho
    return Jss, Jnss, Jsh


def right_boundary(J: SubsetJ) -> SubsetJ:
    """dJ = {j in J : j+1 not in J}; empty for the full set and empty set."""
    return J - J.shift(-1)


def symmetric_difference(J: SubsetJ, Jp: SubsetJ) -> SubsetJ:
    return J ^ Jp


@dataclass(frozen=True)
class IntVec:
    """Integer vector indexed by Z/fZ."""

    f: int
    entries: tuple

    def __post_init__(self):
        if len(self.entries) != self.f:
            raise ValueError("entry count != f")

    @classmethod
    def of(cls, entries):
        t = tuple(int(x) for x in entries)
        return cls(len(t), t)

    @classmethod
    def zero(cls, f):
        return cls(f, (0,) * f)

    @classmethod
    def const(cls, f, c):
        return cls(f, (int(c),) * f)

    @classmethod
    def unit(cls, f, j):
        return cls(f, tuple(1 if i == j % f else 0 for i in range(f)))

    def __getitem__(self, j):
        return self.entries[j % self.f]

    def __iter__(self):
        return iter(self.entries)

    def __add__(self, other):
        return IntVec(self.f, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other):
        return IntVec(self.f, tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self):
        return IntVec(self.f, tuple(-a for a in self.entries))

    def __rmul__(self, c):
        return IntVec(self.f, tuple(c * a for a in self.entries))

    def leq(self, other):
        """Componentwise <=."""
        return all(a <= b for a, b in zip(self.entries, other.entries))

    def geq(self, other):
        return all(a >= b for a, b in zip(self.entries, other.entries))

    def __repr__(self):
        return "(" + ",".join(str(a) for a in self.entries) + ")"


def indicator(J: SubsetJ) -> IntVec:
    """e^J: 1 on J, 0 elsewhere."""
    return IntVec(J.f, tuple(1 if j in J else 0 for j in range(J.f)))


def vec_shift(i: IntVec) -> IntVec:
    """delta(i)_j = i_{j+1} (left rotation); delta^f = identity."""
    f = i.f
    return IntVec(f, tuple(i.entries[(j + 1) % f] for j in range(f)))


def vec_norm(i: IntVec) -> int:
    """|i| = sum of entries."""
    return sum(i.entries)


@lru_cache(maxsize=None)
def _cyclic_run_count(f, bits):
    # number of maximal cyclic runs of consecutive members
    if bits == 0 or bits == (1 << f) - 1:
        return 0 if bits == 0 else 1
    runs = 0
    for j in range(f):
        if bits >> j & 1 and not bits >> ((j + 1) % f) & 1:
            runs += 1
    return runs


def cyclic_run_count(J: SubsetJ) -> int:
    """Number of maximal cyclic runs of J (the full set counts as one run)."""
    return _cyclic_run_count(J.f, J.bits)
