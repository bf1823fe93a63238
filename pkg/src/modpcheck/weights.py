"""Weight parameters, translation in the weight graph, and weight families.

A parameter pack is (p, f, r, Jrho) with r inside the generic window
2f+1 <= r_j <= p-3-2f (plus r_0 >= 4 when f = 1).  Weights sigma_b are
indexed by integer vectors b with -r <= b <= p-2-r componentwise, the zero
vector corresponding to the base point of the graph.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .base_combinatorics import IntVec, SubsetJ, all_subsets, decompose_parts, indicator
from .errors import ConfigInvalid, GenericityViolation, InadmissibleS, RangeViolation


def _is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def validate_params(p, f, r, Jrho):
    """Raise unless (p, f, r, Jrho) is structurally sound and generic."""
    if not isinstance(f, int) or not 1 <= f <= 16:
        raise ConfigInvalid(f"f={f} outside [1, 16]")
    if not _is_prime(p):
        raise ConfigInvalid(f"p={p} is not prime")
    if len(tuple(r)) != f:
        raise ConfigInvalid("r must have f components")
    if Jrho.f != f:
        raise ConfigInvalid("Jrho indexed by a different f")
    if p < 4 * f + 4:
        raise GenericityViolation(None, f"p >= 4f+4 = {4 * f + 4}")
    for j, rj in enumerate(r):
        if not 2 * f + 1 <= rj <= p - 3 - 2 * f:
            raise GenericityViolation(j, f"2f+1 <= r_j <= p-3-2f = [{2 * f + 1}, {p - 3 - 2 * f}]")
    if f == 1 and r[0] < 4:
        raise GenericityViolation(0, "r_0 >= 4 when f = 1")


@dataclass(frozen=True)
class RhoParams:
    p: int
    f: int
    r: IntVec
    Jrho: SubsetJ

    def __post_init__(self):
        validate_params(self.p, self.f, tuple(self.r), self.Jrho)

    @classmethod
    def make(cls, p, f, r, jrho_members=()):
        return cls(p, f, IntVec.of(r), SubsetJ.of(f, jrho_members))

    @property
    def q(self):
        return self.p**self.f

    def subsets(self):
        return all_subsets(self.f)

    def parts(self, J):
        return decompose_parts(J, self.Jrho)

    def label(self):
        return f"p={self.p} f={self.f} r={tuple(self.r)} jrho={self.Jrho.members()}"


def sJ_tJ(params: RhoParams, J: SubsetJ):
    """The (s^J, t^J) case tables.

    Per index j the case is keyed by (j in J, j+1 in J) with the doubly-inside
    case split on j in Jrho.
    """
    p, f, r = params.p, params.f, params.r
    s = []
    t = []
    for j in range(f):
        inj = j in J
        innext = (j + 1) in J
        if not inj and not innext:
            s.append(r[j])
            t.append(0)
        elif inj and not innext:
            s.append(r[j] + 1)
            t.append(-1)
        elif not inj and innext:
            s.append(p - 2 - r[j])
            t.append(r[j] + 1)
        elif j in params.Jrho:
            s.append(p - 3 - r[j])
            t.append(r[j] + 1)
        else:
            s.append(p - 1 - r[j])
            t.append(r[j])
    return IntVec(f, tuple(s)), IntVec(f, tuple(t))


def aJ(params: RhoParams, J: SubsetJ) -> IntVec:
    """Graph position of the weight generated by J: +-1 on J (sign from the
    successor), shifted by 2 on the doubled part J^sh."""
    f = params.f
    _, _, Jsh = params.parts(J)
    out = []
    for j in range(f):
        v = 0
        if j in J:
            v = -1 if (j + 1) in J else 1
        if j in Jsh:
            v += 2
        out.append(v)
    return IntVec(f, tuple(out))


@dataclass(frozen=True)
class WeightB:
    """Serre weight sigma_b; b must sit in the window -r <= b <= p-2-r."""

    params: RhoParams
    b: IntVec

    def __post_init__(self):
        p, r = self.params.p, self.params.r
        for j, bj in enumerate(self.b):
            if not -r[j] <= bj <= p - 2 - r[j]:
                raise RangeViolation(f"b_{j}={bj} outside [-r_j, p-2-r_j]")


def translate_in_graph(params: RhoParams, J: SubsetJ, b: IntVec) -> WeightB:
    """Weight reached from position b after the J-translation.

    Hypothesis window: -(2(f - e^{J^sh}) + 1) <= b <= 2(f + e^{J^sh})
    componentwise.
    """
    f = params.f
    _, _, Jsh = params.parts(J)
    for j in range(f):
        lo = -(2 * (f - (1 if j in Jsh else 0)) + 1)
        hi = 2 * (f + (1 if j in Jsh else 0))
        if not lo <= b[j] <= hi:
            raise RangeViolation(f"b_{j}={b[j]} outside [{lo}, {hi}]")
    out = []
    for j in range(f):
        sign = -1 if (j + 1) in J else 1
        v = sign * (b[j] + (1 if j in J else 0))
        if j in Jsh:
            v += 2
        out.append(v)
    return WeightB(params, IntVec(f, tuple(out)))


def serre_weights_of_rhobar(params: RhoParams) -> frozenset:
    """W(rhobar): b supported on Jrho with entries in {0, 1}."""
    f = params.f
    ranges = [(0, 1) if j in params.Jrho else (0,) for j in range(f)]
    return frozenset(WeightB(params, IntVec(f, bs)) for bs in product(*ranges))


def jh_D0(params: RhoParams) -> frozenset:
    """Constituents of the full block: {-1,0,1} off Jrho, {-1,0,1,2} on it."""
    f = params.f
    ranges = [(-1, 0, 1, 2) if j in params.Jrho else (-1, 0, 1) for j in range(f)]
    return frozenset(WeightB(params, IntVec(f, bs)) for bs in product(*ranges))


def jh_D0_component(params: RhoParams, J: SubsetJ) -> frozenset:
    """Component indexed by J, a subset of Jrho.

    On Jrho the entry range splits: {1, 2} on J, {-1, 0} on Jrho \\ J; off
    Jrho it stays {-1, 0, 1}.  Components partition jh_D0.
    """
    if not J <= params.Jrho:
        raise RangeViolation("component index must lie inside Jrho")
    f = params.f
    ranges = []
    for j in range(f):
        if j not in params.Jrho:
            ranges.append((-1, 0, 1))
        elif j in J:
            ranges.append((1, 2))
        else:
            ranges.append((-1, 0))
    return frozenset(WeightB(params, IntVec(f, bs)) for bs in product(*ranges))


def shift_generated_constituents(params: RhoParams, J: SubsetJ, i: IntVec) -> frozenset:
    """Constituent region reached from (J, i); needs 0 <= i <= f - e^{J^sh}."""
    f = params.f
    _, Jnss, Jsh = params.parts(J)
    for j in range(f):
        hi = f - (1 if j in Jsh else 0)
        if not 0 <= i[j] <= hi:
            raise RangeViolation(f"i_{j}={i[j]} outside [0, {hi}]")
    ranges = []
    for j in range(f):
        if j not in Jnss:
            ranges.append((1 if j in J else 0,))
        elif i[j] == 0:
            ranges.append((0, -1 if (j + 1) in J else 1))
        else:
            ranges.append((-1, 0, 1))
    return frozenset(WeightB(params, IntVec(f, bs)) for bs in product(*ranges))


def _shift_orbits(f):
    seen = set()
    orbits = []
    for bits in range(1 << f):
        if bits in seen:
            continue
        J = SubsetJ(f, bits)
        orb = set()
        cur = J
        while cur.bits not in orb:
            orb.add(cur.bits)
            cur = cur.shift(-1)
        seen |= orb
        orbits.append(frozenset(orb))
    return orbits


def is_admissible_S(params: RhoParams, S) -> bool:
    """Shift-stable family of subsets; downward closed too unless Jrho is full."""
    masks = {J.bits for J in S}
    f = params.f
    for J in S:
        if J.shift(-1).bits not in masks:
            return False
    if not params.Jrho.is_full():
        for J in S:
            for sub in all_subsets(f):
                if sub <= J and sub.bits not in masks:
                    return False
    return True


def enumerate_admissible_S(params: RhoParams) -> frozenset:
    """All admissible families, each a frozenset of SubsetJ."""
    f = params.f
    orbits = _shift_orbits(f)
    out = set()
    for pick in product((0, 1), repeat=len(orbits)):
        masks = set()
        for chosen, orb in zip(pick, orbits):
            if chosen:
                masks |= orb
        S = frozenset(SubsetJ(f, m) for m in masks)
        if is_admissible_S(params, S):
            out.add(S)
    return frozenset(out)


def rank_for_S(params: RhoParams, S) -> int:
    if not is_admissible_S(params, S):
        raise InadmissibleS("family is not admissible")
    return len(S)


def jh_pi1(params: RhoParams, S) -> frozenset:
    """Constituents of jh_D0 whose positive support lies in S."""
    if not is_admissible_S(params, S):
        raise InadmissibleS("family is not admissible")
    masks = {J.bits for J in S}
    out = set()
    for w in jh_D0(params):
        pos = SubsetJ.of(params.f, (j for j in range(params.f) if w.b[j] >= 1))
        if pos.bits in masks:
            out.add(w)
    return frozenset(out)


@dataclass(frozen=True)
class HCharacter:
    """Diagonal-torus character, two exponents mod q-1."""

    qm1: int
    exp1: int
    exp2: int

    def __post_init__(self):
        object.__setattr__(self, "exp1", self.exp1 % self.qm1)
        object.__setattr__(self, "exp2", self.exp2 % self.qm1)

    def __mul__(self, other):
        return HCharacter(self.qm1, self.exp1 + other.exp1, self.exp2 + other.exp2)

    def __pow__(self, n):
        return HCharacter(self.qm1, self.exp1 * n, self.exp2 * n)

    def inverse(self):
        return HCharacter(self.qm1, -self.exp1, -self.exp2)


def char_of_lambda(params: RhoParams, lam1: IntVec, lam2: IntVec) -> HCharacter:
    p, qm1 = params.p, params.q - 1
    e1 = sum(lam1[j] * p**j for j in range(params.f))
    e2 = sum(lam2[j] * p**j for j in range(params.f))
    return HCharacter(qm1, e1, e2)


def char_of_weight(params: RhoParams, J: SubsetJ) -> HCharacter:
    """chi_J, the character of the J-indexed weight: lambda = (s^J+t^J, t^J)."""
    s, t = sJ_tJ(params, J)
    return char_of_lambda(params, s + t, t)


def conjugate_char(chi: HCharacter) -> HCharacter:
    return HCharacter(chi.qm1, chi.exp2, chi.exp1)


def alpha_char(params: RhoParams, i: IntVec) -> HCharacter:
    """alpha^i; alpha_j has exponent pair (p^j, -p^j)."""
    e = sum(i[j] * params.p**j for j in range(params.f))
    return HCharacter(params.q - 1, e, -e)


def mul_alpha(params: RhoParams, chi: HCharacter, i: IntVec) -> HCharacter:
    return chi * alpha_char(params, i)


def char_of_x_index(params: RhoParams, J: SubsetJ, i: IntVec) -> HCharacter:
    """chi'_J alpha^{-i} with chi'_J = chi_J alpha^{e^{J^sh}}."""
    _, _, Jsh = params.parts(J)
    chi_p = mul_alpha(params, char_of_weight(params, J), indicator(Jsh))
    return mul_alpha(params, chi_p, -i)
