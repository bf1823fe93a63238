"""Integer constant tables, index bookkeeping, and the scalar pairing algebra.

Everything here is exact: integer vectors indexed cyclically by embeddings,
plus finite-field scalars for the pairing constants.  The check_* functions
sweep every tuple allowed by the hypotheses of the identity they verify and
report the first counterexample rather than raising.
"""

import itertools
import random
from dataclasses import dataclass

from .arith import Fq
from .base_combinatorics import (
    IntVec,
    SubsetJ,
    indicator,
    right_boundary,
)
from .errors import ConfigInvalid, HypothesisViolation, PairNotDefined, RangeViolation
from .reporting import CheckResult, Sweep
from .weights import (
    aJ,
    alpha_char,
    char_of_lambda,
    char_of_weight,
    sJ_tJ,
    translate_in_graph,
)


# ---------------------------------------------------------------------------
# scalar constant vectors attached to a subset J


def rJ(params, J):
    """Twist exponents picked up when the origin of a J-block is moved."""
    r, f = params.r, params.f
    out = []
    for j in range(f):
        v = (r[j] + 1 if (j + 1) in J else 0) - (1 if j in J else 0)
        out.append(v)
    return IntVec(f, tuple(out))


def cJ(params, J):
    """Per-coordinate carry budget; always within [0, p-1]."""
    r, p, f = params.r, params.p, params.f
    out = []
    for j in range(f):
        v = 0
        if j not in J:
            v += p - 2 - r[j]
        if (j + 1) not in J:
            v += r[j] + 1
        out.append(v)
    return IntVec(f, tuple(out))


def cPrimeJ(params, J):
    """Companion of cJ; satisfies p*shift(e^{J cap (J+1)}) + cJ - cPrimeJ = f."""
    r, p, f = params.r, params.p, params.f
    out = []
    for j in range(f):
        inJ, sucJ = j in J, (j + 1) in J
        if not inJ and not sucJ:
            v = p - 1 - f
        elif inJ and not sucJ:
            v = r[j] + 1 - f
        elif not inJ and sucJ:
            v = p - 2 - r[j] - f
        else:
            v = p - f
        out.append(v)
    return IntVec(f, tuple(out))


def epsilonJ(params, J):
    """Sign attached to J: parity of the non-special interior of J, with the
    one exceptional corner (no special embeddings, J full)."""
    if not params.Jrho and J.is_full():
        return -1 if params.f % 2 == 0 else 1
    core = (J - right_boundary(J)) - params.Jrho
    return -1 if len(core) % 2 else 1


def tJJp(params, J, Jp):
    """Shift exponents for the (J, Jp) comparison: p-1-s(J) plus a Jp bump."""
    s, _ = sJ_tJ(params, J)
    p, f = params.p, params.f
    return IntVec(
        f, tuple(p - 1 - s[j] + (1 if (j - 1) in Jp else 0) for j in range(f))
    )


def _m_formula(params, i, J, Jp):
    # unguarded core of mVec; the reindexing sweep evaluates it formally
    f = params.f
    Kss = J.shift(-1) & params.Jrho
    sym = J ^ Kss
    out = []
    for j in range(f):
        core = (
            2 * i[j]
            + (1 if j in Kss else 0)
            - (1 if j in sym else 0)
            + (1 if (j - 1) in Jp else 0)
        )
        sign = -1 if (j + 1) not in J else 1
        out.append(sign * core)
    return IntVec(f, tuple(out))


def _require_small_box(params, J, i):
    f = params.f
    _, _, Jsh = params.parts(J)
    for j in range(f):
        hi = f - (1 if j in Jsh else 0)
        if not 0 <= i[j] <= hi:
            raise RangeViolation(f"i_{j}={i[j]} outside [0, {hi}]")


def mVec(params, i, J, Jp):
    """Signed exponent vector of the i-indexed element in a J-block, for the
    comparison subset Jp.  i must lie in the small box [0, f - e^{Jsh}]."""
    _require_small_box(params, J, i)
    return _m_formula(params, i, J, Jp)


def tJx(params, J, j, x):
    """One-variable shift exponent: write x = 2n + d with d in {0, 1}."""
    n, d = divmod(x, 2)
    if d == 0:
        return n * params.p
    bump = (params.r[j] + 1) if (j + 1) not in J else (params.p - 1 - params.r[j])
    return n * params.p + bump


def aJn(params, J, n, j0):
    """Exponent table for the n-indexed family anchored at j0.

    Requires n_{j0+1} = 0 and 1 <= n_j <= 2f - [j in J] elsewhere.
    """
    f = params.f
    if n[j0 + 1] != 0:
        raise HypothesisViolation(f"n at slot j0+1 is {n[j0 + 1]}, expected 0")
    for j in range(f):
        if j == (j0 + 1) % f:
            continue
        hi = 2 * f - (1 if j in J else 0)
        if not 1 <= n[j] <= hi:
            raise HypothesisViolation(f"n_{j}={n[j]} outside [1, {hi}]")
    _, _, Jsh = params.parts(J)
    out = []
    for j in range(f):
        if j == j0 % f and j0 in Jsh:
            out.append(0)
        else:
            out.append(tJx(params, J, j, n[j + 1]) - n[j])
    return IntVec(f, tuple(out))


def hj(params, h, j):
    """Base-p assembly of the cyclic vector h starting at slot j.

    h=None means the default vector r+1.  Satisfies the telescoping relation
    p*hj(h, j+1) - hj(h, j) = (q-1)*h_j for any h.
    """
    if h is None:
        h = params.r + IntVec.const(params.f, 1)
    return sum(h[j + i] * params.p**i for i in range(params.f))


def decompose_index(params, J, i):
    """Unique (i2, ell) with i = p*shift(i2) + cJ(J) - ell, 0 <= ell <= p-1.

    shift acts by shift(v)_j = v_{j+1}.  If max(i) > f the maximum strictly
    drops, which is what makes repeated decomposition terminate.
    """
    p, f = params.p, params.f
    c = cJ(params, J)
    i2 = [0] * f
    ell = [0] * f
    for j in range(f):
        d = i[j] - c[j]
        up = -((-d) // p)  # ceil(d / p)
        i2[(j + 1) % f] = up
        ell[j] = p * up - d
    return IntVec(f, tuple(i2)), IntVec(f, tuple(ell))


# ---------------------------------------------------------------------------
# pairing scalars


@dataclass(frozen=True)
class MuAlgebra:
    """Pairing scalars mu(J, Jp) in product form rho_factor[J] * sigma_factor[Jp].

    mu(J, Jp) is defined exactly when the special parts match:
    (J-1)^ss == Jp^ss.  The product form makes every cross-ratio relation
    between entries sharing a defining class hold identically, which is all
    the downstream matrix algorithms rely on.
    """

    params: object
    field: Fq
    rho_factor: dict
    sigma_factor: dict

    def defined(self, J, Jp):
        return (J.shift(-1) & self.params.Jrho) == (Jp & self.params.Jrho)

    def _sign(self, Jp):
        # (-1)^(f-1) * epsilon(Jp)
        s = epsilonJ(self.params, Jp)
        return s if self.params.f % 2 == 1 else -s

    def mu(self, J, Jp):
        if not self.defined(J, Jp):
            raise PairNotDefined(f"mu undefined for pair ({J!r}, {Jp!r})")
        return self.rho_factor[J] * self.sigma_factor[Jp]

    def gamma(self, J, Jp):
        m = self.mu(J, Jp)
        return m if self._sign(Jp) == 1 else -m

    def mu_star(self, J):
        """Row factor: mu(J, K) / mu(J2, K) == mu_star(J) / mu_star(J2)."""
        return self.rho_factor[J]

    def gamma_star(self, Jp):
        """Column factor carrying the sign of gamma."""
        s = self.sigma_factor[Jp]
        return s if self._sign(Jp) == 1 else -s


def mu_gamma(params, seed=0):
    """Seeded choice of nonzero pairing scalars in product form."""
    field = Fq(params.p, params.f)
    rng = random.Random(seed)
    rho, sigma = {}, {}
    for J in params.subsets():
        rho[J] = field.elem(rng.randrange(1, field.q))
        sigma[J] = field.elem(rng.randrange(1, field.q))
    return MuAlgebra(params, field, rho, sigma)


# ---------------------------------------------------------------------------
# mutable table frontend (for mutation kill-coverage)


MUTABLE = ("s", "t", "a", "r", "c", "cprime", "tJJp", "aJn")


@dataclass(frozen=True)
class Mutation:
    """One-cell additive perturbation of a named constant table."""

    table: str
    jmask: int
    j: int
    jpmask: int = 0
    delta: int = 1

    def __post_init__(self):
        if self.table not in MUTABLE:
            raise ConfigInvalid(f"unknown table {self.table!r}; pick one of {MUTABLE}")


class ConstantTables:
    """Accessors for the constant tables, with an optional one-cell mutation.

    A mutation bumps exactly one output cell of the named accessor; every
    other accessor keeps the pristine formula.  The identity sweeps read the
    constants only through an instance of this class, so any single-cell
    perturbation must trip at least one of them.
    """

    def __init__(self, params, mutation=None):
        self.params = params
        self.mutation = mutation

    def _bump(self, table, J, vec, Jp=None):
        m = self.mutation
        if m is None or m.table != table or m.jmask != J.bits:
            return vec
        if table == "tJJp" and m.jpmask != Jp.bits:
            return vec
        ent = list(vec.entries)
        ent[m.j % self.params.f] += m.delta
        return IntVec(self.params.f, tuple(ent))

    def s(self, J):
        return self._bump("s", J, sJ_tJ(self.params, J)[0])

    def t(self, J):
        return self._bump("t", J, sJ_tJ(self.params, J)[1])

    def a(self, J):
        return self._bump("a", J, aJ(self.params, J))

    def rJ(self, J):
        return self._bump("r", J, rJ(self.params, J))

    def cJ(self, J):
        return self._bump("c", J, cJ(self.params, J))

    def cprime(self, J):
        return self._bump("cprime", J, cPrimeJ(self.params, J))

    def tJJp(self, J, Jp):
        return self._bump("tJJp", J, tJJp(self.params, J, Jp), Jp=Jp)

    def aJn(self, J, n, j0):
        return self._bump("aJn", J, aJn(self.params, J, n, j0))

    # passthrough, not mutable
    def tJx(self, J, j, x):
        return tJx(self.params, J, j, x)

    def m(self, i, J, Jp):
        return _m_formula(self.params, i, J, Jp)


def all_mutations(params):
    """Every single-cell +1 mutation of the mutable tables."""
    subs = list(params.subsets())
    out = []
    for table in MUTABLE:
        for J in subs:
            for j in range(params.f):
                if table == "tJJp":
                    for Jp in subs:
                        out.append(Mutation(table, J.bits, j, jpmask=Jp.bits))
                else:
                    out.append(Mutation(table, J.bits, j))
    return out


# ---------------------------------------------------------------------------
# shared sweep helpers


def _subsets(params):
    return list(params.subsets())


def _pairs_same_class(params, subs):
    # pairs (J, Jp) with (J-1)^ss == Jp^ss
    for J in subs:
        cls = J.shift(-1) & params.Jrho
        for Jp in subs:
            if (Jp & params.Jrho) == cls:
                yield J, Jp


def _small_boxes(params, J):
    f = params.f
    _, _, Jsh = params.parts(J)
    ranges = [range(0, f - (1 if j in Jsh else 0) + 1) for j in range(f)]
    for ent in itertools.product(*ranges):
        yield IntVec(f, ent)


def _a_domain(params, J, j0):
    f = params.f
    anchor = (j0 + 1) % f
    ranges = []
    for j in range(f):
        if j == anchor:
            ranges.append((0,))
        else:
            ranges.append(tuple(range(1, 2 * f - (1 if j in J else 0) + 1)))
    for ent in itertools.product(*ranges):
        yield IntVec(f, ent)


# ---------------------------------------------------------------------------
# bound checks


def check_weight_table_bounds(params, tables=None):
    """Window checks for the s, pairwise-shift, and carry tables."""
    tables = tables or ConstantTables(params)
    p, f = params.p, params.f
    subs = _subsets(params)

    sw = Sweep("bound-s")
    extra = 1 if f == 1 else 0
    for J in subs:
        _, _, Jsh = params.parts(J)
        s = tables.s(J)
        for j in range(f):
            dsh = 1 if j in Jsh else 0
            lo = 2 * (f - dsh) + 1 + extra
            hi = p - 2 - 2 * (f + dsh)
            sw.check(lo <= s[j] <= hi, J=J, j=j, s=s[j], lo=lo, hi=hi)

    tw = Sweep("bound-pairwise-shift")
    for J in subs:
        _, _, Jsh = params.parts(J)
        for Jp in subs:
            tv = tables.tJJp(J, Jp)
            for j in range(f):
                hi = p - 1 - 2 * (f - (1 if j in Jsh else 0))
                tw.check(1 <= tv[j] <= hi, J=J, Jp=Jp, j=j, t=tv[j], hi=hi)

    cw = Sweep("bound-carry-window")
    for J in subs:
        c, cp = tables.cJ(J), tables.cprime(J)
        for j in range(f):
            cw.check(
                0 <= c[j] <= p - 1 and 0 <= cp[j] <= p - 1,
                J=J, j=j, c=c[j], cprime=cp[j],
            )

    dw = Sweep("carry-difference-identity")
    for J in subs:
        c, cp = tables.cJ(J), tables.cprime(J)
        overlap = J & J.shift(1)
        for j in range(f):
            lhs = p * (1 if (j + 1) in overlap else 0) + c[j] - cp[j]
            dw.check(lhs == f, J=J, j=j, value=lhs)

    return [sw.result(), tw.result(), cw.result(), dw.result()]


# ---------------------------------------------------------------------------
# identity checks


def check_change_origin(params, tables=None):
    """Origin translation acts as base offset a(J) plus a successor-driven
    sign flip on the whole admissible window."""
    tables = tables or ConstantTables(params)
    f = params.f
    sw = Sweep("change-origin-composition")
    for J in params.subsets():
        base = tables.a(J)
        _, _, Jsh = params.parts(J)
        ranges = []
        for j in range(f):
            dsh = 1 if j in Jsh else 0
            ranges.append(range(-(2 * (f - dsh) + 1), 2 * (f + dsh) + 1))
        for ent in itertools.product(*ranges):
            got = translate_in_graph(params, J, IntVec(f, ent)).b
            want = tuple(
                base[j] + (-1 if (j + 1) in J else 1) * ent[j] for j in range(f)
            )
            sw.check(got.entries == want, J=J, b=list(ent))
    return sw.result()


def _check_t_vs_r(params, tables, subs):
    sw = Sweep("t-equals-r-plus-shift")
    for J in subs:
        _, _, Jsh = params.parts(J)
        want = tables.rJ(J) + indicator(Jsh)
        sw.check(tables.t(J) == want, J=J, t=tables.t(J), want=want)
    return sw.result()


def _check_tpair_vs_s(params, tables, subs):
    sw = Sweep("pairwise-shift-vs-s")
    p, f = params.p, params.f
    for J in subs:
        s = tables.s(J)
        for Jp in subs:
            tv = tables.tJJp(J, Jp)
            for j in range(f):
                want = p - 1 - s[j] + (1 if (j - 1) in Jp else 0)
                sw.check(tv[j] == want, J=J, Jp=Jp, j=j, t=tv[j], want=want)
    return sw.result()


def _check_s_complement(params, tables, subs):
    sw = Sweep("s-complement")
    p = params.p
    for J, Jp in _pairs_same_class(params, subs):
        sym = J ^ Jp
        inter_nss = (J & Jp) - params.Jrho
        sJ, sJp = tables.s(J), tables.s(Jp)
        for j in sym.shift(-1).members():
            lhs = (
                2 * (1 if j in inter_nss else 0)
                + (p - 2 - sJ[j])
                + (1 if j in sym else 0)
            )
            sw.check(lhs == sJp[j], J=J, Jp=Jp, j=j, lhs=lhs, rhs=sJp[j])
    return sw.result()


def _check_m_closed_form(params, tables, subs):
    sw = Sweep("m-closed-form")
    for J, Jp in _pairs_same_class(params, subs):
        i = indicator((J & Jp) - params.Jrho)
        m = tables.m(i, J, (J ^ Jp).shift(-1))
        for j in range(params.f):
            want = (1 if j in Jp else 0) * (-1 if (j + 1) not in J else 1)
            sw.check(m[j] == want, J=J, Jp=Jp, j=j, m=m[j], want=want)
    return sw.result()


def _reindex_tuples(params, subs):
    f = params.f
    for J in subs:
        nss = J.shift(-1) - params.Jrho
        for j0 in range(f):
            if (j0 + 1) % f not in nss:
                continue
            for i in _small_boxes(params, J):
                if i[j0 + 1] != 0:
                    continue
                for Jp in subs:
                    if (j0 in Jp) != ((j0 + 1) in J):
                        continue
                    yield J, i, j0, Jp


def _check_shift_overlap_reindex(params, tables, subs):
    """Reindexing a block across the overlap at j0: the m-vector, the shift
    exponents, the assembled carry digits, and positivity all transport."""
    sw = Sweep("shift-overlap-reindex")
    p, f, r = params.p, params.f, params.r
    for J, i, j0, Jp in _reindex_tuples(params, subs):
        anchor = (j0 + 1) % f
        J2 = J - SubsetJ.of(f, [j0 + 2])
        Jpp = Jp ^ SubsetJ.of(f, [j0 + 1])
        Kss = J.shift(-1) & params.Jrho  # same for J2 since j0+2 is not special

        ent = list(i.entries)
        ent[(j0 + 2) % f] += -(0 if (j0 + 1) in Jp else 1) + (
            1 if (j0 + 2) in Kss else 0
        )
        ip = IntVec(f, tuple(ent))

        m1 = tables.m(i, J, Jp)
        m2 = tables.m(ip, J2, Jpp)
        sw.check(m1 == m2 and m1[anchor] == 0, J=J, j0=j0, i=i, Jp=Jp, part="m")

        tv, tv2 = tables.tJJp(J, Jp), tables.tJJp(J2, Jpp)
        ok = True
        for j in range(f):
            lhs = 2 * i[j] + tv[j]
            rhs = 2 * ip[j] + tv2[j]
            if j == anchor:
                ok = ok and lhs == r[j] + 1 and rhs == p - 1 - r[j]
            else:
                ok = ok and lhs == rhs
        sw.check(ok, J=J, j0=j0, i=i, Jp=Jp, part="shift")

        sym1, sym2 = J ^ Kss, J2 ^ Kss
        svec = tables.s(Kss)
        anchor_out = 1 if (j0 + 1) not in J else 0
        cvec, cpvec = [], []
        for j in range(f):
            v = p * i[j + 1] + (svec[j] if (j + 1) in sym1 else p - 1)
            if j not in Jp:
                v -= 2 * i[j] + tv[j]
            if j == anchor:
                v -= anchor_out
            cvec.append(v)
            v2 = p * ip[j + 1] + (svec[j] if (j + 1) in sym2 else p - 1)
            if j not in Jpp:
                v2 -= 2 * ip[j] + tv2[j]
            if j == anchor:
                v2 -= anchor_out
            cpvec.append(v2)
        sw.check(cvec == cpvec, J=J, j0=j0, i=i, Jp=Jp, part="carry", c=cvec, c2=cpvec)

        hyp = all(
            2 * i[j] - (1 if j in sym1 else 0) + (1 if (j - 1) in Jp else 0) >= 0
            for j in range(f)
        )
        if hyp:
            sw.check(
                min(cvec) >= 0 and all(ip[j] >= 0 for j in range(f)),
                J=J, j0=j0, i=i, Jp=Jp, part="positivity",
            )
        _, _, J2sh = params.parts(J2)
        sw.check(
            all(ip[j] <= f - (1 if j in J2sh else 0) for j in range(f)),
            J=J, j0=j0, i=i, Jp=Jp, part="box",
        )
    return sw.result()


def _check_character_origin(params, tables, subs):
    sw = Sweep("character-origin")
    target = char_of_lambda(params, params.r, IntVec.zero(params.f))
    for J in subs:
        _, _, Jsh = params.parts(J)
        chi = char_of_weight(params, J) * alpha_char(
            params, indicator(Jsh) + tables.rJ(J)
        )
        sw.check(chi == target, J=J)
    return sw.result()


def _check_r_additivity(params, tables, subs):
    sw = Sweep("r-additivity")
    for J1 in subs:
        for J2 in subs:
            if J1 & J2:
                continue
            sw.check(
                tables.rJ(J1 | J2) == tables.rJ(J1) + tables.rJ(J2), J1=J1, J2=J2
            )
    return sw.result()


def _check_c_as_r_difference(params, tables, subs):
    sw = Sweep("c-as-r-difference")
    p, f = params.p, params.f
    for J in subs:
        c = tables.cJ(J)
        rv, rv1 = tables.rJ(J), tables.rJ(J.shift(1))
        sw.check(
            alpha_char(params, c) == alpha_char(params, rv1 - rv), J=J, part="character"
        )
        for j in range(f):
            want = p * (0 if j in J else 1) - (0 if (j - 1) in J else 1)
            sw.check(
                c[j] + rv[j] - rv1[j] == want, J=J, j=j, part="integer",
                lhs=c[j] + rv[j] - rv1[j], want=want,
            )
    return sw.result()


def _check_carry_inequality(params, tables, subs):
    sw = Sweep("carry-inequality")
    p, f = params.p, params.f
    for J in subs:
        for Jp in subs:
            if not Jp <= J:
                continue
            Jpp = Jp ^ J.shift(-1)
            cvec = (
                p * indicator(Jp & J.shift(-1))
                + tables.cJ(Jp)
                - IntVec.const(f, f)
                - tables.rJ(J - Jp)
            )
            Jp1 = Jp.shift(1)
            _, _, Jp1sh = params.parts(Jp1)
            tv = tables.tJJp(Jp1, Jpp)
            bonus = 1 if not Jpp else 0
            for j in range(f):
                rhs = bonus
                if j not in Jpp:
                    rhs += (
                        2 * ((1 if j in (Jp1 & J) else 0) - (1 if j in Jp1sh else 0))
                        + tv[j]
                    )
                for d in (0, 1):
                    sw.check(
                        cvec[j] - d >= rhs,
                        J=J, Jp=Jp, j=j, d=d, lhs=cvec[j] - d, rhs=rhs,
                    )
    return sw.result()


def _check_c_restriction(params, tables, subs):
    sw = Sweep("c-restriction")
    p, f, r = params.p, params.f, params.r
    for J in subs:
        for Jp in subs:
            if not Jp <= J:
                continue
            cp, cw = tables.cJ(Jp), tables.cJ(J)
            rd = tables.rJ(J - Jp)
            for j in range(f):
                want = cw[j] + (p - 1 - r[j] if j in (J - Jp) else 0)
                sw.check(
                    cp[j] - rd[j] == want, J=J, Jp=Jp, j=j,
                    lhs=cp[j] - rd[j], want=want,
                )
    return sw.result()


def _check_scalar_ratio_classes(params, mu, subs):
    sw = Sweep("scalar-ratio-classes")
    for C in subs:
        if not C <= params.Jrho:
            continue
        rows = [J for J in subs if (J.shift(-1) & params.Jrho) == C]
        cols = [Jp for Jp in subs if (Jp & params.Jrho) == C]
        for J1, J2 in itertools.product(rows, rows):
            for J3, J4 in itertools.product(cols, cols):
                lhs = mu.mu(J1, J3) * mu.mu(J2, J4)
                rhs = mu.mu(J1, J4) * mu.mu(J2, J3)
                sw.check(lhs == rhs, cls=C, J1=J1, J2=J2, J3=J3, J4=J4)
        for J1, J2 in itertools.product(rows, rows):
            for K in cols:
                sw.check(
                    mu.mu(J1, K) * mu.mu_star(J2) == mu.mu(J2, K) * mu.mu_star(J1),
                    cls=C, J1=J1, J2=J2, K=K, part="mu-star",
                )
        for J in rows:
            for J3, J4 in itertools.product(cols, cols):
                sw.check(
                    mu.gamma(J, J3) * mu.gamma_star(J4)
                    == mu.gamma(J, J4) * mu.gamma_star(J3),
                    cls=C, J=J, J3=J3, J4=J4, part="gamma-star",
                )
    sign0 = 1 if params.f % 2 == 1 else -1
    for J, Jp in _pairs_same_class(params, subs):
        want = mu.mu(J, Jp) * (sign0 * epsilonJ(params, Jp))
        sw.check(mu.gamma(J, Jp) == want, J=J, Jp=Jp, part="gamma-sign")
    return sw.result()


def check_constant_identities(params, tables=None, mu=None, seed=0):
    """All identity sweeps tying the constant tables to one another."""
    tables = tables or ConstantTables(params)
    mu = mu or mu_gamma(params, seed)
    subs = _subsets(params)
    return [
        _check_t_vs_r(params, tables, subs),
        _check_tpair_vs_s(params, tables, subs),
        check_change_origin(params, tables),
        _check_s_complement(params, tables, subs),
        _check_m_closed_form(params, tables, subs),
        _check_shift_overlap_reindex(params, tables, subs),
        _check_character_origin(params, tables, subs),
        _check_r_additivity(params, tables, subs),
        _check_c_as_r_difference(params, tables, subs),
        _check_carry_inequality(params, tables, subs),
        _check_c_restriction(params, tables, subs),
        _check_scalar_ratio_classes(params, mu, subs),
    ]


def check_shifted_table_additivity(params, tables=None):
    """aJn(J, n) + rJ(J minus Jp) == aJn(Jp, n + e^{J minus Jp}) whenever
    j0+1 avoids the difference and the anchor condition holds."""
    tables = tables or ConstantTables(params)
    f = params.f
    sw = Sweep("shifted-table-additivity")
    for J in params.subsets():
        Jss = J & params.Jrho
        _, _, Jsh = params.parts(J)
        for Jp in params.subsets():
            if not Jp <= J:
                continue
            diff = J - Jp
            for j0 in range(f):
                if (j0 + 1) in diff:
                    continue
                if j0 in Jsh and not (Jss | SubsetJ.of(f, [j0 + 1])) <= Jp:
                    continue
                shift = indicator(diff)
                for n in _a_domain(params, J, j0):
                    lhs = tables.aJn(J, n, j0) + tables.rJ(diff)
                    rhs = tables.aJn(Jp, n + shift, j0)
                    sw.check(lhs == rhs, J=J, Jp=Jp, j0=j0, n=n, lhs=lhs, rhs=rhs)
    return sw.result()


def check_domination_claims(params, tables=None):
    """Worst-case envelopes used to localize the reduction:

    - vanishing-region-envelope: evaluation at the extreme n dominates every
      index of norm <= f with minimum -m' at j0 (trivial single check at f=1);
    - reduction-target-domination: the anchored table dominates the shifted
      target row by row.
    """
    tables = tables or ConstantTables(params)
    p, f = params.p, params.f
    env = Sweep("vanishing-region-envelope")
    if f == 1:
        for J in params.subsets():
            a = tables.aJn(J, IntVec.zero(1), 0)
            env.check(a[0] == 0, J=J, a=a)
    else:
        for J in params.subsets():
            for j0 in range(f):
                for mp in range(1, p):
                    nval = min(mp, 2 * f - 1)
                    ent = [nval] * f
                    ent[(j0 + 1) % f] = 0
                    n = IntVec(f, tuple(ent))
                    a = tables.aJn(J, n, j0)
                    bound = (f - 1) * mp + f
                    ok = a[j0] >= -mp
                    for j in range(f):
                        if j == j0 % f:
                            continue
                        ok = ok and a[j] - (1 if j == (j0 + 1) % f else 0) >= bound
                    env.check(ok, J=J, j0=j0, mprime=mp, a=a, bound=bound)

    cor = Sweep("reduction-target-domination")
    if f >= 2:
        for J in params.subsets():
            Jss = J & params.Jrho
            _, _, Jsh = params.parts(J)
            for Jp in params.subsets():
                if not (Jss <= Jp and Jp < J):
                    continue
                diff = J - Jp
                for j0 in range(f):
                    if (j0 + 1) in diff:
                        continue
                    ent = [2] * f
                    ent[(j0 + 1) % f] = 0
                    ent[j0 % f] = 1 + (1 if j0 in diff else 0)
                    n = IntVec(f, tuple(ent))
                    lhs = tables.aJn(Jp, n, j0) - IntVec.unit(f, (j0 + 1) % f)
                    drop = f + 1 - (1 if j0 in Jsh else 0)
                    rhs = (
                        tables.rJ(diff)
                        + IntVec.const(f, f)
                        - drop * IntVec.unit(f, j0 % f)
                    )
                    cor.check(lhs.geq(rhs), J=J, Jp=Jp, j0=j0, lhs=lhs, rhs=rhs)
    return [env.result(), cor.result()]
