"""The birational extension S = R[c_R/x1] and its explicit presentation.

S is generated over R by the monomials T_j = t^{b_j}, where b_1 < ... < b_s
are the values in [c_R - a_1, c_R - 1] missed by v(R).  Its conductor is
(t^{c_R - a_1}) k[[t]].  The presentation relations X_i T_j - g_ij and
T_k T_l - h_kl are produced by staircase division of the product series;
when the conductor of R sits inside the square of the maximal ideal
(equivalently a_n < c_R) the right-hand sides are pure-x polynomials with
all terms of degree >= 2.  For inputs violating that hypothesis the
construction still goes through, but right-hand sides may involve the T's
and the presentation is only recorded, not certified minimal.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .branch import Branch
from .poly import Poly, mono_degree
from .semigroup import (
    BranchAnalysis,
    EliminationResult,
    StaircaseBasis,
    ValueSemigroup,
    divide_by_staircase,
    eliminate,
    extension_gaps,
    semigroup_from_elimination,
)
from .series import TruncatedSeries


class ExtensionError(ValueError):
    pass


@dataclass
class Relation:
    kind: str  # "XT" or "TT"
    indices: tuple  # 0-based (i, j) with i a generator / j a T index
    lhs: tuple  # monomial over the S frame
    rhs: Poly  # over the S frame
    rhs_series: TruncatedSeries

    def lhs_str(self, names):
        from .poly import mono_str

        return mono_str(self.lhs, names)


@dataclass
class ExtensionRing:
    branch: Branch
    analysis: BranchAnalysis
    gap_values: tuple  # b_1 < ... < b_s
    t_series: tuple
    relations: list
    semigroup_S: ValueSemigroup
    staircase_S: StaircaseBasis
    kernel_S: list
    support_S: frozenset
    witness_S: dict
    strict: bool
    edim_defect: tuple  # linear monomials found in relations of S, if any

    @property
    def n(self) -> int:
        return self.branch.n

    @property
    def s(self) -> int:
        return len(self.gap_values)

    @property
    def names(self):
        return self.branch.names + tuple(f"T{j+1}" for j in range(self.s))

    @property
    def valuations(self):
        return self.branch.valuations + self.gap_values

    @property
    def conductor_S(self) -> int:
        return self.analysis.conductor - self.branch.valuations[0]

    @property
    def all_gens(self):
        return tuple(self.branch.generators) + self.t_series

    def embed_poly(self, p: Poly) -> Poly:
        """Lift a pure-x polynomial from the R frame to the S frame."""
        q = Poly(self.n + self.s)
        q.terms = {m + (0,) * self.s: c for m, c in p.terms.items()}
        return q

    def relation(self, kind, i, j):
        for r in self.relations:
            if r.kind == kind and r.indices == (i, j):
                return r
        raise KeyError((kind, i, j))


def build_extension(analysis: BranchAnalysis) -> ExtensionRing:
    """Construct S = R[c_R/x1] with its presentation relations."""
    branch = analysis.branch
    B = branch.precision
    c = analysis.conductor
    a = branch.valuations
    n = branch.n
    gaps = extension_gaps(analysis.semigroup, a[0])
    if not gaps:
        raise ExtensionError(
            "no extension generators: the branch is regular or the "
            "conductor analysis failed"
        )
    strict = a[-1] < c  # conductor inside m^2, the paper's standing case
    s = len(gaps)
    t_series = tuple(TruncatedSeries.monomial(b, B) for b in gaps)
    names = branch.names + tuple(f"T{j+1}" for j in range(s))
    valuations = a + gaps
    all_gens = list(branch.generators) + list(t_series)

    res_S = eliminate(
        all_gens,
        names,
        valuations,
        B,
        t_indices=tuple(range(n, n + s)),
        keep_kernel=True,
    )
    vs_S = semigroup_from_elimination(res_S, B)
    if vs_S.conductor != c - a[0]:
        raise ExtensionError(
            f"conductor of S is {vs_S.conductor}, expected {c - a[0]}: "
            "internal consistency failure"
        )

    def embed(p: Poly) -> Poly:
        q = Poly(n + s)
        q.terms = {m + (0,) * s: cc for m, cc in p.terms.items()}
        return q

    def relaxed_rhs(lhs):
        # The kernel of the S elimination contains a relation with the
        # product monomial in its support; solving it for that monomial
        # expresses the product over the remaining generators.
        idx = res_S.witness.get(lhs)
        if idx is None:
            raise ExtensionError(
                "no relation found for a generator product; precision too low"
            )
        w = res_S.kernel[idx]
        cval = w.terms[lhs]
        rhs = Poly.monomial(lhs).sub(w.scale(1 / cval))
        assert lhs not in rhs.terms
        return rhs

    relations = []
    for i in range(n):
        for j in range(s):
            lhs = _xt_monomial(n, s, i, j)
            if strict:
                prod = branch.generators[i].mul(t_series[j])
                expr, _ = divide_by_staircase(
                    prod, analysis.staircase, floor=c, m2_only=True
                )
                rhs = embed(expr)
            else:
                rhs = relaxed_rhs(lhs)
            relations.append(
                Relation("XT", (i, j), lhs, rhs, rhs.evaluate(all_gens))
            )
    for k in range(s):
        for l in range(k, s):
            lhs = _tt_monomial(n, s, k, l)
            if strict:
                prod = t_series[k].mul(t_series[l])
                expr, _ = divide_by_staircase(
                    prod, analysis.staircase, floor=c, m2_only=True
                )
                rhs = embed(expr)
            else:
                rhs = relaxed_rhs(lhs)
            relations.append(
                Relation("TT", (k, l), lhs, rhs, rhs.evaluate(all_gens))
            )

    if strict:
        for r in relations:
            if not r.rhs.in_m2():
                raise ExtensionError(
                    "presentation right-hand side has a linear term despite "
                    "the conductor lying in m^2"
                )
            if any(m[n:] != (0,) * s for m in r.rhs.terms):
                raise ExtensionError(
                    "presentation right-hand side involves a T generator "
                    "despite the conductor lying in m^2"
                )

    edim_defect = tuple(res_S.linear_kernel_monomials)
    if strict and edim_defect:
        raise ExtensionError(
            "embedding dimension of S dropped below n+s in the strict case"
        )

    return ExtensionRing(
        branch=branch,
        analysis=analysis,
        gap_values=gaps,
        t_series=t_series,
        relations=relations,
        semigroup_S=vs_S,
        staircase_S=res_S.staircase,
        kernel_S=res_S.kernel,
        support_S=res_S.support,
        witness_S=res_S.witness,
        strict=strict,
        edim_defect=edim_defect,
    )


def _xt_monomial(n, s, i, j):
    m = [0] * (n + s)
    m[i] += 1
    m[n + j] += 1
    return tuple(m)


def _tt_monomial(n, s, k, l):
    m = [0] * (n + s)
    m[n + k] += 1
    m[n + l] += 1
    return tuple(m)


def semigroup_of_S(ext: ExtensionRing):
    """(ValueSemigroup, StaircaseBasis) of S; conductor verified on build."""
    return ext.semigroup_S, ext.staircase_S


@dataclass
class TransportData:
    t_index: int  # 0-based j
    f: Poly  # pure-x part, over the S frame
    delta: dict  # k (0-based, k > j) -> Fraction
    tprime_series: TruncatedSeries
    tprime_poly: Poly  # T_j + f + sum delta_k T_k


def transport_T_under_monomialization(ext: ExtensionRing, d: int):
    """Express each T'_j = beta^{b_j} t^{b_j} over the S generators.

    beta is the a_d-th root of alpha_d, so that generator d becomes an exact
    monomial in the new uniformizer s = beta*t.  Each T'_j = s^{b_j} differs
    from T_j by a conductor element of S; greedy division writes it as
    T_j + f_j(x) + sum_{k>j} delta_k T_k with scalar deltas.
    """
    branch = ext.branch
    B = branch.precision
    n, s = ext.n, ext.s
    alpha = branch.unit(d)
    beta = alpha.nth_root_unit(branch.valuations[d])
    out = {}
    for j, b in enumerate(ext.gap_values):
        tprime = beta.pow(b).shift(b)
        tprime = tprime.truncate(min(tprime.prec, B))
        w = tprime.sub(ext.t_series[j].truncate(tprime.prec))
        if w.is_zero():
            f = Poly.zero(n + s)
            delta: dict[int, Fraction] = {}
        else:
            expr, _ = divide_by_staircase(w, ext.staircase_S, floor=b + 1)
            f = Poly.zero(n + s)
            delta = {}
            for m, cval in expr.terms.items():
                tdeg = sum(m[n:])
                if tdeg == 0:
                    f = f.add(Poly.monomial(m, cval))
                elif (
                    tdeg == 1
                    and mono_degree(m) == 1
                ):
                    k = m[n:].index(1)
                    if k <= j:
                        raise ExtensionError(
                            "transport produced a T index not above j"
                        )
                    delta[k] = cval
                else:
                    raise ExtensionError(
                        "transport expression has a mixed term; the "
                        "staircase shape invariant failed"
                    )
        tprime_poly = Poly.variable(n + s, n + j).add(f)
        for k, cval in delta.items():
            tprime_poly = tprime_poly.add(
                Poly.variable(n + s, n + k).scale(cval)
            )
        out[j] = TransportData(
            t_index=j,
            f=f,
            delta=delta,
            tprime_series=tprime,
            tprime_poly=tprime_poly,
        )
    return out
