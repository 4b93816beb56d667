"""Value semigroups, staircase bases, and the exact elimination engine.

The central computation: enumerate all monomials in the branch generators
whose valuation is at most the precision bound, and Gaussian-eliminate their
series images over Q, pivoting on lowest series order.  The pivot orders are
exactly the attained values v(R) (resp. v(S)) up to the bound; the pivot
rows, with their monomial bookkeeping, form a staircase basis used for
greedy division; the rows that reduce to zero are kernel elements, i.e.
elements of the defining ideal up to precision, whose supports generate the
monomial support ideal.

Row processing order matters for the *shape* of the output (not for the
attained set): single-T rows first, then pure-x rows of degree >= 2, then
mixed rows, then single-x rows, then the constant.  This guarantees that
every staircase representative at an order other than some a_u (or gap b_k)
is supported on degree >= 2 monomials, which is what makes the extension
relations land in the square of the maximal ideal.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .branch import (
    Branch,
    RedundantGeneratorError,
    frobenius_number,
    numerical_semigroup_members,
)
from .poly import Monomial, Poly, mono_degree, mono_valuation
from .series import INF, TruncatedSeries


class StaircaseGapError(ValueError):
    """Greedy division hit a non-attained order below the conductor."""


class NotExpressibleInM2(ValueError):
    """Division required a staircase row with degree-1 support."""


def numerical_semigroup(gens, bound=None):
    """Membership table of <gens> up to bound plus the Frobenius number."""
    frob = frobenius_number(gens)
    if bound is None:
        bound = frob + 1 + 2 * max(gens)
    return numerical_semigroup_members(gens, bound), frob


@dataclass
class StairRow:
    order: int
    series: dict  # exponent -> Fraction, monic (coefficient 1 at `order`)
    poly: Poly
    phase_a: bool  # support free of degree-1 pure-x monomials
    t_single: bool


@dataclass
class StaircaseBasis:
    names: tuple
    valuations: tuple
    rows: dict  # order -> StairRow
    bound: int

    def series_of(self, order: int) -> TruncatedSeries:
        return TruncatedSeries(self.rows[order].series, self.bound)


@dataclass(frozen=True)
class ValueSemigroup:
    attained: frozenset
    conductor: int
    gaps: tuple  # integers in [0, conductor) not attained
    bound: int


@dataclass
class EliminationResult:
    staircase: StaircaseBasis
    attained: frozenset
    kernel: list  # list[Poly], each an exact relation mod t^(bound+1)
    support: frozenset  # union of kernel supports
    witness: dict  # monomial -> index into kernel
    linear_kernel_monomials: list  # degree-1 monomials appearing in kernel


def enumerate_monomials(valuations, bound: int):
    """All exponent tuples e with sum(e_i * valuations_i) <= bound."""
    n = len(valuations)
    out = []

    def rec(i, prefix, remaining):
        if i == n:
            out.append(tuple(prefix))
            return
        v = valuations[i]
        e = 0
        while e * v <= remaining:
            rec(i + 1, prefix + [e], remaining - e * v)
            e += 1

    rec(0, [], bound)
    return out


def _row_plan(monomials, valuations, t_indices):
    t_singles, pure2, mixed2, singles, consts = [], [], [], [], []
    for m in monomials:
        deg = mono_degree(m)
        val = mono_valuation(m, valuations)
        has_t = any(m[i] for i in t_indices)
        if deg == 0:
            consts.append((val, m))
        elif deg == 1:
            (t_singles if has_t else singles).append((val, m))
        elif has_t:
            mixed2.append((val, deg, m))
        else:
            pure2.append((val, deg, m))
    t_singles.sort()
    pure2.sort()
    mixed2.sort()
    singles.sort()
    plan = [m for _, m in t_singles]
    plan += [m for _, _, m in pure2]
    plan += [m for _, _, m in mixed2]
    plan += [m for _, m in singles]
    plan += [m for _, m in consts]
    return plan, {m for _, m in t_singles}


def _series_cache(gen_series, monomials, bound):
    """Series image of every monomial, as raw dicts, by incremental products."""
    cache: dict[Monomial, dict] = {}
    n = len(gen_series)
    zero = (0,) * n
    cache[zero] = {0: Fraction(1)}
    gdicts = [g.coeffs for g in gen_series]

    def build(m: Monomial) -> dict:
        got = cache.get(m)
        if got is not None:
            return got
        i = max(k for k in range(n) if m[k])
        parent = list(m)
        parent[i] -= 1
        base = build(tuple(parent))
        g = gdicts[i]
        acc: dict[int, Fraction] = {}
        for e1, c1 in base.items():
            for e2, c2 in g.items():
                e = e1 + e2
                if e <= bound:
                    v = acc.get(e, Fraction(0)) + c1 * c2
                    if v:
                        acc[e] = v
                    elif e in acc:
                        del acc[e]
        cache[m] = acc
        return acc

    for m in sorted(monomials, key=mono_degree):
        build(m)
    return cache


def eliminate(
    gen_series,
    names,
    valuations,
    bound: int,
    *,
    t_indices=(),
    keep_kernel: bool = True,
    forbid_linear_kernel: bool = False,
) -> EliminationResult:
    """Order-pivoted exact echelon over the monomial series images."""
    nvars = len(names)
    monomials = enumerate_monomials(valuations, bound)
    plan, t_set = _row_plan(monomials, valuations, t_indices)
    cache = _series_cache(gen_series, monomials, bound)

    pivots: dict[int, StairRow] = {}
    kernel: list[Poly] = []
    support: set[Monomial] = set()
    witness: dict[Monomial, int] = {}
    linear_bad: list[Monomial] = []

    for m in plan:
        series = dict(cache[m])
        poly_terms = {m: Fraction(1)}
        phase_a = mono_degree(m) >= 2 or m in t_set
        while True:
            if not series:
                ordv = INF
            else:
                ordv = min(series)
            if ordv is INF or ordv > bound:
                if keep_kernel:
                    p = Poly(nvars)
                    p.terms = poly_terms
                    idx = len(kernel)
                    kernel.append(p)
                    for mm in poly_terms:
                        support.add(mm)
                        witness.setdefault(mm, idx)
                        if mono_degree(mm) == 1:
                            linear_bad.append(mm)
                break
            row = pivots.get(ordv)
            if row is None:
                lead = series.pop(ordv)
                norm_series = {ordv: Fraction(1)}
                for e, c in series.items():
                    norm_series[e] = c / lead
                norm_poly = {mm: c / lead for mm, c in poly_terms.items()}
                p = Poly(nvars)
                p.terms = norm_poly
                pivots[ordv] = StairRow(
                    order=ordv,
                    series=norm_series,
                    poly=p,
                    phase_a=phase_a,
                    t_single=m in t_set,
                )
                break
            c = series[ordv]
            for e, cc in row.series.items():
                v = series.get(e, Fraction(0)) - c * cc
                if v:
                    series[e] = v
                elif e in series:
                    del series[e]
            for mm, cc in row.poly.terms.items():
                v = poly_terms.get(mm, Fraction(0)) - c * cc
                if v:
                    poly_terms[mm] = v
                elif mm in poly_terms:
                    del poly_terms[mm]
            phase_a = phase_a and row.phase_a

    if forbid_linear_kernel and linear_bad:
        raise RedundantGeneratorError(
            "a defining relation has a linear term (embedding dimension "
            "drops); re-enter a smaller presentation"
        )

    # Fully reduce each staircase row against later pivots, staying inside
    # phase A for phase-A rows so their supports keep degree >= 2.
    for m0 in sorted(pivots, reverse=True):
        row = pivots[m0]
        while True:
            reducible = [
                k
                for k in row.series
                if k != m0
                and k in pivots
                and not (row.phase_a and not pivots[k].phase_a)
            ]
            if not reducible:
                break
            e = min(reducible)
            other = pivots[e]
            c = row.series[e]
            for k, cc in other.series.items():
                v = row.series.get(k, Fraction(0)) - c * cc
                if v:
                    row.series[k] = v
                elif k in row.series:
                    del row.series[k]
            row.poly = row.poly.sub(other.poly.scale(c))

    staircase = StaircaseBasis(
        names=tuple(names),
        valuations=tuple(valuations),
        rows=pivots,
        bound=bound,
    )
    return EliminationResult(
        staircase=staircase,
        attained=frozenset(pivots),
        kernel=kernel,
        support=frozenset(support),
        witness=witness,
        linear_kernel_monomials=linear_bad,
    )


def conductor_of(attained, bound: int) -> int:
    """Least c with [c, bound] entirely attained."""
    c = bound + 1
    for v in range(bound, -1, -1):
        if v in attained:
            c = v
        else:
            break
    if c > bound:
        raise ArithmeticError("no attained tail below the precision bound")
    return c


def semigroup_from_elimination(res: EliminationResult, bound: int) -> ValueSemigroup:
    c = conductor_of(res.attained, bound)
    gaps = tuple(v for v in range(c) if v not in res.attained)
    return ValueSemigroup(
        attained=res.attained, conductor=c, gaps=gaps, bound=bound
    )


@dataclass
class BranchAnalysis:
    """Everything the certification pipeline needs about one branch."""

    branch: Branch
    semigroup: ValueSemigroup
    staircase: StaircaseBasis
    kernel: list
    support: frozenset
    witness: dict

    @property
    def conductor(self) -> int:
        return self.semigroup.conductor

    def extension_gap_values(self):
        return extension_gaps(self.semigroup, self.branch.valuations[0])

    def witness_for(self, m: Monomial):
        idx = self.witness.get(m)
        return None if idx is None else self.kernel[idx]


def analyze_branch(branch: Branch) -> BranchAnalysis:
    """Value semigroup, staircase, and defining-ideal kernel of a branch."""
    res = eliminate(
        list(branch.generators),
        branch.names,
        branch.valuations,
        branch.precision,
        keep_kernel=True,
        forbid_linear_kernel=True,
    )
    vs = semigroup_from_elimination(res, branch.precision)
    # The numerical semigroup of the valuations is always attained; this
    # certifies the conductor computation (the tail [F+1, B] is covered).
    if branch.frobenius + 1 > branch.precision:  # pragma: no cover
        raise ArithmeticError("precision below Frobenius bound")
    if vs.conductor > branch.frobenius + 1:
        raise ArithmeticError(
            "conductor exceeds Frobenius bound; elimination inconsistent"
        )
    return BranchAnalysis(
        branch=branch,
        semigroup=vs,
        staircase=res.staircase,
        kernel=res.kernel,
        support=res.support,
        witness=res.witness,
    )


def value_semigroup(branch: Branch):
    """(ValueSemigroup, StaircaseBasis) of a normalized branch."""
    analysis = analyze_branch(branch)
    return analysis.semigroup, analysis.staircase


def conductor(vs: ValueSemigroup) -> int:
    return vs.conductor


def extension_gaps(vs: ValueSemigroup, a1: int):
    """The gaps b_1 < ... < b_s of v(R) inside [c - a1, c - 1]."""
    c = vs.conductor
    return tuple(
        v for v in range(max(c - a1, 0), c) if v not in vs.attained
    )


def divide_by_staircase(
    sigma: TruncatedSeries,
    sb: StaircaseBasis,
    floor: int = 0,
    *,
    m2_only: bool = False,
):
    """Greedy leading-term elimination of sigma against the staircase.

    Returns (expression Poly over the staircase frame, sub-precision
    residual).  Every residual order encountered must be attained; with
    m2_only the representative used must be supported in degree >= 2
    (single-T rows also qualify: they are conductor elements of S).
    """
    p = sigma.prec
    if not sigma.is_zero() and sigma.order() < floor:
        raise ValueError(
            f"series order {sigma.order()} below the division floor {floor}"
        )
    residual = dict(sigma.coeffs)
    expr = Poly.zero(len(sb.names))
    while residual:
        ordv = min(residual)
        if ordv > p:
            break
        row = sb.rows.get(ordv)
        if row is None:
            raise StaircaseGapError(
                f"residual order {ordv} is not attained: staircase division "
                "is stuck below the conductor"
            )
        if m2_only and not (row.phase_a or row.t_single):
            raise NotExpressibleInM2(
                f"order {ordv} only has a representative with a linear term"
            )
        c = residual[ordv]
        for e, cc in row.series.items():
            if e > p:
                continue
            v = residual.get(e, Fraction(0)) - c * cc
            if v:
                residual[e] = v
            elif e in residual:
                del residual[e]
        expr = expr.add(row.poly.scale(c))
    return expr, TruncatedSeries(residual, p)
