"""Monomial ideals and bounded membership in the monomial support ideal.

The monomial support ideal Mono(I) of the defining ideal I is generated by
all monomials appearing in elements of I.  Membership of a monomial m' in
that generating set is decided by a span criterion: m' appears in some exact
kernel element if and only if its series image lies, modulo t^(B+1), in the
rational span of the images of the other monomials of valuation <= B.

Validity of the criterion at every valuation <= B (not only below the
conductor): given the bounded relation, the residual has order > B >= F + 1,
so it can be rewritten as a series in monomials of valuation > B; those
correction monomials all differ from m', whose valuation is <= B, so the
exact kernel element keeps m' in its support.  Conversely any exact kernel
element truncates to a bounded relation.  The kernel computed by the
elimination engine therefore has support-union exactly equal to the set of
Mono(I) generator monomials of valuation <= B, and divisor folding decides
ideal membership.
"""

from __future__ import annotations

from dataclasses import dataclass

from .poly import (
    Monomial,
    Poly,
    mono_degree,
    mono_divides,
    mono_divisors,
    mono_str,
    mono_valuation,
)
from .semigroup import BranchAnalysis, eliminate


class UndecidableAtPrecision(ValueError):
    """The query monomial's valuation exceeds the precision bound."""


def minimalize(gens, nvars=None):
    """Divisibility-reduced antichain generating the same monomial ideal."""
    gens = sorted(set(gens), key=lambda m: (mono_degree(m), m))
    out = []
    for m in gens:
        if not any(mono_divides(g, m) for g in out):
            out = [g for g in out if not mono_divides(m, g)]
            out.append(m)
    if nvars is None and not out:
        raise ValueError("cannot infer variable count from empty generators")
    return MonomialIdeal(
        nvars=nvars if nvars is not None else len(out[0]),
        gens=tuple(sorted(out)),
    )


@dataclass(frozen=True)
class MonomialIdeal:
    nvars: int
    gens: tuple  # antichain of exponent tuples

    def member(self, m: Monomial) -> bool:
        if len(m) != self.nvars:
            raise ValueError("monomial lives in the wrong variable frame")
        return any(mono_divides(g, m) for g in self.gens)

    def contains_power_of_each_variable(self) -> bool:
        for i in range(self.nvars):
            if not any(
                g[i] > 0 and all(g[j] == 0 for j in range(self.nvars) if j != i)
                for g in self.gens
            ):
                return False
        return True

    def to_str(self, names):
        return "(" + ", ".join(mono_str(g, names) for g in self.gens) + ")"


def monomial_membership(ideal: MonomialIdeal, m: Monomial) -> bool:
    """True iff some generator divides m."""
    return ideal.member(m)


@dataclass
class MonoReport:
    monomial: Monomial
    member: bool
    witness: "Poly | None"
    witness_divisor: "Monomial | None"
    tested_divisors: list


def mono_support_membership(analysis: BranchAnalysis, m: Monomial) -> MonoReport:
    """Decide m in Mono(I) with a witness kernel element when true.

    m is in Mono(I) iff some divisor of m of degree >= 2 appears in the
    support of an exact kernel element (I sits inside the square of the
    maximal ideal, so degree <= 1 divisors never occur).
    """
    vals = analysis.branch.valuations
    if len(m) != len(vals):
        raise ValueError("monomial lives in the wrong variable frame")
    if mono_valuation(m, vals) > analysis.branch.precision:
        raise UndecidableAtPrecision(
            "monomial valuation exceeds the precision bound; membership is "
            "undecidable at this precision"
        )
    tested = []
    for d in sorted(mono_divisors(m, min_degree=2), key=mono_degree):
        tested.append(d)
        if d in analysis.support:
            return MonoReport(
                monomial=m,
                member=True,
                witness=analysis.witness_for(d),
                witness_divisor=d,
                tested_divisors=tested,
            )
    return MonoReport(
        monomial=m,
        member=False,
        witness=None,
        witness_divisor=None,
        tested_divisors=tested,
    )


def relation_search(branch, valuation_bound: int):
    """Basis of the bounded linear relations among monomial series images.

    The output polynomials are elements of the defining ideal up to the given
    precision; they provide witnesses and build artinian quotients.
    """
    if valuation_bound > branch.precision:
        raise ValueError("valuation bound exceeds branch precision")
    gens = [g.truncate(valuation_bound) for g in branch.generators]
    res = eliminate(
        gens,
        branch.names,
        branch.valuations,
        valuation_bound,
        keep_kernel=True,
    )
    return res.kernel


def mono_support_ideal_upto(analysis: BranchAnalysis, valuation_bound: int):
    """Minimal generators of Mono(I) among monomials of valuation <= bound."""
    vals = analysis.branch.valuations
    gens = [
        m
        for m in analysis.support
        if mono_valuation(m, vals) <= valuation_bound
    ]
    if not gens:
        return MonomialIdeal(nvars=len(vals), gens=())
    return minimalize(gens, nvars=len(vals))
