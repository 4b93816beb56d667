"""Parametrized curve branches R = k[[a1*t^{a_1}, ..., an*t^{a_n}]] over Q.

A branch is given by finitely many polynomial generators in the uniformizer
t.  Construction normalizes the presentation: generators are sorted by order,
leading coefficients are scaled to 1, and any generator whose valuation lies
in the numerical semigroup of the earlier valuations is reduced until the
valuations form a minimal generating set.  The working precision is
B = Frobenius(<a_1,...,a_n>) + 1 + 2*a_n, enough to certify the conductor and
to absorb the precision losses of products and derivatives downstream.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .series import INF, TruncatedSeries

_TERM_RE = re.compile(
    r"^(?P<coeff>[+-]?\d+(?:/\d+)?)?(?:\*)?"
    r"(?P<tpart>t(?:\^(?P<exp>\d+))?)?$"
)


class BranchInputError(ValueError):
    """Malformed or mathematically inadmissible branch input."""


class RedundantGeneratorError(BranchInputError):
    """A generator lies in the ring generated by the others."""


@dataclass(frozen=True)
class Branch:
    """A normalized branch: x_i = alpha_i * t^{a_i} with a_1 < ... < a_n."""

    generators: tuple  # TruncatedSeries at precision B, leading coefficient 1
    valuations: tuple  # strictly increasing ints
    precision: int
    frobenius: int  # Frobenius number of <a_1,...,a_n>
    exact_polys: "tuple | None" = None  # original exact dicts when available

    @property
    def n(self) -> int:
        return len(self.generators)

    @property
    def names(self):
        return tuple(f"x{i+1}" for i in range(self.n))

    def unit(self, j: int) -> TruncatedSeries:
        """alpha_j = x_j / t^{a_j}, at its honest precision B - a_j."""
        return self.generators[j].shift(-self.valuations[j])

    def unit_order(self, j: int):
        """o(alpha_j): least positive exponent of alpha_j, INF if constant."""
        if not 0 <= j < self.n:
            raise IndexError(f"generator index {j} out of range")
        u = self.unit(j)
        tail = {e: c for e, c in u.coeffs.items() if e >= 1}
        return min(tail) if tail else INF

    def unit_orders(self):
        return tuple(self.unit_order(j) for j in range(self.n))


def parse_generators_text(text: str):
    """Parse 't^3; t^4 + 2*t^5; ...' into exact {exp: Fraction} dicts."""
    gens = []
    for g_index, chunk in enumerate(text.split(";")):
        chunk = chunk.strip()
        if not chunk:
            continue
        poly: dict[int, Fraction] = {}
        normalized = chunk.replace("-", "+-").replace(" ", "")
        terms = [s for s in normalized.split("+") if s]
        if not terms:
            raise BranchInputError(
                f"generator {g_index + 1}: empty expression"
            )
        for term in terms:
            m = _TERM_RE.match(term)
            if not m or (m.group("coeff") is None and m.group("tpart") is None):
                raise BranchInputError(
                    f"generator {g_index + 1}: cannot parse term {term!r}"
                )
            coeff = Fraction(m.group("coeff") or 1)
            if m.group("tpart") is None:
                exp = 0
            elif m.group("exp") is None:
                exp = 1
            else:
                exp = int(m.group("exp"))
            poly[exp] = poly.get(exp, Fraction(0)) + coeff
        poly = {e: c for e, c in poly.items() if c != 0}
        gens.append(poly)
    return gens


def parse_generators_json(data):
    gens = []
    for g in data["generators"]:
        poly = {}
        for e, c in g:
            e = int(e)
            poly[e] = poly.get(e, Fraction(0)) + Fraction(str(c))
        gens.append({e: c for e, c in poly.items() if c != 0})
    return gens


def numerical_semigroup_members(gens, bound: int):
    """Membership table of <gens> on [0, bound] by forward closure."""
    member = [False] * (bound + 1)
    member[0] = True
    for v in range(1, bound + 1):
        for a in gens:
            if a <= v and member[v - a]:
                member[v] = True
                break
    return member


def frobenius_number(gens) -> int:
    """Largest integer not in <gens>; requires gcd(gens) = 1.

    Brute-force closure; the scan stops once min(gens) consecutive members
    appear, after which every larger integer is a member.  Returns -1 for
    the full semigroup.
    """
    g = 0
    for a in gens:
        g = gcd(g, a)
    if g != 1:
        raise ValueError("gcd of generators must be 1")
    a1 = min(gens)
    if a1 == 1:
        return -1
    bound = 2 * max(gens) ** 2
    while True:
        member = numerical_semigroup_members(gens, bound)
        frob = -1
        run = 0
        for v in range(bound + 1):
            if member[v]:
                run += 1
                if run >= a1:
                    return frob
            else:
                run = 0
                frob = v
        bound *= 2


def _order_of(poly: dict) -> "int | float":
    return min(poly, default=INF)


def _scale_leading(poly: dict) -> dict:
    lead = poly[min(poly)]
    return {e: c / lead for e, c in poly.items()}


def _poly_mul(p: dict, q: dict, bound: int) -> dict:
    acc: dict[int, Fraction] = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = e1 + e2
            if e <= bound:
                acc[e] = acc.get(e, Fraction(0)) + c1 * c2
    return {e: c for e, c in acc.items() if c != 0}


def _decompose(value: int, parts):
    """Exponent vector over parts summing to value, or None if not in <parts>."""
    member = numerical_semigroup_members(set(parts), value)
    if not member[value]:
        return None
    vec = [0] * len(parts)
    v = value
    while v:
        for i, a in enumerate(parts):
            if a <= v and member[v - a]:
                vec[i] += 1
                v -= a
                break
        else:  # pragma: no cover - membership table guarantees progress
            return None
    return vec


def _normalize_once(polys, work_bound: int):
    """One full normalization sweep at the given working precision."""
    polys = [
        {e: c for e, c in p.items() if e <= work_bound} for p in polys
    ]
    if any(not p for p in polys):
        raise RedundantGeneratorError(
            "a generator vanishes within the working precision"
        )
    changed = True
    while changed:
        changed = False
        polys = [p for p in polys if p]
        polys.sort(key=_order_of)
        for i in range(len(polys)):
            polys[i] = _scale_leading(polys[i])
        for i in range(1, len(polys)):
            a_i = _order_of(polys[i])
            earlier = [_order_of(polys[j]) for j in range(i)]
            # equal valuations: subtract a scalar multiple of the earlier
            # generator (earlier index survives)
            if a_i in earlier:
                j = earlier.index(a_i)
                for e, c in polys[j].items():
                    v = polys[i].get(e, Fraction(0)) - c
                    if v:
                        polys[i][e] = v
                    elif e in polys[i]:
                        del polys[i][e]
                polys[i] = {e: c for e, c in polys[i].items() if e <= work_bound}
                if not polys[i]:
                    raise RedundantGeneratorError(
                        "a generator reduces to zero within precision; "
                        "re-enter a smaller presentation"
                    )
                changed = True
                break
            decomp = _decompose(a_i, earlier)
            if decomp is not None:
                prod = {0: Fraction(1)}
                for j, e in enumerate(decomp):
                    for _ in range(e):
                        prod = _poly_mul(prod, polys[j], work_bound)
                for e, c in prod.items():
                    v = polys[i].get(e, Fraction(0)) - c
                    if v:
                        polys[i][e] = v
                    elif e in polys[i]:
                        del polys[i][e]
                if not polys[i]:
                    raise RedundantGeneratorError(
                        "a generator reduces to zero within precision; "
                        "re-enter a smaller presentation"
                    )
                changed = True
                break
    polys.sort(key=_order_of)
    return polys


def _precision_for(valuations, margin: int = 0) -> int:
    frob = frobenius_number(valuations)
    return frob + 1 + 2 * max(valuations) + margin


def normalize_polys(polys, margin: int = 0):
    """Iterate normalization and precision choice until both stabilize."""
    if not polys or any(not p for p in polys):
        raise BranchInputError("zero generator")
    for p in polys:
        if _order_of(p) <= 0:
            raise BranchInputError("generators must have positive order")
    if len(polys) == 1:
        raise BranchInputError(
            "a single-generator branch is regular and its differential "
            "module is free; nothing to certify"
        )
    vals = sorted(_order_of(p) for p in polys)
    g = 0
    for a in vals:
        g = gcd(g, a)
    # provisional bound; refined below once the final valuations are known
    work = (
        _precision_for(vals, margin)
        if g == 1
        else 2 * max(vals) * max(vals)
    )
    for _ in range(8):
        reduced = _normalize_once(polys, work)
        new_vals = [_order_of(p) for p in reduced]
        if len(new_vals) < 2:
            raise BranchInputError(
                "normalization left fewer than 2 generators; branch is regular"
            )
        g = 0
        for a in new_vals:
            g = gcd(g, a)
        if g != 1:
            raise BranchInputError(
                f"gcd of valuations is {g} != 1: not a branch with "
                "integral closure k[[t]]"
            )
        needed = _precision_for(new_vals, margin)
        if needed <= work:
            return reduced, new_vals, needed
        work = needed
    raise BranchInputError("normalization failed to stabilize")


def parse_branch(source, margin: int = 0) -> Branch:
    """Build a normalized Branch from text, JSON dict, or exact poly dicts."""
    if isinstance(source, str):
        polys = parse_generators_text(source)
    elif isinstance(source, dict):
        polys = parse_generators_json(source)
    else:
        polys = [
            {int(e): Fraction(c) for e, c in p.items()} for p in source
        ]
    reduced, vals, bound = normalize_polys(polys, margin)
    frob = frobenius_number(vals)
    gens = tuple(
        TruncatedSeries({e: c for e, c in p.items() if e <= bound}, bound)
        for p in reduced
    )
    return Branch(
        generators=gens,
        valuations=tuple(vals),
        precision=bound,
        frobenius=frob,
        exact_polys=tuple(dict(p) for p in reduced),
    )


def normalize(b: Branch) -> Branch:
    """Re-run normalization; idempotent on already-normalized branches."""
    if b.exact_polys is not None:
        return parse_branch(b.exact_polys)
    reduced, vals, bound = normalize_polys(
        [dict(g.coeffs) for g in b.generators]
    )
    frob = frobenius_number(vals)
    gens = tuple(
        TruncatedSeries({e: c for e, c in p.items() if e <= bound}, bound)
        for p in reduced
    )
    return Branch(gens, tuple(vals), bound, frob, None)


def monomialize_first(b: Branch, d: int):
    """Change uniformizer s = beta*t with beta^{a_d} = alpha_d.

    Returns (branch in the new uniformizer, beta, beta_inverse), both beta
    series expressed in the old uniformizer.  Generator d of the new branch
    is exactly the monomial s^{a_d}; all valuations are unchanged.
    """
    if not 0 <= d < b.n:
        raise IndexError(f"generator index {d} out of range")
    alpha = b.unit(d)  # precision B - a_d
    beta = alpha.nth_root_unit(b.valuations[d])
    beta_inv = beta.invert_unit()
    if beta == TruncatedSeries.one(alpha.prec):
        return b, beta, beta_inv
    # the substituted generators are honest only to precision B - a_d + 1
    new_prec = alpha.prec + 1
    s_of_t = beta.shift(1)  # s = beta * t, precision B - a_d + 1
    t_of_s = s_of_t.reverse()
    new_gens = []
    for j in range(b.n):
        g = b.generators[j].truncate(new_prec).substitute(t_of_s)
        if g.order() != b.valuations[j]:
            raise ArithmeticError("valuation changed under monomialization")
        new_gens.append(g)
    # generator d must become an exact monomial within precision
    target = TruncatedSeries.monomial(b.valuations[d], new_prec)
    if not new_gens[d].sub(target).is_zero():
        raise ArithmeticError("monomialization did not produce a monomial")
    new_gens[d] = target
    return (
        Branch(
            generators=tuple(new_gens),
            valuations=b.valuations,
            precision=new_prec,
            frobenius=b.frobenius,
            exact_polys=None,
        ),
        beta,
        beta_inv,
    )
