"""Differential elements, the torsion test, and finite-dimensional quotients.

A differential element is a coefficient column over the frame generators
(dx_1 ... dx_n [, dT_1 ... dT_s]); it is torsion when the series images of
its coefficients pair to zero against the t-derivatives of the generators.
Nonvanishing in the full module is certified by mapping to the differential
module of an artinian quotient: a nonzero class downstairs lifts upstairs,
while a zero class proves nothing.  Every quotient used by the certificates
is passed through one uniform engine (build_artinian + omega_of_quotient).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .ideals import MonomialIdeal
from .poly import Monomial, Poly, mono_degree, mono_divides, mono_mul
from .series import TruncatedSeries


@dataclass
class RingElement:
    """An element written in the generators together with its series image."""

    poly: Poly
    series: TruncatedSeries


@dataclass
class DifferentialElement:
    names: tuple  # frame variable names
    gens: tuple  # generator series, same length as names
    coefficients: tuple  # RingElement per frame variable

    def __post_init__(self):
        if len(self.coefficients) != len(self.names):
            raise ValueError("coefficient count does not match the frame")

    def poly_column(self):
        return [c.poly for c in self.coefficients]

    def is_zero_column(self) -> bool:
        return all(c.poly.is_zero() for c in self.coefficients)

    def scale(self, c) -> "DifferentialElement":
        return DifferentialElement(
            self.names,
            self.gens,
            tuple(
                RingElement(r.poly.scale(c), r.series.scale(c))
                for r in self.coefficients
            ),
        )

    def add(self, other: "DifferentialElement") -> "DifferentialElement":
        coeffs = []
        for r1, r2 in zip(self.coefficients, other.coefficients):
            p = min(r1.series.prec, r2.series.prec)
            coeffs.append(
                RingElement(
                    r1.poly.add(r2.poly),
                    r1.series.truncate(p).add(r2.series.truncate(p)),
                )
            )
        return DifferentialElement(self.names, self.gens, tuple(coeffs))


def make_element(names, gens, polys) -> DifferentialElement:
    coeffs = tuple(
        RingElement(p, p.evaluate(list(gens))) for p in polys
    )
    return DifferentialElement(tuple(names), tuple(gens), coeffs)


def torsion_test(w: DifferentialElement) -> bool:
    """Precision-aware check that sum_i r_i * d(gen_i)/dt vanishes."""
    prec = None
    terms = []
    for r, g in zip(w.coefficients, w.gens):
        dg = g.derivative()
        p = min(r.series.prec, dg.prec)
        terms.append((r.series.truncate(p), dg.truncate(p)))
        prec = p if prec is None else min(prec, p)
    acc = TruncatedSeries.zero(prec)
    for rs, dg in terms:
        acc = acc.add(rs.truncate(prec).mul(dg.truncate(prec)))
    return acc.is_zero()


# -- artinian quotients -------------------------------------------------


@dataclass
class QuotientData:
    """Defining data of a finite-dimensional quotient of the ambient ring.

    The monomial part must contain a power of every frame variable: that is
    the syntactic finite-dimension certificate.  Polynomial generators are
    allowed (e.g. x_n - sum delta_k T_k for the modified-generator ideals).
    """

    names: tuple
    monomial_gens: tuple
    poly_gens: tuple = ()
    label: str = ""

    def describe(self):
        from .poly import mono_str

        return {
            "label": self.label,
            "monomials": [mono_str(m, self.names) for m in self.monomial_gens],
            "polynomials": [p.to_str(self.names) for p in self.poly_gens],
        }


class NotFiniteDimensional(ValueError):
    pass


def m2_quotient(names, label="m^2") -> QuotientData:
    """The square of the maximal ideal as a QuotientData."""
    n = len(names)
    gens = []
    for i in range(n):
        for j in range(i, n):
            e = [0] * n
            e[i] += 1
            e[j] += 1
            gens.append(tuple(e))
    return QuotientData(tuple(names), tuple(gens), (), label)


def variables_quotient(names, indices, extra_monomials=(), poly_gens=(), label=""):
    """Ideal generated by the chosen variables plus extra monomial data."""
    n = len(names)
    gens = []
    for i in indices:
        e = [0] * n
        e[i] = 1
        gens.append(tuple(e))
    return QuotientData(
        tuple(names), tuple(gens) + tuple(extra_monomials), tuple(poly_gens), label
    )


class ArtinianQuotient:
    def __init__(self, q: QuotientData):
        self.data = q
        n = len(q.names)
        ideal = MonomialIdeal(
            nvars=n, gens=tuple(sorted(set(q.monomial_gens)))
        )
        if not ideal.contains_power_of_each_variable():
            raise NotFiniteDimensional(
                "monomial part lacks a power of some variable; no finite "
                "dimension certificate"
            )
        self.monomial_ideal = ideal
        caps = []
        for i in range(n):
            cap = min(
                g[i]
                for g in ideal.gens
                if g[i] > 0 and all(g[j] == 0 for j in range(n) if j != i)
            )
            caps.append(cap)
        standard = []

        def rec(i, prefix):
            if i == n:
                m = tuple(prefix)
                if not ideal.member(m):
                    standard.append(m)
                return
            for e in range(caps[i]):
                rec(i + 1, prefix + [e])

        rec(0, [])
        standard.sort(key=lambda m: (mono_degree(m), m))
        self.standard = standard
        self.index = {m: i for i, m in enumerate(standard)}
        self.rows: dict[int, dict] = {}
        for p in q.poly_gens:
            for mu in standard:
                vec = self._raw_reduce(p.mul_monomial(mu))
                self._add_row(vec)

    # vectors are dicts index -> Fraction over the standard basis

    def _raw_reduce(self, p: Poly) -> dict:
        vec: dict[int, Fraction] = {}
        for m, c in p.terms.items():
            idx = self.index.get(m)
            if idx is None:
                continue  # monomial lies in the monomial part
            v = vec.get(idx, Fraction(0)) + c
            if v:
                vec[idx] = v
            elif idx in vec:
                del vec[idx]
        return vec

    def _reduce_vec(self, vec: dict) -> dict:
        while True:
            k = None
            for idx in sorted(vec, reverse=True):
                if idx in self.rows:
                    k = idx
                    break
            if k is None:
                return vec
            c = vec[k]
            for idx, cc in self.rows[k].items():
                v = vec.get(idx, Fraction(0)) - c * cc
                if v:
                    vec[idx] = v
                elif idx in vec:
                    del vec[idx]

    def _add_row(self, vec: dict):
        vec = self._reduce_vec(dict(vec))
        if not vec:
            return
        k = max(vec)
        lead = vec[k]
        self.rows[k] = {i: c / lead for i, c in vec.items()}

    def reduce_poly(self, p: Poly) -> dict:
        """Canonical vector of p's class over the standard monomials."""
        return self._reduce_vec(self._raw_reduce(p))

    @property
    def dimension(self) -> int:
        return len(self.standard) - len(self.rows)

    def multiply(self, v1: Poly, v2: Poly) -> dict:
        return self.reduce_poly(v1.mul(v2))

    def multiplication_table(self):
        """Products of standard-basis classes, as reduced vectors."""
        table = {}
        for m1 in self.standard:
            for m2 in self.standard:
                table[(m1, m2)] = self.reduce_poly(
                    Poly.monomial(mono_mul(m1, m2))
                )
        return table


def build_artinian(q: QuotientData) -> ArtinianQuotient:
    return ArtinianQuotient(q)


class OmegaOfQuotient:
    """The differential module of an artinian quotient, as a Q-vector space.

    Ambient space: free module on dz_i over the quotient; relation subspace:
    span of mu * d(f) for every defining generator f (monomial and
    polynomial) and every standard monomial mu.
    """

    def __init__(self, A: ArtinianQuotient):
        self.A = A
        n = len(A.data.names)
        self.nvars = n
        self.block = len(A.standard)
        self.rows: dict[int, dict] = {}
        defining = [Poly.monomial(m) for m in A.data.monomial_gens]
        defining += list(A.data.poly_gens)
        for f in defining:
            parts = [f.partial(i) for i in range(n)]
            if all(p.is_zero() for p in parts):
                continue
            for mu in A.standard:
                vec: dict[int, Fraction] = {}
                for i, p in enumerate(parts):
                    if p.is_zero():
                        continue
                    comp = A.reduce_poly(p.mul_monomial(mu))
                    for idx, c in comp.items():
                        pos = i * self.block + idx
                        v = vec.get(pos, Fraction(0)) + c
                        if v:
                            vec[pos] = v
                        elif pos in vec:
                            del vec[pos]
                self._add_row(vec)

    def _reduce_vec(self, vec: dict) -> dict:
        while True:
            k = None
            for idx in sorted(vec, reverse=True):
                if idx in self.rows:
                    k = idx
                    break
            if k is None:
                return vec
            c = vec[k]
            for idx, cc in self.rows[k].items():
                v = vec.get(idx, Fraction(0)) - c * cc
                if v:
                    vec[idx] = v
                elif idx in vec:
                    del vec[idx]

    def _add_row(self, vec: dict):
        vec = self._reduce_vec(dict(vec))
        if not vec:
            return
        k = max(vec)
        lead = vec[k]
        self.rows[k] = {i: c / lead for i, c in vec.items()}

    @property
    def dimension(self) -> int:
        # class vectors are canonical A-vectors per dz block, so each echelon
        # row removes exactly one dimension from nvars * dim(A)
        return self.nvars * self.A.dimension - len(self.rows)

    def class_of(self, coeff_polys) -> dict:
        """Canonical class vector of sum coeff_i dz_i."""
        vec: dict[int, Fraction] = {}
        for i, p in enumerate(coeff_polys):
            comp = self.A.reduce_poly(p)
            for idx, c in comp.items():
                vec[i * self.block + idx] = c
        return self._reduce_vec(vec)

    def class_nonzero(self, coeff_polys) -> bool:
        return bool(self.class_of(coeff_polys))

    def rank_of_family(self, families) -> int:
        """Rank of the classes of the given coefficient columns."""
        ech: dict[int, dict] = {}

        def reduce_and_add(vec):
            while vec:
                k = max(vec)
                row = ech.get(k)
                if row is None:
                    lead = vec[k]
                    ech[k] = {i: c / lead for i, c in vec.items()}
                    return
                c = vec[k]
                for idx, cc in row.items():
                    v = vec.get(idx, Fraction(0)) - c * cc
                    if v:
                        vec[idx] = v
                    elif idx in vec:
                        del vec[idx]

        for polys in families:
            reduce_and_add(dict(self.class_of(polys)))
        return len(ech)


def omega_for(q: QuotientData) -> OmegaOfQuotient:
    return OmegaOfQuotient(build_artinian(q))


def omega_of_quotient(A: ArtinianQuotient) -> OmegaOfQuotient:
    return OmegaOfQuotient(A)


def class_nonzero_mod(w: DifferentialElement, q: QuotientData) -> bool:
    """True when w's class survives in the quotient's differential module.

    A true answer certifies that w is nonzero upstream; a false answer
    carries no information (quotient ideals built from truncated relation
    data can only lose certificates, never fabricate them).
    """
    return omega_for(q).class_nonzero(w.poly_column())


def independence_rank(ws, quotients) -> int:
    """Rank of the family's classes across one or more quotients.

    The quotient reductions are applied jointly (classes concatenated), so
    the result lower-bounds the rank of the family upstream.
    """
    if isinstance(quotients, QuotientData):
        quotients = [quotients]
    omegas = [omega_for(q) for q in quotients]
    ech: dict[int, dict] = {}
    rank = 0
    offsets = []
    off = 0
    for om in omegas:
        offsets.append(off)
        off += om.nvars * om.block
    for w in ws:
        polys = w.poly_column() if isinstance(w, DifferentialElement) else w
        vec: dict[int, Fraction] = {}
        for om, o in zip(omegas, offsets):
            for idx, c in om.class_of(polys).items():
                vec[o + idx] = c
        while vec:
            k = max(vec)
            row = ech.get(k)
            if row is None:
                lead = vec[k]
                ech[k] = {i: c / lead for i, c in vec.items()}
                rank += 1
                break
            c = vec[k]
            for idx, cc in row.items():
                v = vec.get(idx, Fraction(0)) - c * cc
                if v:
                    vec[idx] = v
                elif idx in vec:
                    del vec[idx]
    return rank


def monomial_zero_test(K: MonomialIdeal, m: Monomial, u: int) -> bool:
    """Decide m*dx_u = 0 in the differential module of k[[X]]/K.

    Pure monomial-ideal arithmetic: m*dx_u vanishes iff X_u^{m_u+1} lies in
    K, or every partial derivative of m*X_u with respect to the other
    variables lies in K (zero derivatives count as members).
    """
    if K.member(m):
        raise ValueError("the monomial lies in the ideal; class is trivially 0")
    if m[u] < 1:
        raise ValueError("the differential index must appear in the monomial")
    n = K.nvars
    power = tuple(
        (m[u] + 1) if i == u else 0 for i in range(n)
    )
    if K.member(power):
        return True
    mxu = tuple(e + (1 if i == u else 0) for i, e in enumerate(m))
    for i in range(n):
        if i == u:
            continue
        if mxu[i] == 0:
            continue  # derivative vanishes, trivially in K
        d = tuple(e - (1 if k == i else 0) for k, e in enumerate(mxu))
        if not K.member(d):
            return False
    return True
