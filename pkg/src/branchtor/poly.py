"""Sparse multivariate polynomials with rational coefficients.

Polynomials live over a *frame*: an ordered tuple of generator names such as
("x1", "x2", "x3") or ("x1", ..., "T1", ..., "Ts").  A monomial is an
exponent tuple of the frame's length.  These polynomials record how ring
elements are written in terms of the branch (or extension ring) generators;
their series images are obtained with ``evaluate``.
"""

from __future__ import annotations

from fractions import Fraction

from .series import TruncatedSeries

Monomial = tuple  # exponent tuple, one entry per frame variable


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def mono_divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def mono_degree(a: Monomial) -> int:
    return sum(a)

def mono_valuation(a: Monomial, valuations) -> int:
    return sum(e * v for e, v in zip(a, valuations))


def mono_divisors(a: Monomial, min_degree: int = 0):
    """All monomials dividing a (componentwise), with total degree bound."""
    out = [()]
    for e in a:
        out = [d + (i,) for d in out for i in range(e + 1)]
    return [d for d in out if mono_degree(d) >= min_degree]


def mono_str(a: Monomial, names) -> str:
    parts = []
    for e, name in zip(a, names):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts) if parts else "1"


class Poly:
    """dict-backed polynomial: {exponent tuple: nonzero Fraction}."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms=None):
        self.nvars = nvars
        self.terms: dict[Monomial, Fraction] = {}
        if terms:
            for m, c in terms.items():
                c = c if isinstance(c, Fraction) else Fraction(c)
                if c != 0:
                    self.terms[m] = c

    @classmethod
    def zero(cls, nvars: int) -> "Poly":
        return cls(nvars)

    @classmethod
    def constant(cls, nvars: int, c) -> "Poly":
        return cls(nvars, {(0,) * nvars: Fraction(c)})

    @classmethod
    def variable(cls, nvars: int, i: int) -> "Poly":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): Fraction(1)})

    @classmethod
    def monomial(cls, m: Monomial, c=1) -> "Poly":
        return cls(len(m), {m: Fraction(c)})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, tuple(sorted(self.terms.items()))))

    def copy(self) -> "Poly":
        p = Poly(self.nvars)
        p.terms = dict(self.terms)
        return p

    def add(self, other: "Poly") -> "Poly":
        acc = dict(self.terms)
        for m, c in other.terms.items():
            v = acc.get(m, Fraction(0)) + c
            if v:
                acc[m] = v
            elif m in acc:
                del acc[m]
        p = Poly(self.nvars)
        p.terms = acc
        return p

    def sub(self, other: "Poly") -> "Poly":
        return self.add(other.neg())

    def neg(self) -> "Poly":
        p = Poly(self.nvars)
        p.terms = {m: -c for m, c in self.terms.items()}
        return p

    def scale(self, c) -> "Poly":
        c = c if isinstance(c, Fraction) else Fraction(c)
        if c == 0:
            return Poly(self.nvars)
        p = Poly(self.nvars)
        p.terms = {m: c * v for m, v in self.terms.items()}
        return p

    def mul(self, other: "Poly") -> "Poly":
        acc: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mul(m1, m2)
                v = acc.get(m, Fraction(0)) + c1 * c2
                if v:
                    acc[m] = v
                elif m in acc:
                    del acc[m]
        p = Poly(self.nvars)
        p.terms = acc
        return p

    def mul_monomial(self, m: Monomial, c=1) -> "Poly":
        c = c if isinstance(c, Fraction) else Fraction(c)
        p = Poly(self.nvars)
        p.terms = {mono_mul(m0, m): c0 * c for m0, c0 in self.terms.items()}
        return p

    __add__ = add
    __sub__ = sub
    __mul__ = mul
    __neg__ = neg

    def partial(self, i: int) -> "Poly":
        """Formal partial derivative with respect to variable i."""
        acc: dict[Monomial, Fraction] = {}
        for m, c in self.terms.items():
            if m[i] >= 1:
                m2 = list(m)
                m2[i] -= 1
                acc[tuple(m2)] = c * m[i]
        p = Poly(self.nvars)
        p.terms = acc
        return p

    def min_total_degree(self):
        return min((mono_degree(m) for m in self.terms), default=None)

    def support(self):
        return set(self.terms)

    def linear_coefficients(self) -> dict[int, Fraction]:
        """Coefficients of the degree-1 monomials, keyed by variable index."""
        out = {}
        for m, c in self.terms.items():
            if mono_degree(m) == 1:
                out[m.index(1)] = c
        return out

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def in_m2(self) -> bool:
        """True when every monomial has total degree >= 2."""
        return all(mono_degree(m) >= 2 for m in self.terms)

    def valuation(self, valuations) -> "int | float":
        """Least generator-valuation over the support (INF when zero)."""
        from .series import INF

        return min(
            (mono_valuation(m, valuations) for m in self.terms), default=INF
        )

    def drop_above_valuation(self, valuations, bound: int) -> "Poly":
        p = Poly(self.nvars)
        p.terms = {
            m: c
            for m, c in self.terms.items()
            if mono_valuation(m, valuations) <= bound
        }
        return p

    def evaluate(self, gens: list[TruncatedSeries]) -> TruncatedSeries:
        """Series image under generator i -> gens[i], at the common precision."""
        prec = min(g.prec for g in gens) if gens else 0
        gens = [g if g.prec == prec else g.truncate(prec) for g in gens]
        acc = TruncatedSeries.zero(prec)
        pow_cache: dict[tuple[int, int], TruncatedSeries] = {}

        def gen_pow(i: int, e: int) -> TruncatedSeries:
            key = (i, e)
            if key not in pow_cache:
                pow_cache[key] = gens[i].pow(e)
            return pow_cache[key]

        for m, c in self.terms.items():
            term = None
            for i, e in enumerate(m):
                if e:
                    f = gen_pow(i, e)
                    term = f if term is None else term.mul(f)
            if term is None:
                term = TruncatedSeries.one(prec)
            acc = acc.add(term.scale(c))
        return acc

    def to_str(self, names) -> str:
        if not self.terms:
            return "0"
        items = sorted(
            self.terms.items(), key=lambda kv: (mono_degree(kv[0]), kv[0])
        )
        parts = []
        for m, c in items:
            ms = mono_str(m, names)
            if ms == "1":
                s = str(c)
            elif c == 1:
                s = ms
            elif c == -1:
                s = f"-{ms}"
            else:
                s = f"{c}*{ms}"
            if parts and not s.startswith("-"):
                parts.append(f"+ {s}")
            elif parts:
                parts.append(f"- {s[1:]}")
            else:
                parts.append(s)
        return " ".join(parts)


def poly_from_str(text: str, names) -> Poly:
    """Parse a polynomial like "3*x1^2*x2 - 5/2*T1" over the given frame."""
    nvars = len(names)
    index = {n: i for i, n in enumerate(names)}
    text = text.replace("-", "+-").replace(" ", "")
    acc = Poly.zero(nvars)
    for chunk in text.split("+"):
        if not chunk:
            continue
        coeff = Fraction(1)
        if chunk.startswith("-"):
            coeff = Fraction(-1)
            chunk = chunk[1:]
        exps = [0] * nvars
        for factor in chunk.split("*"):
            if not factor:
                continue
            if factor[0].isdigit():
                coeff *= Fraction(factor)
                continue
            if "^" in factor:
                name, _, e = factor.partition("^")
                exps[index[name]] += int(e)
            else:
                exps[index[factor]] += 1
        acc = acc.add(Poly.monomial(tuple(exps), coeff))
    return acc
