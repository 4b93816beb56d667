"""Exact truncated power series in one variable t over the rationals.

A series is stored as a sparse map exponent -> nonzero Fraction together with
a precision p: the series is known exactly modulo t^(p+1).  All arithmetic is
exact; there is no floating point anywhere in this module.  Two series can be
combined only when their precisions agree (use ``truncate`` to align them);
operations that genuinely lose information (``derivative``, downward
``shift``) return a series of lower precision.
"""

from __future__ import annotations

from fractions import Fraction

INF = float("inf")


class PrecisionMismatch(ValueError):
    """Raised when combining series of different precisions."""


class NotAUnit(ValueError):
    """Raised when inverting or extracting roots of a non-unit series."""


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class TruncatedSeries:
    """A power series in t with rational coefficients, known mod t^(prec+1)."""

    __slots__ = ("coeffs", "prec")

    def __init__(self, coeffs, prec: int):
        if prec < 0:
            raise ValueError("precision must be non-negative")
        self.prec = prec
        self.coeffs = {
            e: _frac(c) for e, c in coeffs.items() if e <= prec and c != 0
        }

    @classmethod
    def zero(cls, prec: int) -> "TruncatedSeries":
        return cls({}, prec)

    @classmethod
    def one(cls, prec: int) -> "TruncatedSeries":
        return cls({0: Fraction(1)}, prec)

    @classmethod
    def monomial(cls, exp: int, prec: int, coeff=1) -> "TruncatedSeries":
        return cls({exp: _frac(coeff)}, prec)

    @classmethod
    def from_pairs(cls, pairs, prec: int) -> "TruncatedSeries":
        acc: dict[int, Fraction] = {}
        for e, c in pairs:
            acc[e] = acc.get(e, Fraction(0)) + _frac(c)
        return cls(acc, prec)

    # -- basic queries ----------------------------------------------------

    def order(self):
        """Least exponent with nonzero coefficient; INF for the zero series.

        INF means "order exceeds the precision bound": the series vanishes
        modulo t^(prec+1).
        """
        if not self.coeffs:
            return INF
        return min(self.coeffs)

    def coeff(self, exp: int) -> Fraction:
        return self.coeffs.get(exp, Fraction(0))

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.prec == other.prec and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.prec, tuple(sorted(self.coeffs.items()))))

    def __repr__(self):
        if not self.coeffs:
            return f"O(t^{self.prec + 1})"
        parts = []
        for e in sorted(self.coeffs):
            c = self.coeffs[e]
            if e == 0:
                parts.append(str(c))
            elif c == 1:
                parts.append(f"t^{e}" if e != 1 else "t")
            else:
                parts.append(f"{c}*t^{e}" if e != 1 else f"{c}*t")
        return " + ".join(parts) + f" + O(t^{self.prec + 1})"

    # -- arithmetic -------------------------------------------------------

    def _check(self, other: "TruncatedSeries"):
        if self.prec != other.prec:
            raise PrecisionMismatch(
                f"precision mismatch: {self.prec} vs {other.prec}"
            )

    def add(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._check(other)
        acc = dict(self.coeffs)
        for e, c in other.coeffs.items():
            acc[e] = acc.get(e, Fraction(0)) + c
        return TruncatedSeries(acc, self.prec)

    def sub(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._check(other)
        acc = dict(self.coeffs)
        for e, c in other.coeffs.items():
            acc[e] = acc.get(e, Fraction(0)) - c
        return TruncatedSeries(acc, self.prec)

    def mul(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._check(other)
        p = self.prec
        acc: dict[int, Fraction] = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = e1 + e2
                if e <= p:
                    acc[e] = acc.get(e, Fraction(0)) + c1 * c2
        return TruncatedSeries(acc, p)

    __add__ = add
    __sub__ = sub
    __mul__ = mul

    def neg(self) -> "TruncatedSeries":
        return TruncatedSeries({e: -c for e, c in self.coeffs.items()}, self.prec)

    __neg__ = neg

    def scale(self, c) -> "TruncatedSeries":
        c = _frac(c)
        if c == 0:
            return TruncatedSeries.zero(self.prec)
        return TruncatedSeries({e: c * v for e, v in self.coeffs.items()}, self.prec)

    def shift(self, k: int) -> "TruncatedSeries":
        """Multiply by t^k.  For k < 0 every stored exponent must be >= -k."""
        if k < 0 and any(e + k < 0 for e in self.coeffs):
            raise ValueError("negative shift below t^0")
        return TruncatedSeries(
            {e + k: c for e, c in self.coeffs.items()}, self.prec + k
        )

    def truncate(self, prec: int) -> "TruncatedSeries":
        if prec > self.prec:
            raise ValueError("cannot raise precision by truncation")
        if prec == self.prec:
            return self
        return TruncatedSeries(
            {e: c for e, c in self.coeffs.items() if e <= prec}, prec
        )

    def pow(self, n: int) -> "TruncatedSeries":
        if n < 0:
            raise ValueError("negative power")
        result = TruncatedSeries.one(self.prec)
        base = self
        while n:
            if n & 1:
                result = result.mul(base)
            n >>= 1
            if n:
                base = base.mul(base)
        return result

    # -- unit operations --------------------------------------------------

    def invert_unit(self) -> "TruncatedSeries":
        """Inverse g with self*g = 1 mod t^(prec+1).  Requires order 0."""
        if self.order() != 0:
            raise NotAUnit("series has no constant term; not invertible")
        p = self.prec
        c0 = self.coeffs[0]
        inv: dict[int, Fraction] = {0: 1 / c0}
        # g_e = -(1/c0) * sum_{i=1..e} c_i g_{e-i}
        tail = {e: c for e, c in self.coeffs.items() if e > 0}
        for e in range(1, p + 1):
            s = Fraction(0)
            for i, ci in tail.items():
                if i <= e and (e - i) in inv:
                    s += ci * inv[e - i]
            if s:
                inv[e] = -s / c0
        return TruncatedSeries(inv, p)

    def nth_root_unit(self, a: int) -> "TruncatedSeries":
        """The a-th root with constant term 1, via the binomial series.

        Requires constant term exactly 1 (callers normalize by scaling) and
        a >= 1.  The result g satisfies g^a = self mod t^(prec+1).
        """
        if a <= 0:
            raise ValueError("root index must be a positive integer")
        if self.coeff(0) != 1:
            raise NotAUnit("nth_root_unit requires constant term 1")
        p = self.prec
        h = TruncatedSeries(
            {e: c for e, c in self.coeffs.items() if e > 0}, p
        )
        result = TruncatedSeries.one(p)
        if h.is_zero():
            return result
        ho = h.order()
        term = TruncatedSeries.one(p)
        binom = Fraction(1)
        alpha = Fraction(1, a)
        k = 0
        while (k + 1) * ho <= p:
            k += 1
            binom *= (alpha - (k - 1)) / k
            term = term.mul(h)
            result = result.add(term.scale(binom))
        return result

    def substitute(self, s: "TruncatedSeries") -> "TruncatedSeries":
        """Compose: self(s(t)).  Requires order(s) == 1."""
        if s.order() != 1:
            raise ValueError("substitution series must have order exactly 1")
        p = min(self.prec, s.prec)
        st = s if s.prec == p else s.truncate(p)
        acc = TruncatedSeries.zero(p)
        power_cache: dict[int, TruncatedSeries] = {0: TruncatedSeries.one(p)}
        last = 0

        def s_pow(e: int) -> TruncatedSeries:
            nonlocal last
            if e in power_cache:
                return power_cache[e]
            base = power_cache[last]
            for i in range(last + 1, e + 1):
                base = base.mul(st)
                power_cache[i] = base
            last = e
            return power_cache[e]

        for e in sorted(self.coeffs):
            if e > p:
                break
            acc = acc.add(s_pow(e).scale(self.coeffs[e]))
        return acc

    def derivative(self) -> "TruncatedSeries":
        """Termwise d/dt.  Precision drops by one."""
        if self.prec == 0:
            return TruncatedSeries.zero(0)
        return TruncatedSeries(
            {e - 1: e * c for e, c in self.coeffs.items() if e >= 1},
            self.prec - 1,
        )

    def reverse(self) -> "TruncatedSeries":
        """Compositional inverse v with self(v(s)) = s, for order-1 series.

        Requires the leading coefficient to be 1 (the only case needed here:
        uniformizer changes s = beta*t with beta a unit of constant term 1).
        """
        if self.order() != 1 or self.coeff(1) != 1:
            raise ValueError("reversion requires a series t + O(t^2)")
        p = self.prec
        ident = TruncatedSeries.monomial(1, p)
        v = ident
        du = self.derivative()  # prec p-1
        # Newton iteration doubles the number of correct coefficients.
        for _ in range(max(1, (p + 1).bit_length()) + 2):
            err = self.substitute(v).sub(ident)  # order >= 2 when nonzero
            if err.is_zero():
                break
            duv = du.substitute(v.truncate(p - 1)) if p >= 1 else du
            # Padding the inverse to precision p is safe: err has order >= 2,
            # so the padded (unknown) top coefficient never contributes below
            # exponent p+2.
            inv = _pad(duv.invert_unit(), p)
            v = v.sub(err.mul(inv))
        if not self.substitute(v).sub(ident).is_zero():
            raise ArithmeticError("series reversion failed to converge")
        return v

    def as_json(self):
        """Serialize as a list of [exponent, "p/q"] pairs."""
        return [[e, str(self.coeffs[e])] for e in sorted(self.coeffs)]


def _pad(s: TruncatedSeries, prec: int) -> TruncatedSeries:
    """Reinterpret s at a higher precision.

    Only safe when the caller knows the missing coefficients vanish; used by
    Newton reversion where the correction has order above the current
    accuracy anyway.
    """
    return TruncatedSeries(dict(s.coeffs), prec)


def series_from_json(data, prec: int) -> TruncatedSeries:
    return TruncatedSeries(
        {int(e): Fraction(str(c)) for e, c in data}, prec
    )
