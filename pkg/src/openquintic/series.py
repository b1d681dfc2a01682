"""Truncated Puiseux series with exact Q(sqrt5) coefficients.

A series is stored as a sparse map ``m -> coefficient`` where the key
``m`` is the numerator of the exponent ``m/ram``.  The moduli solver
fixes ``ram = 10`` (the finest exponent in the system is q^(1/10));
auxiliary gradings (w- and z-series for the Picard-Fuchs checks) use
smaller ramification indices.

``trunc`` is the first unknown key: exponents ``m >= trunc`` are not
known.  ``trunc=None`` marks an exact value (a polynomial).  Binary
operations propagate truncation pessimistically.

The module also houses the Lambert-sum machinery that converts the
coefficients of the Yukawa coupling and the disk potential into closed
and open instanton numbers.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

from .numfield import QuadRat, qr_parse, qr_print


class SeriesDomainError(ArithmeticError):
    """Operation would leave the allowed exponent lattice."""


class PrecisionError(ValueError):
    """A coefficient beyond the known truncation was requested."""


def _min_trunc(a: int | None, b: int | None) -> int | None:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class PuiseuxSeries:
    """Sparse truncated series in q^(1/ram) over Q(sqrt5)."""

    __slots__ = ("ram", "coeffs", "trunc")

    def __init__(self, coeffs: Mapping[int, QuadRat], ram: int = 10,
                 trunc: int | None = None):
        if ram <= 0:
            raise ValueError("ramification index must be positive")
        clean: dict[int, QuadRat] = {}
        for m, c in coeffs.items():
            if m < 0:
                raise SeriesDomainError(f"negative exponent {m}/{ram}")
            if trunc is not None and m >= trunc:
                continue
            c = QuadRat.coerce(c)
            if c:
                clean[m] = c
        object.__setattr__(self, "ram", ram)
        object.__setattr__(self, "coeffs", clean)
        object.__setattr__(self, "trunc", trunc)

    def __setattr__(self, name, value):
        raise AttributeError("PuiseuxSeries is immutable")

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, ram: int = 10, trunc: int | None = None):
        return cls({}, ram, trunc)

    @classmethod
    def constant(cls, c, ram: int = 10, trunc: int | None = None):
        return cls({0: QuadRat.coerce(c)}, ram, trunc)

    @classmethod
    def monomial(cls, m: int, c=1, ram: int = 10, trunc: int | None = None):
        return cls({m: QuadRat.coerce(c)}, ram, trunc)

    # -- inspection -----------------------------------------------------

    def coefficient(self, m: int) -> QuadRat:
        if self.trunc is not None and m >= self.trunc:
            raise PrecisionError(
                f"coefficient at exponent {m}/{self.ram} is beyond trunc={self.trunc}")
        return self.coeffs.get(m, QuadRat(0))

    def q_coefficient(self, e: Fraction | int) -> QuadRat:
        """Coefficient of q**e for a q-exponent e (exact)."""
        m = Fraction(e) * self.ram
        if m.denominator != 1:
            return QuadRat(0)
        return self.coefficient(int(m))

    def order(self) -> int | None:
        """Smallest known exponent key with nonzero coefficient, or None."""
        return min(self.coeffs) if self.coeffs else None

    def is_zero(self) -> bool:
        return not self.coeffs

    def support(self) -> list[int]:
        return sorted(self.coeffs)

    def _known_order(self) -> int | None:
        """Order for truncation bookkeeping (trunc if no term is known)."""
        if self.coeffs:
            return min(self.coeffs)
        return self.trunc  # None for an exact zero

    # -- ring operations --------------------------------------------------

    def _check_compatible(self, other: "PuiseuxSeries"):
        if self.ram != other.ram:
            raise SeriesDomainError(
                f"mixed ramification indices {self.ram} and {other.ram}")

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        self._check_compatible(other)
        trunc = _min_trunc(self.trunc, other.trunc)
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            s = out.get(m, QuadRat(0)) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return PuiseuxSeries(out, self.ram, trunc)

    __radd__ = __add__

    def __neg__(self):
        return PuiseuxSeries({m: -c for m, c in self.coeffs.items()},
                             self.ram, self.trunc)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, QuadRat)):
            c = QuadRat.coerce(other)
            return PuiseuxSeries({m: v * c for m, v in self.coeffs.items()},
                                 self.ram, self.trunc)
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        self._check_compatible(other)
        trunc = self._mul_trunc(other)
        out: dict[int, QuadRat] = {}
        for m1, c1 in self.coeffs.items():
            for m2, c2 in other.coeffs.items():
                m = m1 + m2
                if trunc is not None and m >= trunc:
                    continue
                p = c1 * c2
                s = out.get(m, QuadRat(0)) + p
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        return PuiseuxSeries(out, self.ram, trunc)

    __rmul__ = __mul__

    def _mul_trunc(self, other: "PuiseuxSeries") -> int | None:
        cands = []
        if self.trunc is not None:
            o = other._known_order()
            cands.append(self.trunc + (o if o is not None else 0)
                         if other.coeffs or other.trunc is not None else None)
            if o is None and not other.coeffs and other.trunc is None:
                cands[-1] = None  # exact zero: product exact
            elif o is None:
                cands[-1] = self.trunc + other.trunc  # no known term yet
        if other.trunc is not None:
            o = self._known_order()
            if o is None and not self.coeffs and self.trunc is None:
                cands.append(None)
            elif o is None:
                cands.append(other.trunc + self.trunc)
            else:
                cands.append(other.trunc + o)
        cands = [c for c in cands if c is not None]
        if (self.trunc is None and other.trunc is None):
            return None
        if not cands:
            return None  # one factor exactly zero
        return min(cands)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = PuiseuxSeries.constant(1, self.ram)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def inverse(self, trunc: int | None = None) -> "PuiseuxSeries":
        """Multiplicative inverse; requires an invertible leading term."""
        return PuiseuxSeries.constant(1, self.ram).divide(self, trunc)

    def divide(self, other: "PuiseuxSeries", trunc: int | None = None):
        """Exact truncated division self/other.

        ``other`` must have a known nonzero leading coefficient and its
        leading exponent must divide into self's support (results with
        negative exponents are rejected).
        """
        if isinstance(other, (int, Fraction, QuadRat)):
            return self * QuadRat.coerce(other).inverse()
        self._check_compatible(other)
        og = other.order()
        if og is None:
            raise SeriesDomainError("division by a series with zero known part")
        lead = other.coeffs[og]
        # precision of the quotient
        cands = []
        if self.trunc is not None:
            cands.append(self.trunc - og)
        if other.trunc is not None:
            of = self._known_order()
            of = of if of is not None else (self.trunc if self.trunc is not None else 0)
            cands.append(other.trunc + of - 2 * og)
        if trunc is not None:
            cands.append(trunc)
        qtrunc = min(cands) if cands else None
        if self.is_zero():
            return PuiseuxSeries.zero(self.ram, qtrunc)
        # normalised divisor u with u0 = 1, exponents shifted down by og
        u = {m - og: c / lead for m, c in other.coeffs.items()}
        f = {m: c / lead for m, c in self.coeffs.items()}
        # recursive coefficient solve: h * u = f with h supported from ord(f)-og
        of = min(f)
        start = of - og
        if start < 0:
            raise SeriesDomainError(
                "quotient would have a negative exponent")
        h: dict[int, QuadRat] = {}
        upper = qtrunc if qtrunc is not None else (max(f) - og + 1 if f else 0)
        usup = sorted(u)
        for m in range(start, upper):
            acc = f.get(m + og, QuadRat(0))
            for j in usup:
                if j == 0:
                    continue
                if j > m - start:
                    break
                hm = h.get(m - j)
                if hm is not None:
                    acc = acc - hm * u[j]
            if acc:
                h[m] = acc
        return PuiseuxSeries(h, self.ram, qtrunc)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, QuadRat, PuiseuxSeries)):
            return self.divide(other)
        return NotImplemented

    def _coerce(self, other):
        if isinstance(other, PuiseuxSeries):
            return other
        if isinstance(other, (int, Fraction, QuadRat)):
            return PuiseuxSeries.constant(other, self.ram)
        return NotImplemented

    # -- calculus ----------------------------------------------------------

    def theta(self, scale=1) -> "PuiseuxSeries":
        """Apply the scaled Euler derivation: coeff of q^e picks up scale*e.

        ``scale=5`` realises the derivation 5 q d/dq used by the moduli
        solver; the constant term is killed.
        """
        scale = QuadRat.coerce(scale)
        out = {}
        for m, c in self.coeffs.items():
            if m == 0:
                continue
            v = c * scale * Fraction(m, self.ram)
            if v:
                out[m] = v
        return PuiseuxSeries(out, self.ram, self.trunc)

    def nth_root(self, n: int) -> "PuiseuxSeries":
        """The root g with g**n = self, g of leading coefficient 1.

        Requires leading coefficient exactly 1 and leading exponent
        divisible by n.
        """
        if n <= 0:
            raise ValueError("root index must be positive")
        o = self.order()
        if o is None:
            raise SeriesDomainError("cannot take a root of zero")
        if self.coeffs[o] != QuadRat(1):
            raise SeriesDomainError(
                "nth_root requires leading coefficient 1, got "
                f"{qr_print(self.coeffs[o])}")
        if o % n:
            raise SeriesDomainError(
                f"leading exponent {o}/{self.ram} is not divisible by {n}")
        # f = x^o * (1 + u); the Euler identity E(f) g = n f E(g) gives
        # g_m = (1/(n m)) sum_{j=1..m} (j - n (m - j)) f_j g_{m-j}
        f = {m - o: c for m, c in self.coeffs.items()}
        trunc = self.trunc - o if self.trunc is not None else (max(f) + 1)
        g: dict[int, QuadRat] = {0: QuadRat(1)}
        fsup = sorted(j for j in f if j >= 1)
        for m in range(1, trunc):
            acc = QuadRat(0)
            for j in fsup:
                if j > m:
                    break
                gk = g.get(m - j)
                if gk is not None:
                    acc = acc + Fraction(j - n * (m - j)) * f[j] * gk
            gm = acc / Fraction(n * m)
            if gm:
                g[m] = gm
        shifted = {m + o // n: c for m, c in g.items()}
        out_trunc = None if self.trunc is None else trunc + o // n
        return PuiseuxSeries(shifted, self.ram, out_trunc)

    def truncate(self, trunc: int) -> "PuiseuxSeries":
        new = _min_trunc(self.trunc, trunc)
        return PuiseuxSeries(self.coeffs, self.ram, new)

    # -- comparisons / text -------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        return (self.ram == other.ram and self.trunc == other.trunc
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.ram, self.trunc, tuple(sorted(self.coeffs.items()))))

    def __repr__(self):
        terms = []
        for m in self.support():
            c = qr_print(self.coeffs[m])
            if m == 0:
                terms.append(c)
            else:
                e = Fraction(m, self.ram)
                terms.append(f"({c})*q^{e}")
        body = " + ".join(terms) if terms else "0"
        tail = "" if self.trunc is None else f" + O(q^{Fraction(self.trunc, self.ram)})"
        return body + tail


# -- serialisation -------------------------------------------------------

def series_to_text(f: PuiseuxSeries) -> str:
    """Fixed text format: header ``ram=R trunc=N`` then ``m<TAB>coeff`` lines."""
    if f.trunc is None:
        raise ValueError("only finitely truncated series are serialisable")
    lines = [f"ram={f.ram} trunc={f.trunc}"]
    for m in f.support():
        lines.append(f"{m}\t{qr_print(f.coeffs[m])}")
    return "\n".join(lines) + "\n"


def series_from_text(text: str) -> PuiseuxSeries:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty series text")
    header = lines[0].split()
    if len(header) != 2 or not header[0].startswith("ram=") \
            or not header[1].startswith("trunc="):
        raise ValueError(f"malformed series header: {lines[0]!r}")
    ram = int(header[0][4:])
    trunc = int(header[1][6:])
    coeffs = {}
    for ln in lines[1:]:
        m_text, _, c_text = ln.partition("\t")
        coeffs[int(m_text)] = qr_parse(c_text)
    return PuiseuxSeries(coeffs, ram, trunc)


# -- instanton extraction -------------------------------------------------

class InvariantTable:
    """Extracted instanton numbers, ``sector`` is "closed" or "open"."""

    __slots__ = ("sector", "entries")

    def __init__(self, sector: str, entries: Mapping[int, Fraction]):
        if sector not in ("closed", "open"):
            raise ValueError(f"unknown sector {sector!r}")
        for d in entries:
            if d < 1 or (sector == "open" and d % 2 == 0):
                raise ValueError(f"invalid degree {d} for sector {sector}")
        object.__setattr__(self, "sector", sector)
        object.__setattr__(self, "entries", dict(entries))

    def __setattr__(self, name, value):
        raise AttributeError("InvariantTable is immutable")

    def __getitem__(self, d: int) -> Fraction:
        return self.entries[d]

    def __eq__(self, other):
        if not isinstance(other, InvariantTable):
            return NotImplemented
        return self.sector == other.sector and self.entries == other.entries

    def __repr__(self):
        rows = ", ".join(f"{d}: {v}" for d, v in sorted(self.entries.items()))
        return f"InvariantTable({self.sector}, {{{rows}}})"


def invert_closed_lambert(coeffs: Mapping[int, Fraction], max_degree: int) -> InvariantTable:
    """Solve ``coeffs[m] = sum_{d|m} n_d d^3`` for the n_d, d = 1..max_degree.

    The degree-0 classical constant must already be stripped; a missing
    coefficient below max_degree is an input error.
    """
    n: dict[int, Fraction] = {}
    for m in range(1, max_degree + 1):
        if m not in coeffs:
            raise KeyError(f"missing closed-sector coefficient at degree {m}")
        acc = Fraction(coeffs[m])
        for d in range(1, m):
            if m % d == 0:
                acc -= n[d] * d**3
        n[m] = acc / m**3
    return InvariantTable("closed", n)


def closed_lambert_sum(n: Mapping[int, Fraction], max_degree: int) -> dict[int, Fraction]:
    """Forward sum ``m -> sum_{d|m} n_d d^3`` on a finitely supported table."""
    out = {}
    for m in range(1, max_degree + 1):
        out[m] = sum((Fraction(n[d]) * d**3 for d in n if d <= m and m % d == 0),
                     Fraction(0))
    return out


def invert_open_lambert(coeffs: Mapping[int, Fraction], max_degree: int) -> InvariantTable:
    """Solve ``coeffs[m] = sum_{d|m} n_d d^2`` over odd m for disk counts.

    ``coeffs[m]`` is the coefficient of q^(m/2); all divisors of an odd m
    are odd, so the divisor sum runs over every d | m.
    """
    for m in coeffs:
        if m % 2 == 0:
            raise KeyError(f"open-sector coefficients must have odd index, got {m}")
    n: dict[int, Fraction] = {}
    for m in range(1, max_degree + 1, 2):
        if m not in coeffs:
            raise KeyError(f"missing open-sector coefficient at degree {m}")
        acc = Fraction(coeffs[m])
        for d in range(1, m, 2):
            if m % d == 0:
                acc -= n[d] * d**2
        n[m] = acc / m**2
    return InvariantTable("open", n)


def open_lambert_sum(n: Mapping[int, Fraction], max_degree: int) -> dict[int, Fraction]:
    out = {}
    for m in range(1, max_degree + 1, 2):
        out[m] = sum((Fraction(n[d]) * d**2 for d in n if d <= m and m % d == 0),
                     Fraction(0))
    return out
