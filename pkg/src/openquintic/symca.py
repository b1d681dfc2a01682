"""Sparse multivariate polynomials and rational functions over Q(sqrt5).

The variable set is a global ordered registry.  The nine moduli
coordinates s0..s8 are pre-registered; auxiliary symbols (z, group
coordinates, tau entries) are added on demand and always sort after
them.  Monomials are stored as sorted tuples of (variable id, exponent)
pairs, so polynomials survive later registry growth unchanged.

Rational functions are *not* reduced with a multivariate gcd: equality
is decided by cross-multiplication.  Normalisation removes the common
monomial factor, makes the denominator monic in graded-lex order and
attempts one exact trial division, which is enough to keep the 5x5
connection-matrix algebra small.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .numfield import QuadRat
from .series import PuiseuxSeries

Monomial = tuple[tuple[int, int], ...]  # sorted ((var_id, exponent), ...)

_SYMBOLS: list[str] = [f"s{i}" for i in range(9)]
_SYMBOL_IDS: dict[str, int] = {name: i for i, name in enumerate(_SYMBOLS)}

MODULI_VARS = tuple(f"s{i}" for i in range(9))


class SingularMatrixError(ArithmeticError):
    """A matrix inverse was requested but the determinant vanishes."""


def register_symbol(name: str) -> int:
    """Register an auxiliary symbol; idempotent, returns its id."""
    if name in _SYMBOL_IDS:
        return _SYMBOL_IDS[name]
    _SYMBOL_IDS[name] = len(_SYMBOLS)
    _SYMBOLS.append(name)
    return _SYMBOL_IDS[name]


def symbol_name(var_id: int) -> str:
    return _SYMBOLS[var_id]


def symbol_id(name: str) -> int:
    try:
        return _SYMBOL_IDS[name]
    except KeyError:
        raise KeyError(f"unregistered symbol {name!r}") from None


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    out = dict(a)
    for v, e in b:
        out[v] = out.get(v, 0) + e
    return tuple(sorted(out.items()))


def _mono_deg(m: Monomial) -> int:
    return sum(e for _, e in m)


def _mono_key(m: Monomial):
    """Graded-lex sort key (total degree, then exponents along the order)."""
    return (_mono_deg(m), tuple(-v for v, _ in m), tuple(e for _, e in m))


def _mono_divides(a: Monomial, b: Monomial) -> bool:
    """True if monomial a divides monomial b."""
    db = dict(b)
    return all(db.get(v, 0) >= e for v, e in a)


def _mono_div(b: Monomial, a: Monomial) -> Monomial:
    db = dict(b)
    for v, e in a:
        db[v] -= e
        if not db[v]:
            del db[v]
    return tuple(sorted(db.items()))


class Poly:
    """Sparse polynomial: map monomial -> nonzero QuadRat coefficient."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, QuadRat] | None = None):
        clean: dict[Monomial, QuadRat] = {}
        if terms:
            for m, c in terms.items():
                c = QuadRat.coerce(c)
                if c:
                    clean[m] = c
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    # -- constructors --------------------------------------------------

    @classmethod
    def constant(cls, c) -> "Poly":
        return cls({(): QuadRat.coerce(c)})

    @classmethod
    def variable(cls, name: str, exp: int = 1) -> "Poly":
        if exp == 0:
            return cls.constant(1)
        return cls({((symbol_id(name), exp),): QuadRat(1)})

    # -- predicates -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and () in self.terms)

    def constant_value(self) -> QuadRat:
        if self.is_zero():
            return QuadRat(0)
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self.terms[()]

    def variables(self) -> set[str]:
        out = set()
        for m in self.terms:
            for v, _ in m:
                out.add(_SYMBOLS[v])
        return out

    def __bool__(self):
        return not self.is_zero()

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, QuadRat(0)) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Poly(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, QuadRat)):
            c = QuadRat.coerce(other)
            if not c:
                return Poly()
            return Poly({m: v * c for m, v in self.terms.items()})
        if not isinstance(other, Poly):
            return NotImplemented
        if len(self.terms) > len(other.terms):
            big, small = self.terms, other.terms
        else:
            big, small = other.terms, self.terms
        out: dict[Monomial, QuadRat] = {}
        for m2, c2 in small.items():
            for m1, c1 in big.items():
                m = _mono_mul(m1, m2)
                p = c1 * c2
                s = out.get(m, QuadRat(0)) + p
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = Poly.constant(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    # -- structure -----------------------------------------------------------

    def lead(self) -> tuple[Monomial, QuadRat]:
        """Leading term in graded-lex order."""
        if self.is_zero():
            raise ValueError("zero polynomial has no leading term")
        m = max(self.terms, key=_mono_key)
        return m, self.terms[m]

    def monomial_content(self) -> Monomial:
        """The largest monomial dividing every term."""
        if self.is_zero():
            return ()
        it = iter(self.terms)
        acc = dict(next(it))
        for m in it:
            dm = dict(m)
            for v in list(acc):
                e = dm.get(v, 0)
                if e < acc[v]:
                    if e:
                        acc[v] = e
                    else:
                        del acc[v]
            if not acc:
                break
        return tuple(sorted(acc.items()))

    def div_monomial(self, mono: Monomial) -> "Poly":
        return Poly({_mono_div(m, mono): c for m, c in self.terms.items()})

    def divexact(self, other: "Poly") -> "Poly | None":
        """Exact polynomial quotient, or None if the division fails."""
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        if self.is_zero():
            return Poly()
        if other.is_constant():
            return self * other.constant_value().inverse()
        lm, lc = other.lead()
        rem = dict(self.terms)
        quo: dict[Monomial, QuadRat] = {}
        while rem:
            m = max(rem, key=_mono_key)
            if not _mono_divides(lm, m):
                return None
            qm = _mono_div(m, lm)
            qc = rem[m] / lc
            quo[qm] = qc
            for m2, c2 in other.terms.items():
                mm = _mono_mul(qm, m2)
                s = rem.get(mm, QuadRat(0)) - qc * c2
                if s:
                    rem[mm] = s
                else:
                    rem.pop(mm, None)
        return Poly(quo)

    def diff(self, name: str) -> "Poly":
        v = symbol_id(name)
        out: dict[Monomial, QuadRat] = {}
        for m, c in self.terms.items():
            dm = dict(m)
            e = dm.get(v, 0)
            if not e:
                continue
            if e == 1:
                del dm[v]
            else:
                dm[v] = e - 1
            mono = tuple(sorted(dm.items()))
            s = out.get(mono, QuadRat(0)) + c * e
            if s:
                out[mono] = s
        return Poly(out)

    # -- evaluation -----------------------------------------------------------

    def eval_point(self, bindings: Mapping[str, QuadRat]) -> QuadRat:
        ids = {symbol_id(k): QuadRat.coerce(v) for k, v in bindings.items()}
        acc = QuadRat(0)
        cache: dict[tuple[int, int], QuadRat] = {}
        for m, c in self.terms.items():
            val = c
            for v, e in m:
                key = (v, e)
                p = cache.get(key)
                if p is None:
                    p = ids[v] ** e
                    cache[key] = p
                val = val * p
            acc = acc + val
        return acc

    def eval_series(self, bindings: Mapping[str, PuiseuxSeries],
                    trunc: int | None, ram: int = 10) -> PuiseuxSeries:
        ids = {symbol_id(k): v for k, v in bindings.items()}
        acc = PuiseuxSeries.zero(ram, None)
        cache: dict[tuple[int, int], PuiseuxSeries] = {}
        for m, c in self.terms.items():
            val = PuiseuxSeries.constant(c, ram)
            for v, e in m:
                p = cache.get((v, e))
                if p is None:
                    p = _series_pow(ids[v], e, trunc, cache, v)
                val = (val * p).truncate(trunc) if trunc is not None else val * p
            acc = acc + val
        if trunc is not None:
            acc = acc.truncate(trunc)
        return acc

    def eval_rf(self, bindings: Mapping[str, "RatFunc"]) -> "RatFunc":
        ids = {symbol_id(k): v for k, v in bindings.items()}
        acc = RatFunc.constant(0)
        cache: dict[tuple[int, int], RatFunc] = {}
        for m, c in self.terms.items():
            val = RatFunc.constant(c)
            for v, e in m:
                key = (v, e)
                p = cache.get(key)
                if p is None:
                    p = ids[v] ** e
                    cache[key] = p
                val = val * p
            acc = acc + val
        return acc

    # -- comparisons / text ------------------------------------------------------

    def __eq__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items(), key=lambda t: _mono_key(t[0]))))

    def render(self) -> str:
        """Deterministic text rendering, monomials in descending graded-lex."""
        if self.is_zero():
            return "0"
        parts = []
        for m in sorted(self.terms, key=_mono_key, reverse=True):
            c = self.terms[m]
            factors = "*".join(
                f"{_SYMBOLS[v]}^{e}" if e > 1 else _SYMBOLS[v] for v, e in m)
            ctext = str(c)
            if "+" in ctext or "-" in ctext[1:]:
                ctext = f"({ctext})"
            parts.append(f"{ctext}*{factors}" if factors and ctext != "1"
                         else (factors or ctext))
        return " + ".join(parts)

    def __repr__(self):
        return f"Poly<{self.render()}>"


def _series_pow(base: PuiseuxSeries, e: int, trunc: int | None,
                cache: dict, var: int) -> PuiseuxSeries:
    """Powers of a bound series with per-call caching (repeated squaring)."""
    if e == 0:
        return PuiseuxSeries.constant(1, base.ram)
    got = cache.get((var, e))
    if got is not None:
        return got
    if e == 1:
        result = base if trunc is None else base.truncate(trunc)
    else:
        half = _series_pow(base, e // 2, trunc, cache, var)
        result = half * half
        if e % 2:
            result = result * base
        if trunc is not None:
            result = result.truncate(trunc)
    cache[(var, e)] = result
    return result


def _as_poly(x):
    if isinstance(x, Poly):
        return x
    if isinstance(x, (int, Fraction, QuadRat)):
        return Poly.constant(x)
    return NotImplemented


class RatFunc:
    """Quotient of two polynomials, den != 0, kept in a light normal form."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly | None = None, _normalized=False):
        if den is None:
            den = Poly.constant(1)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if not _normalized:
            num, den = _rf_normalize(num, den)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("RatFunc is immutable")

    # -- constructors -----------------------------------------------------

    @classmethod
    def constant(cls, c) -> "RatFunc":
        return cls(Poly.constant(c))

    @classmethod
    def variable(cls, name: str, exp: int = 1) -> "RatFunc":
        if exp >= 0:
            return cls(Poly.variable(name, exp))
        return cls(Poly.constant(1), Poly.variable(name, -exp))

    @classmethod
    def coerce(cls, x) -> "RatFunc":
        if isinstance(x, RatFunc):
            return x
        if isinstance(x, Poly):
            return cls(x)
        if isinstance(x, (int, Fraction, QuadRat)):
            return cls.constant(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to RatFunc")

    # -- predicates -------------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self) -> QuadRat:
        return self.num.constant_value() / self.den.constant_value()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def __bool__(self):
        return not self.is_zero()

    # -- field operations -----------------------------------------------------

    def __add__(self, other):
        other = _as_rf(other)
        if other is NotImplemented:
            return NotImplemented
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(self.num * other.den + other.num * self.den,
                       self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, _normalized=True)

    def __sub__(self, other):
        other = _as_rf(other)
        if other is NotImplemented:
            return NotImplemented
        if self.den == other.den:
            return RatFunc(self.num - other.num, self.den)
        return RatFunc(self.num * other.den - other.num * self.den,
                       self.den * other.den)

    def __rsub__(self, other):
        other = _as_rf(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = _as_rf(other)
        if other is NotImplemented:
            return NotImplemented
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_rf(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RatFunc(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        other = _as_rf(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            if self.is_zero():
                raise ZeroDivisionError("zero to a negative power")
            return RatFunc(self.den ** (-n), self.num ** (-n))
        return RatFunc(self.num ** n, self.den ** n)

    def inverse(self) -> "RatFunc":
        return self ** (-1)

    # -- calculus ----------------------------------------------------------------

    def diff(self, name: str) -> "RatFunc":
        """Exact partial derivative by the quotient rule."""
        dn = self.num.diff(name)
        dd = self.den.diff(name)
        if dd.is_zero():
            return RatFunc(dn, self.den)
        return RatFunc(dn * self.den - self.num * dd, self.den * self.den)

    # -- evaluation ----------------------------------------------------------------

    def eval_point(self, bindings: Mapping[str, QuadRat]) -> QuadRat:
        den = self.den.eval_point(bindings)
        if not den:
            raise ZeroDivisionError("denominator vanishes at the given point")
        return self.num.eval_point(bindings) / den

    def substitute_series(self, bindings: Mapping[str, PuiseuxSeries],
                          trunc: int | None, ram: int = 10) -> PuiseuxSeries:
        """Exact truncated evaluation on Puiseux series."""
        num = self.num.eval_series(bindings, trunc, ram)
        if self.den.is_constant():
            return num * self.den.constant_value().inverse()
        den = self.den.eval_series(bindings, trunc, ram)
        return num.divide(den, trunc)

    def eval_rf(self, bindings: Mapping[str, "RatFunc"]) -> "RatFunc":
        num = self.num.eval_rf(bindings)
        den = self.den.eval_rf(bindings)
        return num / den

    # -- comparisons / text -------------------------------------------------------------

    def equal(self, other) -> bool:
        """Mathematical equality by cross-multiplication."""
        other = _as_rf(other)
        return self.num * other.den == other.num * self.den

    def __eq__(self, other):
        other = _as_rf(other)
        if other is NotImplemented:
            return NotImplemented
        return self.equal(other)

    def __hash__(self):  # structural; equal-but-unreduced values may differ
        return hash((self.num, self.den))

    def render(self) -> str:
        if self.den.is_constant() and self.den.constant_value() == QuadRat(1):
            return self.num.render()
        return f"({self.num.render()}) / ({self.den.render()})"

    def __repr__(self):
        return f"RatFunc<{self.render()}>"


def _rf_normalize(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    if num.is_zero():
        return Poly(), Poly.constant(1)
    # strip the common monomial factor
    mc_num = num.monomial_content()
    if mc_num:
        mc_den = den.monomial_content()
        common = {}
        dd = dict(mc_den)
        for v, e in mc_num:
            if v in dd:
                common[v] = min(e, dd[v])
        if common:
            mono = tuple(sorted(common.items()))
            num = num.div_monomial(mono)
            den = den.div_monomial(mono)
    # one exact trial division; keeps matrix algebra from accreting factors
    if not den.is_constant():
        q = num.divexact(den)
        if q is not None:
            num, den = q, Poly.constant(1)
    # monic denominator in graded-lex order
    _, lc = den.lead()
    if lc != QuadRat(1):
        inv = lc.inverse()
        num = num * inv
        den = den * inv
    return num, den


def _as_rf(x):
    if isinstance(x, RatFunc):
        return x
    if isinstance(x, Poly):
        return RatFunc(x)
    if isinstance(x, (int, Fraction, QuadRat)):
        return RatFunc.constant(x)
    return NotImplemented


ZERO_RF = RatFunc.constant(0)
ONE_RF = RatFunc.constant(1)


# -- matrices ------------------------------------------------------------------

class RFMatrix:
    """Rectangular matrix of rational functions."""

    __slots__ = ("rows",)

    def __init__(self, rows: Sequence[Sequence]):
        grid = [[RatFunc.coerce(x) for x in row] for row in rows]
        if grid and any(len(r) != len(grid[0]) for r in grid):
            raise ValueError("ragged matrix")
        object.__setattr__(self, "rows", grid)

    def __setattr__(self, name, value):
        raise AttributeError("RFMatrix is immutable")

    @classmethod
    def identity(cls, n: int) -> "RFMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zero(cls, nrows: int, ncols: int) -> "RFMatrix":
        return cls([[0] * ncols for _ in range(nrows)])

    @property
    def nrows(self):
        return len(self.rows)

    @property
    def ncols(self):
        return len(self.rows[0]) if self.rows else 0

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def row(self, i):
        return list(self.rows[i])

    def __add__(self, other):
        if not isinstance(other, RFMatrix):
            return NotImplemented
        return RFMatrix([[a + b for a, b in zip(r1, r2)]
                         for r1, r2 in zip(self.rows, other.rows)])

    def __sub__(self, other):
        if not isinstance(other, RFMatrix):
            return NotImplemented
        return RFMatrix([[a - b for a, b in zip(r1, r2)]
                         for r1, r2 in zip(self.rows, other.rows)])

    def __neg__(self):
        return RFMatrix([[-a for a in r] for r in self.rows])

    def __matmul__(self, other):
        if not isinstance(other, RFMatrix):
            return NotImplemented
        if self.ncols != other.nrows:
            raise ValueError("incompatible matrix dimensions")
        out = []
        for i in range(self.nrows):
            row = []
            for j in range(other.ncols):
                acc = ZERO_RF
                for k in range(self.ncols):
                    a = self.rows[i][k]
                    if a.is_zero():
                        continue
                    b = other.rows[k][j]
                    if b.is_zero():
                        continue
                    acc = acc + a * b
                row.append(acc)
            out.append(row)
        return RFMatrix(out)

    def __mul__(self, other):
        if isinstance(other, RFMatrix):
            return self @ other
        scalar = _as_rf(other)
        if scalar is NotImplemented:
            return NotImplemented
        return RFMatrix([[a * scalar for a in r] for r in self.rows])

    __rmul__ = __mul__

    def transpose(self) -> "RFMatrix":
        return RFMatrix([[self.rows[i][j] for i in range(self.nrows)]
                         for j in range(self.ncols)])

    def det(self) -> RatFunc:
        if self.nrows != self.ncols:
            raise ValueError("determinant of a non-square matrix")
        return _det_on(self, list(range(self.nrows)),
                       tuple(range(self.ncols)), {})

    def inverse(self) -> "RFMatrix":
        """Exact inverse by adjugate with memoised cofactor expansion."""
        if self.nrows != self.ncols:
            raise ValueError("inverse of a non-square matrix")
        n = self.nrows
        memo: dict = {}
        all_rows = list(range(n))
        all_cols = tuple(range(n))
        det = _det_on(self, all_rows, all_cols, memo)
        if det.is_zero():
            raise SingularMatrixError(
                "matrix is singular (determinant is identically zero)")
        inv_det = det.inverse()
        out = [[ZERO_RF] * n for _ in range(n)]
        for i in range(n):
            rows = [r for r in all_rows if r != i]
            for j in range(n):
                cols = all_cols[:j] + all_cols[j + 1:]
                cof = _det_on(self, rows, cols, memo)
                if (i + j) % 2:
                    cof = -cof
                out[j][i] = cof * inv_det  # adjugate = cofactor transpose
        return RFMatrix(out)

    def map(self, fn) -> "RFMatrix":
        return RFMatrix([[fn(a) for a in r] for r in self.rows])

    def equal(self, other: "RFMatrix") -> bool:
        if self.nrows != other.nrows or self.ncols != other.ncols:
            return False
        return all(a.equal(b) for r1, r2 in zip(self.rows, other.rows)
                   for a, b in zip(r1, r2))

    def __eq__(self, other):
        if not isinstance(other, RFMatrix):
            return NotImplemented
        return self.equal(other)

    def __repr__(self):
        body = ",\n ".join("[" + ", ".join(a.render() for a in r) + "]"
                           for r in self.rows)
        return f"RFMatrix(\n {body})"


def _det_on(mat: RFMatrix, rows: list[int], cols: tuple[int, ...], memo: dict) -> RatFunc:
    """Determinant of the (rows x cols) submatrix, memoised on (rows, cols)."""
    if not rows:
        return ONE_RF
    key = (tuple(rows), cols)
    got = memo.get(key)
    if got is not None:
        return got
    i0 = rows[0]
    rest_rows = rows[1:]
    acc = ZERO_RF
    sign = 1
    for pos, j in enumerate(cols):
        a = mat.rows[i0][j]
        if not a.is_zero():
            sub = _det_on(mat, rest_rows, cols[:pos] + cols[pos + 1:], memo)
            term = a * sub
            acc = acc + (term if sign > 0 else -term)
        sign = -sign
    memo[key] = acc
    return acc


class OneFormMatrix:
    """A matrix of 1-forms: variable name -> the d(that variable) component."""

    __slots__ = ("components",)

    def __init__(self, components: Mapping[str, RFMatrix]):
        comp = {v: m for v, m in components.items()
                if any(not a.is_zero() for r in m.rows for a in r)}
        dims = {(m.nrows, m.ncols) for m in comp.values()}
        if len(dims) > 1:
            raise ValueError("component matrices of mixed dimensions")
        object.__setattr__(self, "components", comp)

    def __setattr__(self, name, value):
        raise AttributeError("OneFormMatrix is immutable")

    def component(self, var: str, nrows: int = 5, ncols: int = 5) -> RFMatrix:
        got = self.components.get(var)
        if got is not None:
            return got
        if self.components:
            any_m = next(iter(self.components.values()))
            nrows, ncols = any_m.nrows, any_m.ncols
        return RFMatrix.zero(nrows, ncols)

    def __add__(self, other):
        if not isinstance(other, OneFormMatrix):
            return NotImplemented
        out = dict(self.components)
        for v, m in other.components.items():
            out[v] = out[v] + m if v in out else m
        return OneFormMatrix(out)

    def left_mul(self, mat: RFMatrix) -> "OneFormMatrix":
        return OneFormMatrix({v: mat @ m for v, m in self.components.items()})

    def right_mul(self, mat: RFMatrix) -> "OneFormMatrix":
        return OneFormMatrix({v: m @ mat for v, m in self.components.items()})

    def contract(self, field: "VectorField") -> RFMatrix:
        """Pair the 1-form matrix with a vector field: sum_v V[v] * M_v."""
        acc = None
        for v, m in self.components.items():
            coeff = field.components.get(v)
            if coeff is None or coeff.is_zero():
                continue
            part = m * coeff
            acc = part if acc is None else acc + part
        if acc is None:
            any_m = next(iter(self.components.values()), None)
            if any_m is None:
                raise ValueError("cannot contract an empty 1-form matrix")
            return RFMatrix.zero(any_m.nrows, any_m.ncols)
        return acc


def mat_d(mat: RFMatrix, variables: Iterable[str] = MODULI_VARS) -> OneFormMatrix:
    """Entry-wise total differential of a matrix over the given variables."""
    comp = {}
    for v in variables:
        m = mat.map(lambda a: a.diff(v))
        comp[v] = m
    return OneFormMatrix(comp)


class VectorField:
    """Vector field on the moduli coordinates: name -> d/d(name) component."""

    __slots__ = ("components",)

    def __init__(self, components: Mapping[str, RatFunc]):
        object.__setattr__(
            self, "components",
            {v: RatFunc.coerce(c) for v, c in components.items()})

    def __setattr__(self, name, value):
        raise AttributeError("VectorField is immutable")

    def component(self, var: str) -> RatFunc:
        return self.components.get(var, ZERO_RF)

    def apply(self, f: RatFunc) -> RatFunc:
        """Derivation: sum_v V[v] * df/dv."""
        acc = ZERO_RF
        for v, c in self.components.items():
            if c.is_zero():
                continue
            d = f.diff(v)
            if not d.is_zero():
                acc = acc + c * d
        return acc

    def equal(self, other: "VectorField") -> bool:
        keys = set(self.components) | set(other.components)
        return all(self.component(k).equal(other.component(k)) for k in keys)

    def __repr__(self):
        body = ", ".join(f"{v}: {c.render()}" for v, c in sorted(self.components.items()))
        return f"VectorField({body})"
