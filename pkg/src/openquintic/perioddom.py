"""The gauge group G, its action on the moduli coordinates, and the
normal form of period matrices.

G is the upper-triangular stabiliser of the frame pairing; its chart
uses six multiplicative/shear coordinates g1..g6 and two shifts h1, h2.
The matrix depends on g1 only through g1^2, so the chart is two-to-one
in the g1 sign; composition and inversion fix the representative by
multiplying/inverting g1 directly.

``tau_normalize`` brings a period matrix satisfying the pairing
relations into the fixed six-parameter normal form by a unique group
element, following the closed formulas for the first six coordinates
and a 2x2 linear solve for the two shifts.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .gmconn import frame_abcd
from .numfield import QuadRat
from .report import ReportLine
from .symca import RatFunc, RFMatrix, register_symbol


class ChartError(ArithmeticError):
    """A group-chart precondition (g1, g2 invertible) failed."""


class NormalizationError(ArithmeticError):
    """A period matrix cannot be brought to the normal form."""


class ActionDomainError(ArithmeticError):
    """The group action left the allowed moduli locus."""


# -- generic exact matrix helpers (duck-typed scalars) ----------------------

def mat_mul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    return [[sum((a[i][t] * b[t][j] for t in range(k)),
                 start=0 * a[0][0]) for j in range(m)] for i in range(n)]


def mat_transpose(a):
    return [list(col) for col in zip(*a)]


def mat_inverse(a):
    """Gauss-Jordan inverse over any exact field (QuadRat, RatFunc)."""
    n = len(a)
    zero = 0 * a[0][0]
    one = zero + 1
    work = [list(row) + [one if i == j else zero for j in range(n)]
            for i, row in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if work[r][col] != zero), None)
        if piv is None:
            raise NormalizationError("matrix inverse of a singular matrix")
        work[col], work[piv] = work[piv], work[col]
        inv = one / work[col][col]
        work[col] = [x * inv for x in work[col]]
        for r in range(n):
            if r != col and work[r][col] != zero:
                f = work[r][col]
                work[r] = [x - f * y for x, y in zip(work[r], work[col])]
    return [row[n:] for row in work]


# -- the group ----------------------------------------------------------------

@dataclass(frozen=True)
class GroupElement:
    """A point of G in the (g1..g6, h1, h2) chart; g1, g2 invertible."""

    g1: object
    g2: object
    g3: object = 0
    g4: object = 0
    g5: object = 0
    g6: object = 0
    h1: object = 0
    h2: object = 0

    @staticmethod
    def identity() -> "GroupElement":
        return GroupElement(QuadRat(1), QuadRat(1), QuadRat(0), QuadRat(0),
                            QuadRat(0), QuadRat(0), QuadRat(0), QuadRat(0))

    def coordinates(self) -> tuple:
        return (self.g1, self.g2, self.g3, self.g4, self.g5, self.g6,
                self.h1, self.h2)

    def to_matrix(self):
        """The displayed 5x5 upper-triangular matrix of the chart.

        The (1,2) entry is -g3/g1^2: together with the printed (3,4)
        entry g2 g3 this is the unique scaling for which the four
        defining relations of G hold identically.
        """
        g1, g2, g3, g4, g5, g6, h1, h2 = self.coordinates()
        zero = g1 - g1
        one = g1 / g1  # raises on g1 == 0
        if g2 == zero:
            raise ChartError("chart requires invertible g2")
        k = g1 * g1
        return [
            [one, zero, zero, h1, h2],
            [zero, one / k, -g3 / k, (g4 - g3 * g6) / k, (g5 - g3 * g4) / k],
            [zero, zero, one / g2, g6 / g2, g4 / g2],
            [zero, zero, zero, g2, g2 * g3],
            [zero, zero, zero, zero, k],
        ]

    def compose(self, other: "GroupElement") -> "GroupElement":
        """Group multiplication; ``to_matrix`` of the result equals the
        matrix product.  The g1 coordinate of the product is g1 * g1'."""
        m = mat_mul(self.to_matrix(), other.to_matrix())
        return _from_matrix(m, self.g1 * other.g1)

    def inverse(self) -> "GroupElement":
        m = mat_inverse(self.to_matrix())
        return _from_matrix(m, 1 / self.g1)

    def act_moduli(self, point: Sequence) -> list:
        """Right action on a nine-component moduli point.

        The g1-exponents follow from the frame identity
        S(g . s) = g^T S(s) K with K = diag(1, k, k^2, k^3, k^4),
        k = g1^2 (:func:`verify_action_derivation` re-derives them).
        """
        g1, g2, g3, g4, g5, g6, h1, h2 = self.coordinates()
        s0, s1, s2, s3, s4, s5, s6, s7, s8 = point
        a, b, _c, _d = frame_abcd(point)
        c = _c
        k = g1 * g1
        new = [
            s0 * g1,
            s1 * k**2 + c * k * g2 * g3 + a * k * g4 / g2 - g3 * g4 + g5,
            s2 * k**3 + s6 * k**2 * g2 * g3 + b * k**2 * g4 / g2,
            s3 * k**4 + s5 * k**3 * g2 * g3,
            s4 * g1,
            s5 * k**3 * g2,
            s6 * k**2 * g2 + b * k**2 * g6 / g2,
            s7 * g2 + h1,
            s7 * g2 * g3 + s8 * k + h2,
        ]
        if _is_degenerate(new):
            raise ActionDomainError("image point leaves the allowed locus")
        return new


def _is_degenerate(point) -> bool:
    s0, s4, s5 = point[0], point[4], point[5]
    zero = s0 - s0
    if isinstance(s0, RatFunc):
        return s0.is_zero() or s4.is_zero() or s5.is_zero() \
            or (s0**10 - s4**10).is_zero()
    return s0 == zero or s4 == zero or s5 == zero or s0**10 == s4**10


def _from_matrix(m, g1) -> GroupElement:
    """Read chart coordinates off a group matrix, with g1 given (the
    matrix only determines g1^2)."""
    k = g1 * g1
    g2 = m[3][3]
    zero = g2 - g2
    if g2 == zero or k == zero:
        raise ChartError("matrix left the chart (g1 or g2 vanished)")
    g3 = m[3][4] / g2
    g6 = m[2][3] * g2
    g4 = m[2][4] * g2
    g5 = m[1][4] * k + g3 * g4
    elt = GroupElement(g1, g2, g3, g4, g5, g6, m[0][3], m[0][4])
    if elt.to_matrix() != m:
        raise ChartError("matrix is not a member of the group chart")
    return elt


def group_to_text(g: GroupElement) -> str:
    """Eight chart scalars in fixed order, space-separated."""
    return " ".join(str(QuadRat.coerce(x)) for x in g.coordinates())


def group_from_text(text: str) -> GroupElement:
    from .numfield import qr_parse
    parts = text.split()
    if len(parts) != 8:
        raise ValueError(f"expected 8 scalars, got {len(parts)}")
    return GroupElement(*(qr_parse(p) for p in parts))


# -- pairing matrices -----------------------------------------------------------

def cycle_pairing() -> list[list[QuadRat]]:
    """Intersection matrix of the homology frame (the relative class is
    degenerate, so row and column 0 vanish)."""
    q = lambda n: QuadRat(n)
    return [
        [q(0), q(0), q(0), q(0), q(0)],
        [q(0), q(0), q(0), q(1), q(0)],
        [q(0), q(0), q(0), q(0), q(1)],
        [q(0), q(-1), q(0), q(0), q(0)],
        [q(0), q(0), q(-1), q(0), q(0)],
    ]


def frame_pairing() -> list[list[QuadRat]]:
    """The constant pairing matrix of the alpha frame."""
    q = lambda n: QuadRat(n)
    return [
        [q(0), q(0), q(0), q(0), q(0)],
        [q(0), q(0), q(0), q(0), q(1)],
        [q(0), q(0), q(0), q(1), q(0)],
        [q(0), q(0), q(-1), q(0), q(0)],
        [q(0), q(-1), q(0), q(0), q(0)],
    ]


def _psi_inv_t() -> list[list[QuadRat]]:
    """Inverse-transpose of the cycle pairing on its symplectic block.

    The full matrix is singular along the relative direction; the
    pairing formula only sees the 4x4 absolute block, which is inverted
    exactly and re-embedded with zero first row and column.
    """
    psi = cycle_pairing()
    block = [[psi[i][j] for j in range(1, 5)] for i in range(1, 5)]
    inv_t = mat_transpose(mat_inverse(block))
    out = [[QuadRat(0)] * 5 for _ in range(5)]
    for i in range(4):
        for j in range(4):
            out[i + 1][j + 1] = inv_t[i][j]
    return out


def check_period_relations(p) -> bool:
    """True iff P^T Psi^-T P equals the frame pairing exactly."""
    coerce = (lambda x: x)
    sample = p[0][0]
    if isinstance(sample, RatFunc):
        coerce = RatFunc.coerce
    n = [[coerce(x) for x in row] for row in _psi_inv_t()]
    phi = [[coerce(x) for x in row] for row in frame_pairing()]
    lhs = mat_mul(mat_mul(mat_transpose(p), n), p)
    return all(lhs[i][j] == phi[i][j] for i in range(5) for j in range(5))


# -- the tau normal form -----------------------------------------------------------

@dataclass(frozen=True)
class TauData:
    """The normalised period matrix and its six independent entries."""

    tau: tuple
    matrix: list

    def __iter__(self):
        return iter(self.tau)


def tau_shape(tau: Sequence) -> list[list]:
    """Build the normal form from six scalars (entries (4,2) and (4,3)
    are the forced combinations -t0*t3 + t1 and -t0)."""
    t0, t1, t2, t3, t4, t5 = tau
    one = 0 * t0 + 1
    zero = 0 * t0
    return [
        [one, t4, t5, zero, zero],
        [zero, t0, one, zero, zero],
        [zero, one, zero, zero, zero],
        [zero, t1, t3, one, zero],
        [zero, t2, -t0 * t3 + t1, -t0, one],
    ]


def _is_tau_shaped(m) -> bool:
    zero = m[0][0] - m[0][0]
    one = zero + 1
    fixed = {(0, 0): one, (0, 3): zero, (0, 4): zero,
             (1, 2): one, (1, 3): zero, (1, 4): zero,
             (2, 1): one, (2, 0): zero, (2, 2): zero, (2, 3): zero, (2, 4): zero,
             (3, 3): one, (3, 4): zero,
             (4, 4): one,
             (1, 0): zero, (3, 0): zero, (4, 0): zero}
    if any(m[i][j] != v for (i, j), v in fixed.items()):
        return False
    t0, t1, t3 = m[1][1], m[3][1], m[3][2]
    return m[4][2] == -t0 * t3 + t1 and m[4][3] == -t0


def _normalizer_coords(p):
    """The six leading coordinates of g' = g^-1 read off the period
    matrix (g is the normalising element), except that g1' is returned
    squared."""
    minor = p[1][1] * p[2][2] - p[1][2] * p[2][1]
    zero = p[0][0] - p[0][0]
    if p[2][1] == zero:
        raise NormalizationError("entry (2,1) of the period matrix vanishes")
    if minor == zero:
        raise NormalizationError("the (1,2)x(1,2) minor of the period matrix vanishes")
    g1_sq = 1 / p[2][1]
    g2 = -p[2][1] / minor
    g3 = -p[2][2] / p[2][1]
    g4 = (-p[1][2] * p[2][3] + p[1][3] * p[2][2]) / minor
    g5 = (p[1][1] * p[2][2] * p[2][4] - p[1][2] * p[2][1] * p[2][4]
          + p[1][2] * p[2][2] * p[2][3] - p[1][3] * p[2][2] ** 2) \
        / (p[1][1] * p[2][1] * p[2][2] - p[1][2] * p[2][1] ** 2)
    g6 = (p[1][1] * p[2][3] - p[1][3] * p[2][1]) / minor
    return g1_sq, g2, g3, g4, g5, g6


def _normalize_with_root(p, g1_prime) -> tuple[GroupElement, TauData]:
    """Core normalisation once a square root of 1/P[2][1] is chosen."""
    _g1sq, g2p, g3p, g4p, g5p, g6p = _normalizer_coords(p)
    zero = p[0][0] - p[0][0]

    def tau_of(h1, h2):
        gp = GroupElement(g1_prime, g2p, g3p, g4p, g5p, g6p, h1, h2)
        g = gp.inverse()
        return g, mat_mul(p, g.to_matrix())

    one = zero + 1
    _, base = tau_of(zero, zero)
    _, e1 = tau_of(one, zero)
    _, e2 = tau_of(zero, one)
    # entries (0,3) and (0,4) are affine in (h1', h2'); solve for zero
    a11 = e1[0][3] - base[0][3]
    a12 = e2[0][3] - base[0][3]
    a21 = e1[0][4] - base[0][4]
    a22 = e2[0][4] - base[0][4]
    det = a11 * a22 - a12 * a21
    if det == zero:
        raise NormalizationError("shift system for (h1, h2) is singular")
    h1 = (-base[0][3] * a22 + base[0][4] * a12) / det
    h2 = (-base[0][4] * a11 + base[0][3] * a21) / det
    g, tau = tau_of(h1, h2)
    if not _is_tau_shaped(tau):
        raise NormalizationError("normalised matrix does not have the tau shape")
    td = TauData(tau=(tau[1][1], tau[3][1], tau[4][1], tau[3][2],
                      tau[0][1], tau[0][2]), matrix=tau)
    return g, td


def tau_normalize(p: Sequence[Sequence[QuadRat]]) -> tuple[GroupElement, TauData]:
    """The unique group element g with P g in the normal form, plus the
    normalised matrix.

    Preconditions: P satisfies the pairing relations, P[2][1] and the
    (1,2)x(1,2) minor do not vanish, and 1/P[2][1] admits a square root
    inside Q(sqrt5) (true for round-trip constructed inputs).
    """
    p = [[QuadRat.coerce(x) for x in row] for row in p]
    if not check_period_relations(p):
        raise NormalizationError("period matrix violates the pairing relations")
    g1sq = _normalizer_coords(p)[0]
    root = g1sq.sqrt()
    if root is None:
        raise NormalizationError(
            "1/P[2][1] has no square root in Q(sqrt5)")
    return _normalize_with_root(p, root)


# -- symbolic verification suites ------------------------------------------------

def _sym_group(prefix: str = "") -> GroupElement:
    names = [f"{prefix}g{i}" for i in range(1, 7)] + [f"{prefix}h1", f"{prefix}h2"]
    for n in names:
        register_symbol(n)
    vals = [RatFunc.variable(n) for n in names]
    return GroupElement(*vals)


def verify_group_relations() -> list[ReportLine]:
    """The chart image satisfies the four defining relations of G, and
    right-multiplication preserves the pairing relations (g^T Phi g = Phi)."""
    g = _sym_group().to_matrix()
    lines = []
    rel = [
        ("g11*g44 == 1", g[1][1] * g[4][4] - 1),
        ("g22*g33 == 1", g[2][2] * g[3][3] - 1),
        ("g12*g44 + g22*g34 == 0", g[1][2] * g[4][4] + g[2][2] * g[3][4]),
        ("g13*g44 + g23*g34 - g24*g33 == 0",
         g[1][3] * g[4][4] + g[2][3] * g[3][4] - g[2][4] * g[3][3]),
    ]
    for i, (name, val) in enumerate(rel, 1):
        lines.append(ReportLine(f"group.relation{i}", val.is_zero(),
                                name.split(" == ")[0], name.split(" == ")[1]))
    phi = [[RatFunc.constant(x) for x in row] for row in frame_pairing()]
    gmat = _sym_group("q_")
    gm = gmat.to_matrix()
    lhs = mat_mul(mat_mul(mat_transpose(gm), phi), gm)
    ok = all(lhs[i][j].equal(phi[i][j]) for i in range(5) for j in range(5))
    lines.append(ReportLine("group.pairing_stabilized", ok,
                            "g^T Phi g", "Phi"))
    return lines


def verify_action_derivation() -> list[ReportLine]:
    """Re-derive the moduli action from the frame identity
    S(g . s) = g^T S(s) K and compare coordinate by coordinate.

    K = diag(1, k, .., k^4) with k = g1^2 accounts for rescaling the
    holomorphic form and its derivative tower when (s0, s4) moves to
    (g1 s0, g1 s4)."""
    from .gmconn import build_S

    g = _sym_group()
    s = [RatFunc.variable(f"s{i}") for i in range(9)]
    smat = build_S().rows
    k = RatFunc.variable("g1") ** 2
    kmat = [[k**i if i == j else RatFunc.constant(0) for j in range(5)]
            for i in range(5)]
    m = mat_mul(mat_mul(mat_transpose(g.to_matrix()), smat), kmat)

    lines = []
    pattern_zero = [(0, 1), (0, 2), (0, 3), (0, 4), (1, 0), (1, 2), (1, 3),
                    (1, 4), (2, 0), (2, 3), (2, 4), (3, 4)]
    ok = all(m[i][j].is_zero() for i, j in pattern_zero) \
        and m[0][0].equal(1) and m[1][1].equal(1)
    lines.append(ReportLine("group.action_pattern", ok,
                            "g^T S K zero/one pattern", "frame pattern"))

    new = g.act_moduli(s)
    a_new, b_new, c_new, d_new = frame_abcd(new)
    table = [
        ("s7", m[3][0], new[7]),
        ("s8", m[4][0], new[8]),
        ("s1", m[4][1], new[1]),
        ("s2", m[4][2], new[2]),
        ("s3", m[4][3], new[3]),
        ("s5", m[3][3], new[5]),
        ("s6", m[3][2], new[6]),
        ("c", m[3][1], c_new),
        ("a", m[2][1], a_new),
        ("b", m[2][2], b_new),
        ("d", m[4][4], d_new),
    ]
    for name, lhs, rhs in table:
        lines.append(ReportLine(f"group.action.{name}", lhs.equal(rhs),
                                f"(g^T S K) entry for {name}",
                                f"action formula for {name}"))
    return lines


def verify_tau_formulas() -> list[ReportLine]:
    """Symbolic check of the normalisation formulas: for P = tau(t) * g
    the six closed formulas recover the coordinates of g (g1 squared),
    and the shift solve recovers (h1, h2)."""
    for i in range(6):
        register_symbol(f"t{i}")
    t = [RatFunc.variable(f"t{i}") for i in range(6)]
    g = _sym_group()
    p = mat_mul(tau_shape(t), g.to_matrix())

    lines = []
    g1sq, g2p, g3p, g4p, g5p, g6p = _normalizer_coords(p)
    checks = [
        ("g1_squared", g1sq, g.g1 * g.g1),
        ("g2", g2p, g.g2),
        ("g3", g3p, g.g3),
        ("g4", g4p, g.g4),
        ("g5", g5p, g.g5),
        ("g6", g6p, g.g6),
    ]
    for name, lhs, rhs in checks:
        lines.append(ReportLine(f"tau.formula.{name}", lhs.equal(rhs),
                                f"normaliser {name} from P", name))
    _g, td = _normalize_with_root(p, g.g1)
    ok = all(td.tau[i].equal(t[i]) for i in range(6))
    lines.append(ReportLine("tau.recovers_tau", ok, "normalised matrix", "tau(t)"))
    return lines
