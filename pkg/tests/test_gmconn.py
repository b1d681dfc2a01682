from fractions import Fraction as F

import pytest

from openquintic import gmconn
from openquintic.numfield import QuadRat
from openquintic.report import all_pass
from openquintic.symca import MODULI_VARS, Poly, RatFunc, register_symbol

s = {name: RatFunc.variable(name) for name in MODULI_VARS}
register_symbol("z")
z = RatFunc.variable("z")


def test_theta_power_expansion():
    # oracle: iterate theta = z d/dz by hand; theta^4 = z d + 7 z^2 d^2
    # + 6 z^3 d^3 + z^4 d^4
    op = [Poly.constant(1)]
    for _ in range(4):
        op = gmconn._theta_apply(op)
    zp = Poly.variable("z")
    assert op[0].is_zero()
    assert op[1] == zp
    assert op[2] == 7 * zp ** 2
    assert op[3] == 6 * zp ** 3
    assert op[4] == zp ** 4


def test_transcribed_coefficients():
    a1, a2, a3, a4 = gmconn._transcribed_a_z()
    assert a4.equal((-8 * z + 6) / (z * (z - 1)))
    assert a1.equal(-24 / (625 * z ** 3 * (z - 1)))
    assert a3.equal((-72 * z + 35) / (5 * z ** 2 * (z - 1)))


def test_pf_data_cross_check_passes():
    data = gmconn.pf_data()
    # the five coefficients live in the s-variables once assembled
    zs = s["s4"] ** 10 / s["s0"] ** 10
    assert data.a[4].equal((-8 * zs + 6) / (zs * (zs - 1)))
    assert data.p.equal(
        RatFunc.constant(QuadRat(0, F(3, 200))) * s["s4"] ** 5 / s["s0"] ** 5)
    assert data.a[0].equal(-data.p / (zs ** 4 * (zs - 1)))


def test_inhomogeneity_recovers_classical_operator():
    # p = 0 leaves the homogeneous coefficients a1..a4 untouched
    data = gmconn.pf_data()
    derived = gmconn._derived_a_z()
    zs = s["s4"] ** 10 / s["s0"] ** 10
    for i, d in enumerate(derived, start=1):
        assert data.a[i].equal(d.eval_rf({"z": zs}))


def test_eta_frame_rows():
    ct = gmconn._build_c_tilde()
    t0 = s["s0"] ** 2
    t4 = s["s4"] ** 10
    assert ct[0, 0].equal(1)
    assert all(ct[0, j].is_zero() for j in range(1, 5))
    assert ct[1, 1].equal(t0) and ct[1, 0].is_zero()
    # one application of the derivation rule to t0 * omega_1
    assert ct[2, 1].equal(-t0 ** 6 / (5 * t4))
    assert ct[2, 2].equal(-t0 ** 7 / (5 * t4))
    assert ct[2, 0].is_zero() and ct[2, 3].is_zero()


def test_frame_matrix_is_inverse():
    prod = gmconn._build_c_tilde() @ gmconn.build_C()
    from openquintic.symca import RFMatrix
    assert prod == RFMatrix.identity(5)


def test_b1_structure():
    b1 = gmconn.build_B1()
    for comp in b1.components.values():
        assert all(comp[0, j].is_zero() for j in range(5))
        for i in (1, 2, 3):
            for j in range(5):
                if j != i + 1:
                    assert comp[i, j].is_zero()
    assert set(b1.components) <= {"s0", "s4"}


def test_b2_t0_contraction_shift():
    b2 = gmconn.build_B2()  # raises ConventionError if the check fails
    shift = b2.contract(gmconn.T0_FIELD)
    for j in range(5):
        assert shift[0, j].is_zero()
    for i in (1, 2, 3):
        for j in range(5):
            want = RatFunc.constant(1 if j == i + 1 else 0)
            assert shift[i, j].equal(want)


def test_s_matrix_entries():
    a, b, c, d = gmconn.frame_abcd([s[f"s{i}"] for i in range(9)])
    assert a.equal(-(3125 * s["s0"] ** 8 + s["s3"]) / s["s5"])
    assert d.equal(625 * (s["s4"] ** 10 - s["s0"] ** 10))
    assert b.equal(-d / s["s5"])
    assert (c * b - s["s6"] * a).equal(3125 * s["s0"] ** 6 + s["s2"])
    mat = gmconn.build_S()
    assert mat[2, 1].equal(a) and mat[2, 2].equal(b)
    assert mat[3, 0].equal(s["s7"]) and mat[4, 4].equal(d)


def test_a_row_zero_and_transversality():
    a = gmconn.build_A()
    for comp in a.components.values():
        assert all(comp[0, j].is_zero() for j in range(5))
        assert all(comp[1, j].is_zero() for j in (0, 3, 4))
        assert comp[2, 4].is_zero()


def test_contraction_entry_values(vf_report):
    # row alpha_1, column alpha_2 of the contracted matrix is 1; row
    # alpha_3, column alpha_4 is -1; row alpha_2 carries F and Y
    r = gmconn.modular_vector_field()
    contracted = gmconn.build_A().contract(r)
    assert contracted[1, 2].equal(RatFunc.constant(1))
    assert contracted[3, 4].equal(RatFunc.constant(-1))
    assert contracted[2, 3].equal(gmconn.yukawa())
    assert contracted[2, 0].equal(gmconn.disk_function())


@pytest.fixture(scope="module")
def vf_report():
    return gmconn.verify_vector_field()


def test_verify_normal_form_all_entries(vf_report):
    entry_lines = [l for l in vf_report if l.name.startswith("vf.entry")]
    assert len(entry_lines) == 25
    assert all(l.ok for l in entry_lines)


def test_derived_field_matches_closed_formulas(vf_report):
    derived_lines = [l for l in vf_report if l.name.startswith("vf.derived")]
    assert len(derived_lines) == 11
    assert all(l.ok for l in derived_lines)


def test_closed_block_of_contraction(vf_report):
    # rows/cols alpha_1..alpha_4 only contain 0, +-1 and Y
    r = gmconn.modular_vector_field()
    contracted = gmconn.build_A().contract(r)
    y = gmconn.yukawa()
    for i in range(1, 5):
        for j in range(1, 5):
            val = contracted[i, j]
            assert val.is_zero() or val.equal(RatFunc.constant(1)) \
                or val.equal(RatFunc.constant(-1)) or val.equal(y)


def test_yukawa_component_values():
    r = gmconn.modular_vector_field()
    assert r.component("s7").equal(-s["s8"])
    want_s4 = (5 ** 6 * s["s0"] ** 8 * s["s4"] + 5 * s["s3"] * s["s4"]) \
        / (10 * s["s5"])
    assert r.component("s4").equal(want_s4)


def test_connection_suite_passes():
    assert all_pass(gmconn.verify_connection())
