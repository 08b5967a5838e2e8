from fractions import Fraction

import pytest

from contactspin.clifford import fundamental_form
from contactspin.coframe import StructureDefinition, gauge_shift, make_builtin, rotate_frame
from contactspin.contact import torsion_form
from contactspin.curvature import (curvature, first_structure_residuals, four_form_identity,
                                   identity_suite, levi_civita_forms, sigma_T, torsion_connection_forms,
                                   torsion_curvature, verify_curvature_structure)
from contactspin.forms import A_INDEX, Form, wedge

F6 = fundamental_form(6)


def gen(i, n=6):
    return Form.generator(i, n)


@pytest.mark.parametrize("params", [(1, 1, 1, 1), (2, -1, 0, 1), (0, 0, 2, -2)])
def test_levi_civita_table(params):
    a, b, c, d = params
    lc = levi_civita_forms(make_builtin("m5", params))
    assert 2 * lc[1, 5] == a * gen(2) + b * gen(3) + c * gen(4)
    assert 2 * lc[1, 2] == 2 * gen(A_INDEX) - a * gen(5)
    assert lc.is_antisymmetric()


def test_flat_torus_has_zero_connection():
    lc = levi_civita_forms(make_builtin("torus"))
    assert not lc.nonzero()
    assert torsion_connection_forms(make_builtin("torus"), Form.zero(5)) == lc


@pytest.mark.parametrize("params", [(1, 1, 1, 1), (3, 0, 2, -1), (0, 0, 0, 0)])
def test_torsion_connection_is_abelian(params):
    tc = torsion_connection_forms(make_builtin("m5", params))
    assert tc.nonzero() == {(1, 2): gen(A_INDEX), (3, 4): gen(A_INDEX)}
    assert not first_structure_residuals(make_builtin("m5", params), tc)


def test_heisenberg_torsion_connection():
    tc = torsion_connection_forms(make_builtin("heisenberg"))
    assert tc.nonzero() == {(1, 2): 2 * gen(5, 5), (3, 4): 2 * gen(5, 5)}


@pytest.mark.parametrize("params", [(1, 1, 1, 1), (2, 0, 0, 2), (1, 2, 3, 4), (-2, 1, 1, 0)])
def test_torsion_ricci(params):
    a, b, c, d = (Fraction(x) for x in params)
    curv = torsion_curvature(make_builtin("m5", params))
    k = b * b + c * c - a * d
    assert curv.ricci_matrix() == [[k if i == j and i < 4 else 0 for j in range(5)] for i in range(5)]
    assert curv.OmegaA == -k * F6
    assert curv.scalar == 4 * k


def test_sasaki_curvature():
    curv = torsion_curvature(make_builtin("m5", (2, 0, 0, 2)))
    assert curv.OmegaA == 4 * F6
    assert curv.ricci_matrix() == [[-4 if i == j and i < 4 else 0 for j in range(5)] for i in range(5)]


def test_curvature_operator_structure():
    assert verify_curvature_structure(make_builtin("m5", (1, 1, 1, 1)))[0]
    assert verify_curvature_structure(make_builtin("heisenberg"))[0]
    sd = make_builtin("m5", (2, 0, 0, 2))
    ok, residuals = verify_curvature_structure(sd, levi_civita_forms(sd))
    assert not ok and residuals


@pytest.mark.parametrize("params", [(1, 2, 0, 1), (2, 0, 0, 2), (0, 1, 1, 3)])
def test_levi_civita_ricci_symmetric_and_gauge_free(params):
    sd = make_builtin("m5", params)
    curv = curvature(sd, levi_civita_forms(sd))
    assert curv.ricci_symmetric()
    shifted = gauge_shift(sd, [0, 0, 0, 0, 2])
    assert curvature(shifted, levi_civita_forms(shifted)).ricci == curv.ricci


def test_ricci_invariant_under_frame_rotation():
    sd = make_builtin("m5", (1, 2, 3, 4))
    rotated = rotate_frame(sd, Fraction(3, 5), Fraction(4, 5))
    assert torsion_curvature(rotated).ricci == torsion_curvature(sd).ricci


def test_sigma_T_examples():
    T = wedge(2 * fundamental_form(5), gen(5, 5))
    assert sigma_T(T) == 4 * Form.monomial((1, 2, 3, 4), 5)
    assert sigma_T(Form.zero(5)) == Form.zero(5)


@pytest.mark.parametrize("params", [(1, 1, 1, 1), (2, 0, 0, 2), (0, 1, 0, 0), (-1, 2, 0, 2)])
def test_four_form_identity(params):
    kappa = make_builtin("m5", params).params.kappa
    four, scal = four_form_identity(make_builtin("m5", params))
    assert four == 4 * kappa * Form.monomial((1, 2, 3, 4), 6)
    assert scal == -4 * kappa


@pytest.mark.parametrize("name,params", [("m5", (1, 0, 1, 1)), ("m5", (2, 1, -1, 0)),
                                          ("heisenberg", None), ("torus", None)])
def test_identity_suite(name, params):
    checks = identity_suite(make_builtin(name, params))
    assert len(checks) == 5
    assert all(c.passed and not c.skipped for c in checks), [c.to_json() for c in checks if not c.passed]


def hyperbolic_with_eta():
    """Normal, Killing, not quasi-Sasakian: de2 = e12, de3 = e13, de4 = e14, d eta = e12."""
    z = Form.zero(5)
    return StructureDefinition(5, (z, Form(5, {(1, 2): 1}), Form(5, {(1, 3): 1}), Form(5, {(1, 4): 1}),
                                   Form(5, {(1, 2): 1})), name="hyperbolic")


def test_delta_T_pairing_with_nonsymmetric_ricci():
    sd = hyperbolic_with_eta()
    assert torsion_form(sd) == Form(5, {(1, 2, 5): 1, (2, 3, 4): -2})
    ric = torsion_curvature(sd).ricci
    assert ric[4][1] - ric[1][4] == -2
    checks = {c.name: c for c in identity_suite(sd)}
    assert checks["deltaT_ricci_antisym"].passed
    assert checks["deltaT_ricci_antisym"].value == Form(5, {(2,): -2})


def test_quasi_sasakian_identities_fail_outside_their_hypotheses():
    checks = {c.name: c for c in identity_suite(hyperbolic_with_eta())}
    assert checks["omegaA_wedge_F"].skipped
    assert not checks["xi_sigmaT"].passed
    assert not checks["tachibana_hypothesis"].passed
