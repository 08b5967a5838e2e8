from fractions import Fraction
from itertools import product

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from contactspin.clifford import (GAMMA, IDENTITY, Subbundle, annihilator_kernel, clifford_matrix,
                                  compose_phi, deta_conditions, deta_shape, fundamental_form,
                                  lie_algebra_membership, lie_derivative_obstruction,
                                  subbundle_basis, subbundle_projectors, torsion_spectrum,
                                  verify_dim5_identities)
from contactspin.forms import Form, wedge


def test_anticommutation_relations_exact():
    for i, j in product(range(5), repeat=2):
        expected = -2 * IDENTITY if i == j else np.zeros((4, 4))
        assert np.array_equal(GAMMA[i] @ GAMMA[j] + GAMMA[j] @ GAMMA[i], expected)


def test_fundamental_form_spectrum():
    assert np.array_equal(clifford_matrix(fundamental_form()), np.diag([2j, -2j, 0, 0]))


def test_volume_elements():
    assert np.array_equal(clifford_matrix(Form.monomial((1, 2, 3, 4), 5)), np.diag([-1, -1, 1, 1]))
    assert np.array_equal(clifford_matrix(Form.monomial((1, 2, 3, 4, 5), 5)), -1j * IDENTITY)


def test_projectors_partition_identity():
    projs = subbundle_projectors()
    assert np.allclose(sum(projs.values()), IDENTITY)
    for p in projs.values():
        assert np.allclose(p @ p, p)
    dims = {b: subbundle_basis(b).shape[1] for b in Subbundle}
    assert dims == {Subbundle.PLUS: 1, Subbundle.MINUS: 1, Subbundle.TWO: 2}


def test_subbundle_parse_aliases():
    assert Subbundle.parse("+") is Subbundle.PLUS
    assert Subbundle.parse("sigma2") is Subbundle.TWO
    with pytest.raises(ValueError):
        Subbundle.parse("sigma3")


def test_action_rejects_auxiliary_generator():
    with pytest.raises(ValueError):
        clifford_matrix(Form.generator(6, 6))


U2_BASIS = (
    Form(5, {(1, 2): 1}),
    Form(5, {(3, 4): 1}),
    Form(5, {(1, 3): 1, (2, 4): 1}),
    Form(5, {(1, 4): 1, (2, 3): -1}),
)


def _sympy_sigma2_block(w: Form):
    gam = [sympy.Matrix(4, 4, lambda r, c, g=g: sympy.nsimplify(complex(g[r, c]).real)
                        + sympy.I * sympy.nsimplify(complex(g[r, c]).imag)) for g in GAMMA]
    m = sympy.zeros(4, 4)
    for idx, c in w.items():
        term = sympy.eye(4)
        for i in idx:
            term = term * gam[i - 1]
        m += sympy.Rational(c.numerator, c.denominator) * term
    # Sigma^2 is spanned by the last two standard basis vectors
    return m[2:, 2:]


def test_u2_kernel_criterion_against_exact_oracle():
    values = (Fraction(-1), Fraction(0), Fraction(2))
    for coeffs in product(values, repeat=4):
        w = sum((c * b for c, b in zip(coeffs, U2_BASIS)), Form.zero(5))
        assert lie_algebra_membership(w, "u2")
        proportional = coeffs[0] == coeffs[1] and coeffs[2] == 0 and coeffs[3] == 0
        exact = _sympy_sigma2_block(w).det() == 0
        numeric = annihilator_kernel(w, Subbundle.TWO).shape[1] > 0
        assert exact == numeric == proportional, coeffs


def test_lie_algebra_membership():
    F = fundamental_form()
    assert lie_algebra_membership(F, "u1diag")
    assert not lie_algebra_membership(F, "su2")
    assert lie_algebra_membership(U2_BASIS[0] - U2_BASIS[1], "su2")
    assert not lie_algebra_membership(Form(5, {(1, 5): 1}), "u2")
    with pytest.raises(ValueError):
        lie_algebra_membership(F, "so5")


def test_deta_shape_rejects_non_invariant():
    with pytest.raises(ValueError):
        deta_shape(Form(5, {(1, 3): 1}))


@pytest.mark.parametrize("shape,two,pm", [
    ((2, 0, 0, 2), True, False),
    ((1, 0, 0, -1), False, True),
    ((0, 1, 0, 0), False, True),
    ((1, 1, 0, 2), False, False),
    ((0, 0, 0, 0), True, True),
])
def test_deta_conditions(shape, two, pm):
    a, b, c, d = shape
    deta = Form(5, {(1, 2): a, (1, 3): b, (2, 4): b, (1, 4): c, (2, 3): -c, (3, 4): d})
    assert deta_conditions(deta) == {"annihilates_sigma2": two, "annihilates_sigma_pm": pm}


def test_lie_derivative_obstruction_vanishes_on_sigma2_for_sasaki():
    deta = 2 * fundamental_form()
    for psi in subbundle_basis(Subbundle.TWO).T:
        assert np.allclose(lie_derivative_obstruction(deta, psi), 0)
    psi = subbundle_basis(Subbundle.PLUS)[:, 0]
    assert np.allclose(lie_derivative_obstruction(deta, psi), -2j * psi)


def test_compose_phi():
    assert compose_phi(Form.generator(1, 5)) == Form.generator(2, 5)
    assert compose_phi(compose_phi(Form.generator(3, 5))) == -Form.generator(3, 5)


@given(st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=3), min_size=4, max_size=4))
@settings(max_examples=50, deadline=None)
def test_dimension_five_identities(coeffs):
    df = Form(5, {(i + 1,): c for i, c in enumerate(coeffs)})
    assert verify_dim5_identities(df)


def test_dimension_five_identities_reject_eta_component():
    with pytest.raises(ValueError):
        verify_dim5_identities(Form.generator(5, 5))


def test_torsion_spectrum_example():
    e5 = Form.generator(5, 5)
    deta = Form(5, {(1, 3): 1, (2, 4): 1})
    assert np.allclose(torsion_spectrum(wedge(e5, deta), Subbundle.TWO), [-2, 2])
    assert np.allclose(torsion_spectrum(wedge(e5, 2 * fundamental_form()), Subbundle.TWO), [0, 0])
