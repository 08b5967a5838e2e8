import json
from fractions import Fraction

import pytest

from contactspin.coframe import (BUILTINS, ModelParams, StructureDefinition, d_squared_residuals,
                                 gauge_shift, integrability_solutions, make_builtin, restrict_gauge,
                                 rotate_frame, same_constants, sasaki_reduction, scale_coframe,
                                 to_s3s3_frame, validate_structure)
from contactspin.clifford import fundamental_form
from contactspin.forms import Form

GRID_SAMPLE = [(1, 1, 1, 1), (2, 0, 0, 2), (0, 1, 0, 0), (1, 2, 3, 4), (0, 0, 0, 0), (-2, 1, -1, 2)]


@pytest.mark.parametrize("params", GRID_SAMPLE)
def test_family_is_integrable_with_unique_dA(params):
    sd = make_builtin("m5", params)
    report = validate_structure(sd)
    assert report.ok and report.integrability_sharp
    solution, nullspace = integrability_solutions(sd)
    assert solution == ModelParams(*params).kappa * fundamental_form(6)
    assert nullspace == []


@pytest.mark.parametrize("name", [b for b in BUILTINS if b != "m5family"])
def test_builtins_are_integrable(name):
    assert validate_structure(make_builtin(name), check_sharpness=False).ok


@pytest.mark.parametrize("extra", [
    Form(6, {(1, 2): 1}),
    Form(6, {(1, 3): 1}),
    Form(6, {(1, 5): 1}),
    Form(6, {(2, 5): -1, (3, 4): 2}),
    Form(6, {(1, 2): -1, (3, 4): 1}),
])
def test_perturbed_dA_fails(extra):
    sd = make_builtin("m5", (1, 1, 1, 1))
    bad = sd.with_d(6, sd.de(6) + extra)
    assert d_squared_residuals(bad)
    assert not validate_structure(bad).ok


def test_model_params_kappa():
    assert ModelParams(1, 2, 3, 4).kappa == -9
    assert ModelParams(1, 0, 1, 1).degenerate


def test_family_requires_parameters():
    with pytest.raises(ValueError):
        make_builtin("m5")
    with pytest.raises(ValueError):
        make_builtin("nonexistent")


def test_definition_validation_errors():
    with pytest.raises(ValueError):
        StructureDefinition(5, (Form.zero(5),) * 4)
    with pytest.raises(ValueError):
        StructureDefinition(5, (Form.generator(1, 5),) + (Form.zero(5),) * 4)
    with pytest.raises(ValueError):
        StructureDefinition(6, (Form.zero(6),) * 5 + (Form(6, {(1, 6): 1}),), has_A=True)


def test_json_roundtrip():
    sd = make_builtin("m5", (Fraction(1, 2), 1, -1, 3))
    again = StructureDefinition.from_json(json.loads(sd.dumps()))
    assert again == sd


def test_sasaki_reduction_gives_heisenberg():
    reduced = sasaki_reduction(make_builtin("m5", (2, 0, 0, 2)))
    assert same_constants(reduced, make_builtin("heisenberg"))
    with pytest.raises(ValueError):
        sasaki_reduction(make_builtin("m5", (1, 1, 0, 1)))


def test_s3s3_substitution():
    assert same_constants(to_s3s3_frame(make_builtin("m5", (0, 1, 0, 0))), make_builtin("s3s3_basis"))


def test_s3r2_leaf():
    leaf = restrict_gauge(make_builtin("m5", (1, 0, 0, 0)), Form.zero(5))
    assert same_constants(leaf, make_builtin("s3r2"))


def test_inconsistent_gauge_rejected():
    with pytest.raises(ValueError):
        restrict_gauge(make_builtin("m5", (1, 1, 1, 1)), Form.zero(5))


def test_gauge_shift_stays_integrable():
    sd = gauge_shift(make_builtin("m5", (1, 2, 0, 1)), [0, 0, 0, 0, 3])
    assert validate_structure(sd, check_sharpness=False).ok


def test_gauge_shift_must_keep_dA_free_of_A():
    with pytest.raises(ValueError):
        gauge_shift(make_builtin("m5", (1, 2, 0, 1)), [1, 0, 0, 0, 0])


def test_rotation_preserves_integrability_and_rejects_non_unit():
    sd = rotate_frame(make_builtin("m5", (1, 1, 1, 1)), Fraction(3, 5), Fraction(4, 5))
    assert validate_structure(sd, check_sharpness=False).ok
    with pytest.raises(ValueError):
        rotate_frame(sd, 1, 1)


def test_scaling_requires_rational_roots():
    hopf = StructureDefinition(5, (Form.zero(5), Form(5, {(3, 4): 1}), Form(5, {(2, 4): -1}),
                                   Form(5, {(2, 3): 1}), Form.zero(5)))
    scale_coframe(hopf, {i: 4 for i in range(1, 5)})
    with pytest.raises(ValueError):
        scale_coframe(hopf, {i: 2 for i in range(1, 5)})
