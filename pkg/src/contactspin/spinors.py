"""Parallel spinors, the algebraic Killing equation and the model-level theorem battery."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import sqrt
from typing import Dict, Optional

import numpy as np

from .clifford import (DEFAULT_TOL, GAMMA, IDENTITY, Subbundle, annihilator_kernel, clifford_matrix,
                       compose_phi, deta_shape, fundamental_form, kernel_basis, same_subspace,
                       subbundle_basis, torsion_spectrum)
from .coframe import (StructureDefinition, make_builtin, restrict_gauge, same_constants,
                      sasaki_reduction, scale_coframe, to_s3s3_frame, unscale_form, validate_structure)
from .contact import (AContamination, CriterionInapplicable, classify, codifferential, dF, eta,
                      lee_form, nijenhuis, proportional_to_F, torsion_form, twisted_differential)
from .curvature import (ConnectionForms, curvature, four_form_identity, torsion_connection,
                        torsion_curvature, verify_curvature_structure)
from .forms import A_INDEX, Form, hodge, wedge
from .report import Check, Report, exact_check, numeric_check, skip

BUNDLES = (Subbundle.PLUS, Subbundle.MINUS, Subbundle.TWO)


@dataclass(frozen=True)
class SpinorFieldBasis:
    """Orthonormal constant spinors (columns of a 4xk array) in one subbundle."""

    basis: np.ndarray
    bundle: Subbundle

    @property
    def dim(self) -> int:
        return int(self.basis.shape[1])

    def to_json(self) -> dict:
        from .clifford import spinor_to_json

        return {"bundle": self.bundle.value, "dim": self.dim,
                "basis": [spinor_to_json(self.basis[:, k]) for k in range(self.dim)]}


def _pair_matrix(i: int, j: int) -> np.ndarray:
    return GAMMA[i - 1] @ GAMMA[j - 1]


def spin_lift(coefficients: Dict[tuple, Fraction]) -> np.ndarray:
    """``1/2 sum_{i<j} w_ij e_i e_j`` for a 2-form given by its components."""
    out = np.zeros((4, 4), dtype=complex)
    for (i, j), c in coefficients.items():
        if c:
            out = out + 0.5 * float(c) * _pair_matrix(i, j)
    return out


def connection_lifts(conn: ConnectionForms) -> Dict[int, np.ndarray]:
    return {mu: spin_lift(conn.component(mu)) for mu in range(1, conn.n + 1)}


def _commutes(x: np.ndarray, y: np.ndarray) -> bool:
    return bool(np.allclose(x @ y, y @ x, atol=1e-12))


def effective_lifts(sd: StructureDefinition, conn: ConnectionForms) -> Dict[int, np.ndarray]:
    """Spin lifts that constrain constant parallel spinors.

    When ``dA = 0`` and the A-lift commutes with the others, A is locally
    ``dg`` and the gauge rotation ``exp(-g L_A)`` removes it, so it is dropped.
    """
    lifts = connection_lifts(conn)
    if sd.has_A and A_INDEX in lifts:
        la = lifts[A_INDEX]
        if not sd.de(A_INDEX) and all(_commutes(la, m) for mu, m in lifts.items() if mu != A_INDEX):
            lifts.pop(A_INDEX)
    return lifts


def _restricted_kernel(mats, bundle, tol) -> np.ndarray:
    basis = subbundle_basis(bundle)
    if not mats:
        return basis
    stacked = np.vstack([m @ basis for m in mats])
    coeffs = kernel_basis(stacked, tol)
    if coeffs.shape[1] == 0:
        return np.zeros((4, 0), dtype=complex)
    q, _ = np.linalg.qr(basis @ coeffs)
    return q


def parallel_spinors(sd: StructureDefinition, conn: Optional[ConnectionForms] = None,
                     tol: float = DEFAULT_TOL) -> Dict[Subbundle, SpinorFieldBasis]:
    """Joint kernel of the connection spin lifts, split by subbundle."""
    conn = torsion_connection(sd) if conn is None else conn
    mats = [m for m in effective_lifts(sd, conn).values() if np.any(m)]
    return {b: SpinorFieldBasis(_restricted_kernel(mats, b, tol), b) for b in BUNDLES}


def holonomy_algebra(sd: StructureDefinition, conn: ConnectionForms, tol: float = DEFAULT_TOL):
    """Spin images of the curvature operators, closed under brackets with the lifts."""
    curv = curvature(sd, conn)
    gens = []
    for a in range(1, 6):
        for b in range(a + 1, 6):
            m = spin_lift({(i, j): curv[i, j](a, b) for i in range(1, 6) for j in range(i + 1, 6)})
            if np.any(np.abs(m) > tol):
                gens.append(m)
    lifts = list(effective_lifts(sd, conn).values())
    basis = []

    def add(m):
        vecs = np.array([x.ravel() for x in basis + [m]])
        if np.linalg.matrix_rank(vecs, tol=tol) > len(basis):
            basis.append(m)
            return True
        return False

    queue = [g for g in gens if add(g)]
    while queue:
        x = queue.pop()
        for lift in lifts:
            y = lift @ x - x @ lift
            if np.any(np.abs(y) > tol) and add(y):
                queue.append(y)
    return basis


def parallel_spinors_by_holonomy(sd: StructureDefinition, conn: Optional[ConnectionForms] = None,
                                 tol: float = DEFAULT_TOL) -> Dict[Subbundle, SpinorFieldBasis]:
    conn = torsion_connection(sd) if conn is None else conn
    algebra = holonomy_algebra(sd, conn, tol)
    return {b: SpinorFieldBasis(_restricted_kernel(algebra, b, tol), b) for b in BUNDLES}


def routes_agree(x: Dict[Subbundle, SpinorFieldBasis], y: Dict[Subbundle, SpinorFieldBasis]) -> bool:
    return all(same_subspace(x[b].basis, y[b].basis) for b in BUNDLES)


# Killing equation ------------------------------------------------------------------

@dataclass(frozen=True)
class KillingProblem:
    """Data of ``(2 dPhi - T) . psi = 0`` with ``T = eta ^ d eta - (theta o phi) ^ F``."""

    dPhi: Form
    T: Form
    theta: Form
    deta: Form

    @classmethod
    def from_data(cls, dPhi: Form, theta: Form, deta: Form) -> "KillingProblem":
        F = fundamental_form(5)
        T = wedge(eta(5), deta) - wedge(compose_phi(theta), F)
        return cls(dPhi, T, theta, deta)

    @classmethod
    def from_structure(cls, sd: StructureDefinition, dPhi: Optional[Form] = None) -> "KillingProblem":
        def five(w: Form) -> Form:
            if w.involves(A_INDEX):
                raise AContamination(f"{w} has an A component")
            return Form(5, w.terms)

        return cls(dPhi if dPhi is not None else Form.zero(5), five(torsion_form(sd)),
                   five(lee_form(sd)), five(sd.de(5)))


@dataclass(frozen=True)
class KillingSolution:
    sigma_pm_kernel: np.ndarray
    sigma_minus_kernel: np.ndarray
    sigma2_kernel: np.ndarray
    condition_pm: bool
    condition_2: bool

    @property
    def consistent(self) -> bool:
        pm = self.sigma_pm_kernel.shape[1] > 0
        if pm != (self.sigma_minus_kernel.shape[1] > 0):
            return False
        return pm == self.condition_pm and (self.sigma2_kernel.shape[1] > 0) == self.condition_2

    def to_json(self) -> dict:
        return {"sigma_plus_dim": int(self.sigma_pm_kernel.shape[1]),
                "sigma_minus_dim": int(self.sigma_minus_kernel.shape[1]),
                "sigma2_dim": int(self.sigma2_kernel.shape[1]),
                "condition_pm": self.condition_pm, "condition_2": self.condition_2,
                "consistent": self.consistent}


def killing_conditions(p: KillingProblem):
    """The form-level conditions: ``2 dPhi = -theta, *4 deta = -deta`` and ``2 dPhi = theta, *4 deta = deta``."""
    star = hodge(p.deta, "restricted4")
    two_dphi = 2 * p.dPhi
    return (two_dphi == -p.theta and star == -p.deta,
            two_dphi == p.theta and star == p.deta)


def killing_equation_solve(p: KillingProblem, tol: float = DEFAULT_TOL) -> KillingSolution:
    op = 2 * p.dPhi - p.T
    cond_pm, cond_2 = killing_conditions(p)
    return KillingSolution(
        annihilator_kernel(op, Subbundle.PLUS, tol),
        annihilator_kernel(op, Subbundle.MINUS, tol),
        annihilator_kernel(op, Subbundle.TWO, tol),
        cond_pm, cond_2,
    )


@dataclass(frozen=True)
class DilationConsequences:
    deta_proportional_F: bool
    a_value: Optional[Fraction]
    phi_constant_forced: bool
    consistent_with_closure: bool

    def to_json(self) -> dict:
        return {"deta_proportional_F": self.deta_proportional_F,
                "a_value": None if self.a_value is None else str(self.a_value),
                "phi_constant_forced": self.phi_constant_forced,
                "consistent_with_closure": self.consistent_with_closure}


def dilation_consequences(p: KillingProblem, dF_is_zero: bool) -> DilationConsequences:
    """What a Sigma^2 solution forces when ``a`` in ``d eta = a F`` is constant.

    Closedness of ``d eta`` gives ``da + 2 a dPhi = 0``; with ``da = 0`` this kills
    ``dPhi`` unless ``a = 0``, in which case ``dF = 0`` gives ``2 dPhi = theta = 0``.
    """
    _, cond_2 = killing_conditions(p)
    if not cond_2:
        raise ValueError("the Sigma^2 condition does not hold for this problem")
    a = proportional_to_F(p.deta)
    forced = a is not None and (a != 0 or dF_is_zero)
    return DilationConsequences(a is not None, a, forced, not forced or not p.dPhi)


# special conformal transformations --------------------------------------------------

@dataclass(frozen=True)
class ConformalResult:
    definition: StructureDefinition
    scale: Fraction
    F: Form
    theta: Form
    T: Form
    T_formula: Form

    @property
    def torsion_routes_agree(self) -> bool:
        return self.T == self.T_formula


def special_conformal(sd: StructureDefinition, s) -> ConformalResult:
    """Rescale the horizontal metric by the constant ``s = e^{2c} > 0``.

    The new frame is ``e'_i = sqrt(s) e_i`` (i <= 4), ``e'_5 = e_5``.  All returned
    forms are expressed in the original coframe.  ``T'`` is computed from the
    transformed structure and from ``T + (s - 1) d^phi F``.
    """
    if isinstance(s, (int, Fraction)) or (isinstance(s, str)):
        s = Fraction(s)
    else:
        raise ValueError("the conformal factor must be an exact constant")
    if s <= 0:
        raise ValueError("the scale s = e^{2c} must be positive")
    squares = {i: s for i in range(1, 5)}
    new = scale_coframe(sd, squares, name=f"{sd.name}[s={s}]")
    F_new = unscale_form(fundamental_form(sd.n), squares)
    theta_new = unscale_form(lee_form(new), squares)
    T_new = unscale_form(torsion_form(new), squares)
    T_formula = torsion_form(sd) + (s - 1) * twisted_differential(sd, fundamental_form(sd.n))
    return ConformalResult(new, s, F_new, theta_new, T_new, T_formula)


# the theorem battery ---------------------------------------------------------------

def model_shape(sd: StructureDefinition):
    """``(a, b, c, d)`` of ``d eta``; raises for unsupported definitions."""
    if not sd.contact:
        raise ValueError(f"{sd.name}: not an almost contact frame")
    w = sd.de(5)
    if w.involves(A_INDEX):
        raise ValueError(f"{sd.name}: d eta involves A")
    shape = deta_shape(Form(5, w.terms))
    if not classify(sd).quasi_sasakian:
        raise ValueError(f"{sd.name}: not quasi-Sasakian")
    return shape


def four_form_multipliers(sd: StructureDefinition) -> Dict[Subbundle, np.ndarray]:
    """Eigenvalues of ``dT + 2 sigma^T + Scal`` restricted to each subbundle."""
    four, scal = four_form_identity(sd)
    m = clifford_matrix(Form(5, four.terms)) + float(scal) * IDENTITY
    out = {}
    for b in BUNDLES:
        basis = subbundle_basis(b)
        block = basis.conj().T @ m @ basis
        out[b] = np.linalg.eigvals(block)
    return out


def theorem_suite(sd: StructureDefinition, tol: float = DEFAULT_TOL) -> Report:
    """Model-level properties of invariant normal structures with constant d eta."""
    a, b, c, d = model_shape(sd)
    kappa = a * d - b * b - c * c
    n = sd.n
    F = fundamental_form(n)
    e1234 = Form.monomial((1, 2, 3, 4), n)
    checks = []

    val = validate_structure(sd, check_sharpness=sd.params is not None)
    checks.append(Check("integrability", "d^2 = 0 on the coframe", val.ok,
                        value={"sharp": val.integrability_sharp},
                        residual=[[mu, r] for mu, r in val.failures] or None))

    try:
        T = torsion_form(sd)
    except CriterionInapplicable as exc:
        checks.append(Check("torsion_connection", "contact connection exists", False, note=str(exc)))
        return Report(checks)

    anchor = "properties of the model family"
    N = nijenhuis(sd)
    checks.append(Check("killing_xi", anchor, classify(sd).killing_xi is True))
    checks.append(Check("nijenhuis_zero", anchor, all(v == 0 for v in N.flat)))
    checks.append(exact_check("dF_closed", anchor, dF(sd), Form.zero(n)))
    de = sd.de(5)
    checks.append(exact_check("deta_wedge_deta", anchor, wedge(de, de), kappa * wedge(F, F)))
    checks.append(exact_check("torsion_is_eta_wedge_deta", anchor, T, wedge(eta(n), de)))
    try:
        checks.append(exact_check("deltaT_zero", anchor, codifferential(sd, T), Form.zero(n)))
    except AContamination:
        curv = torsion_curvature(sd)
        checks.append(Check("deltaT_zero", anchor, curv.ricci_symmetric(),
                            note="checked through the antisymmetric part of the Ricci tensor"))

    curv = torsion_curvature(sd)
    diag = [-kappa] * 4 + [Fraction(0)]
    expected = [[diag[j] if j == k else Fraction(0) for k in range(5)] for j in range(5)]
    ric = curv.ricci_matrix()
    checks.append(Check("ricci_diag", anchor, ric == expected, value=ric))
    checks.append(exact_check("omegaA_kappa_F", "abelian curvature of the gauge field",
                              curv.OmegaA if curv.OmegaA is not None else curv[1, 2], kappa * F))
    ok, res = verify_curvature_structure(sd)
    checks.append(Check("curvature_operator_u1", "curvature operator R(alpha) = (OmegaA, alpha) F", ok,
                        residual=res or None))

    lifts = parallel_spinors(sd, tol=tol)
    hol = parallel_spinors_by_holonomy(sd, tol=tol)
    anchor = "parallel spinors"
    dims = {bb.value: lifts[bb].dim for bb in BUNDLES}
    checks.append(Check("parallel_sigma2_dim", anchor, lifts[Subbundle.TWO].dim == 2, value=dims))
    pm_expected = 1 if kappa == 0 else 0
    checks.append(Check("parallel_sigma_pm_dim", anchor,
                        lifts[Subbundle.PLUS].dim == pm_expected == lifts[Subbundle.MINUS].dim, value=dims))
    checks.append(Check("parallel_routes_agree", anchor, routes_agree(lifts, hol),
                        value={bb.value: hol[bb].dim for bb in BUNDLES}))
    both = lifts[Subbundle.TWO].dim > 0 and (lifts[Subbundle.PLUS].dim > 0 or lifts[Subbundle.MINUS].dim > 0)
    checks.append(Check("flatness_dichotomy", "parallel spinors in two bundle types force flatness",
                        (not both) or curv.is_flat(), value={"flat": curv.is_flat()}))

    anchor = "4-form identity dT + 2 sigma^T + Scal"
    four, scal = four_form_identity(sd)
    checks.append(exact_check("four_form_identity", anchor, four, 4 * kappa * e1234))
    checks.append(exact_check("four_form_scalar", anchor, scal, -4 * kappa))
    mult = four_form_multipliers(sd)
    checks.append(numeric_check("four_form_sigma2", anchor, mult[Subbundle.TWO], [0, 0], tol))
    for bb in (Subbundle.PLUS, Subbundle.MINUS):
        checks.append(numeric_check(f"four_form_{bb.name.lower()}", anchor, mult[bb],
                                    [-8 * float(kappa)], tol))

    anchor = "torsion spectrum on Sigma^2"
    root = sqrt(float((a - d) ** 2 + 4 * b * b + 4 * c * c))
    spec = torsion_spectrum(Form(5, T.terms), Subbundle.TWO)
    checks.append(numeric_check("torsion_spectrum_sigma2", anchor, spec, [-root, root], tol))
    kernel_trivial = annihilator_kernel(Form(5, T.terms), Subbundle.TWO, tol).shape[1] == 0
    checks.append(Check("torsion_kernel_sigma2", anchor, kernel_trivial == (root != 0)))

    killing = killing_equation_solve(KillingProblem.from_structure(sd), tol)
    checks.append(Check("killing_equation_conditions", "Killing equation with constant dilation",
                        killing.consistent, value=killing.to_json()))

    checks.extend(reduction_checks(sd))
    return Report(checks)


def reduction_checks(sd: StructureDefinition) -> list:
    """Local equivalences of special parameter values with named models."""
    p = sd.params
    out = []
    if p is None:
        return out
    anchor = "local equivalence with named structures"
    if p.as_tuple() == (2, 0, 0, 2):
        reduced = sasaki_reduction(sd)
        out.append(Check("reduces_to_heisenberg", anchor, same_constants(reduced, make_builtin("heisenberg"))))
    if p.as_tuple() == (0, 1, 0, 0):
        out.append(Check("matches_s3s3", anchor, same_constants(to_s3s3_frame(sd), make_builtin("s3s3_basis"))))
    if p.as_tuple() == (1, 0, 0, 0):
        leaf = restrict_gauge(sd, Form.zero(5))
        out.append(Check("matches_s3r2", anchor, same_constants(leaf, make_builtin("s3r2"))))
    return out


def conformal_checks(sd: StructureDefinition, s=4) -> list:
    anchor = "special conformal transformation"
    try:
        res = special_conformal(sd, s)
    except CriterionInapplicable as exc:
        return [skip("conformal", anchor, str(exc))]
    except ValueError as exc:
        return [skip("conformal", anchor, f"scale not exact in this frame: {exc}")]
    flags = classify(res.definition)
    base = classify(sd)
    return [
        exact_check("conformal_F", anchor, res.F, res.scale * fundamental_form(sd.n)),
        exact_check("conformal_theta", anchor, res.theta, lee_form(sd)),
        exact_check("conformal_torsion_two_routes", anchor, res.T, res.T_formula),
        Check("conformal_flags_preserved", anchor,
              flags.n_skew == base.n_skew and flags.killing_xi == base.killing_xi,
              value=flags.to_json()),
    ]
