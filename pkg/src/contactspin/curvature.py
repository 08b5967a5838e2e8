"""Connection forms, curvature and Ricci tensors from structure constants.

Conventions (fixed so that the model family reproduces its known connection
and Ricci tables):

* ``omega_ij(X) = g(nabla_X e_i, e_j)``, so ``nabla e_i = sum_j omega_ij e_j``.
* first structure equation ``de^i = sum_j omega_ij ^ e^j (+ e_i _| T)``.
* curvature ``Omega_ij = d omega_ij - sum_k omega_ik ^ omega_kj`` with
  ``R(X, Y) e_i = sum_j Omega_ij(X, Y) e_j``.
* ``Ric(Y, Z) = sum_i g(R(e_i, Y) Z, e_i)``, i.e. ``Ric_jk = sum_i Omega_ki(e_i, e_j)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Dict, Optional, Tuple

from .clifford import fundamental_form, lie_algebra_membership
from .coframe import StructureDefinition, exterior_derivative
from .contact import (AContamination, CriterionInapplicable, codifferential, require_a_free,
                      torsion_form, twisted_differential)
from .forms import A_INDEX, Form, basis_forms, form_inner, interior, wedge
from .report import Check, exact_check, skip

FRAME = tuple(range(1, 6))
Matrix = Dict[Tuple[int, int], Form]


@dataclass(frozen=True)
class ConnectionForms:
    """Antisymmetric 5x5 matrix of 1-forms, optionally with a skew torsion 3-form."""

    n: int
    omega: Tuple[Tuple[Form, ...], ...]
    torsion: Optional[Form] = None

    def __getitem__(self, ij) -> Form:
        i, j = ij
        return self.omega[i - 1][j - 1]

    @classmethod
    def from_dict(cls, n: int, entries: Matrix, torsion: Optional[Form] = None) -> "ConnectionForms":
        rows = tuple(tuple(entries.get((i, j), Form.zero(n)) for j in FRAME) for i in FRAME)
        return cls(n, rows, torsion)

    def is_antisymmetric(self) -> bool:
        return all(self[i, j] == -self[j, i] for i in FRAME for j in FRAME)

    def nonzero(self) -> Dict[Tuple[int, int], Form]:
        return {(i, j): self[i, j] for i, j in combinations(FRAME, 2) if self[i, j]}

    def component(self, mu: int) -> Dict[Tuple[int, int], Fraction]:
        """Coefficients of the generator ``e^mu`` (or A) in each ``omega_ij``, i < j."""
        return {(i, j): self[i, j].coeff((mu,)) for i, j in combinations(FRAME, 2)}


def first_structure_residuals(sd: StructureDefinition, conn: ConnectionForms) -> Dict[int, Form]:
    """``de^i - sum_j omega_ij ^ e^j - e_i _| T`` for each frame index with a nonzero value."""
    out = {}
    for i in FRAME:
        rhs = Form.zero(sd.n)
        for j in FRAME:
            rhs = rhs + wedge(conn[i, j], sd.gen(j))
        if conn.torsion is not None:
            rhs = rhs + interior(i, conn.torsion)
        r = sd.de(i) - rhs
        if r:
            out[i] = r
    return out


def _structure_coefficients(sd: StructureDefinition):
    """``C[i][j, k] = de^i(e_j, e_k)`` on the frame and ``alpha[i, j]``, the coefficient of A^e^j."""
    C = {}
    alpha = {}
    for i in FRAME:
        de = sd.de(i)
        for idx, c in de.items():
            if A_INDEX in idx:
                j = idx[0]
                alpha[i, j] = alpha.get((i, j), Fraction(0)) - c  # e_j^A = -A^e_j
            elif any(k > 5 for k in idx):
                raise ValueError(f"de{i} involves an unknown generator")
        for j in FRAME:
            for k in FRAME:
                C[i, j, k] = de.coeff((j, k))
    return C, alpha


def levi_civita_forms(sd: StructureDefinition) -> ConnectionForms:
    """Unique antisymmetric solution of ``de^i = sum_j omega_ij ^ e^j``.

    Writing ``omega_ij = sum_k G_ijk e^k + alpha_ij A`` and
    ``D_ijk = de^i(e_k, e_j)``, the frame part is ``G = (D_ijk + D_jki - D_kij) / 2``;
    the A part is read off the ``A ^ e^j`` terms and must be antisymmetric.
    """
    C, alpha = _structure_coefficients(sd)
    for (i, j), v in alpha.items():
        if alpha.get((j, i), Fraction(0)) != -v:
            raise ValueError("A-terms of the structure equations are not a rotation of the frame")

    def D(i, j, k):
        return C[i, k, j]

    entries = {}
    for i in FRAME:
        for j in FRAME:
            terms = {}
            for k in FRAME:
                g = (D(i, j, k) + D(j, k, i) - D(k, i, j)) / 2
                if g:
                    terms[(k,)] = g
            a = alpha.get((i, j), Fraction(0))
            if a:
                terms[(A_INDEX,)] = a
            entries[i, j] = Form(sd.n, terms)
    conn = ConnectionForms.from_dict(sd.n, entries)
    if first_structure_residuals(sd, conn):
        raise ValueError("structure equations admit no torsion-free metric connection")
    return conn


def torsion_connection_forms(sd: StructureDefinition, T: Optional[Form] = None) -> ConnectionForms:
    """``omega~_ij = omega_ij + 1/2 T(e_i, e_j, .)``."""
    if T is None:
        T = torsion_form(sd)
    lc = levi_civita_forms(sd)
    entries = {}
    for i in FRAME:
        for j in FRAME:
            shift = Form(sd.n, {(k,): T(i, j, k) / 2 for k in FRAME})
            entries[i, j] = lc[i, j] + shift
    conn = ConnectionForms.from_dict(sd.n, entries, torsion=T if T else None)
    residual = first_structure_residuals(sd, conn)
    if residual:
        raise AssertionError(f"torsion connection violates the structure equations: {residual}")
    return conn


@lru_cache(maxsize=4096)
def torsion_connection(sd: StructureDefinition) -> ConnectionForms:
    return torsion_connection_forms(sd)


def killing_by_levi_civita(sd: StructureDefinition) -> bool:
    """xi Killing iff ``omega_5k(e_j) + omega_5j(e_k) = 0`` for all j, k."""
    lc = levi_civita_forms(sd)
    if any(lc[5, j].involves(A_INDEX) for j in FRAME):
        raise ValueError("xi is rotated by the A-gauge; Killing test is ambiguous")
    return all(lc[5, k].coeff((j,)) + lc[5, j].coeff((k,)) == 0 for j in FRAME for k in FRAME)


# curvature --------------------------------------------------------------------------

@dataclass(frozen=True)
class CurvatureData:
    Omega: Tuple[Tuple[Form, ...], ...]
    ricci: Tuple[Tuple[Fraction, ...], ...]
    scalar: Fraction
    OmegaA: Optional[Form]

    def __getitem__(self, ij) -> Form:
        i, j = ij
        return self.Omega[i - 1][j - 1]

    def is_flat(self) -> bool:
        return not any(w for row in self.Omega for w in row)

    def ricci_symmetric(self) -> bool:
        return all(self.ricci[j][k] == self.ricci[k][j] for j in range(5) for k in range(5))

    def ricci_matrix(self):
        return [list(row) for row in self.ricci]


def curvature(sd: StructureDefinition, conn: ConnectionForms, require_a_free_curvature: bool = True) -> CurvatureData:
    """Curvature 2-forms, Ricci tensor, scalar curvature and the abelian part if present."""
    omega = {}
    for i in FRAME:
        for j in FRAME:
            w = exterior_derivative(sd, conn[i, j])
            for k in FRAME:
                w = w - wedge(conn[i, k], conn[k, j])
            if require_a_free_curvature:
                require_a_free(w, f"Omega_{i}{j}")
            omega[i, j] = w
    ricci = tuple(
        tuple(sum((omega[k, i](i, j) for i in FRAME), Fraction(0)) for k in FRAME)
        for j in FRAME
    )
    scalar = sum((ricci[j][j] for j in range(5)), Fraction(0))
    omega_a = None
    w12 = omega[1, 2]
    if all(lie_algebra_membership_u1(omega, i, j, w12) for i, j in combinations(FRAME, 2)):
        omega_a = w12
    rows = tuple(tuple(omega[i, j] for j in FRAME) for i in FRAME)
    return CurvatureData(rows, ricci, scalar, omega_a)


def lie_algebra_membership_u1(omega, i, j, w12) -> bool:
    """Entry test for ``Omega = OmegaA (x) (e12 + e34)``."""
    if (i, j) in ((1, 2), (3, 4)):
        return omega[i, j] == w12
    return not omega[i, j]


@lru_cache(maxsize=4096)
def torsion_curvature(sd: StructureDefinition) -> CurvatureData:
    return curvature(sd, torsion_connection(sd))


def curvature_operator(curv: CurvatureData, alpha: Form) -> Form:
    """``R(alpha) = sum_{i<j} (sum_{a<b} alpha_ab Omega_ij(e_a, e_b)) e_i ^ e_j``."""
    n = alpha.n
    terms = {}
    for i, j in combinations(FRAME, 2):
        v = sum((c * curv[i, j](*idx) for idx, c in alpha.items()), Fraction(0))
        if v:
            terms[(i, j)] = v
    return Form(n, terms)


def verify_curvature_structure(sd: StructureDefinition, conn: Optional[ConnectionForms] = None):
    """Whether ``R(alpha) = (OmegaA, alpha) F`` for all basis 2-forms with ``d OmegaA = 0``.

    Returns ``(ok, residuals)`` where residuals maps a label to a nonzero form.
    """
    conn = torsion_connection(sd) if conn is None else conn
    try:
        curv = curvature(sd, conn)
    except AContamination as exc:
        return False, {"A-contamination": str(exc)}
    omega_a = curv.OmegaA if curv.OmegaA is not None else curv[1, 2]
    F = fundamental_form(sd.n)
    residuals = {}
    for alpha in basis_forms(2, sd.n, FRAME):
        r = curvature_operator(curv, alpha) - form_inner(omega_a, alpha) * F
        if r:
            residuals[str(alpha)] = r
    d_omega = exterior_derivative(sd, omega_a)
    if d_omega:
        residuals["d OmegaA"] = d_omega
    return not residuals, residuals


def sigma_T(T: Form) -> Form:
    """``1/2 sum_i (e_i _| T) ^ (e_i _| T)``."""
    require_a_free(T, "T")
    out = Form.zero(T.n)
    for i in FRAME:
        x = interior(i, T)
        out = out + wedge(x, x)
    return out / 2


def four_form_identity(sd: StructureDefinition):
    """The pair ``(dT + 2 sigma^T, Scal)`` representing ``dT + 2 sigma^T + Scal``."""
    T = torsion_form(sd)
    dT = require_a_free(exterior_derivative(sd, T), "dT")
    return dT + 2 * sigma_T(T), torsion_curvature(sd).scalar


# the identity suite --------------------------------------------------------------

XI = 5


def delta_T_pairing(sd: StructureDefinition) -> Optional[Form]:
    """``delta T`` when the codifferential stays A-free, else None."""
    try:
        return codifferential(sd, torsion_form(sd))
    except AContamination:
        return None


def identity_suite(sd: StructureDefinition) -> list:
    """Named identities linking the torsion, its codifferential and the abelian curvature."""
    checks = []
    try:
        T = torsion_form(sd)
    except CriterionInapplicable as exc:
        return [skip("identities", "torsion connection", str(exc))]
    curv = torsion_curvature(sd)
    ric = curv.ricci
    dT = require_a_free(exterior_derivative(sd, T), "dT")
    sig = sigma_T(T)

    anchor = "divergence of torsion vs Ricci asymmetry"
    dT_div = delta_T_pairing(sd)
    if dT_div is None:
        checks.append(skip("deltaT_ricci_antisym", anchor, "codifferential leaves the A-free gauge"))
    else:
        lhs = Form(sd.n, {(x,): dT_div(x, XI) for x in FRAME})
        rhs = Form(sd.n, {(x,): ric[XI - 1][x - 1] - ric[x - 1][XI - 1] for x in FRAME})
        checks.append(exact_check("deltaT_ricci_antisym", anchor, lhs, rhs))

    anchor = "abelian curvature wedge F"
    if curv.OmegaA is None:
        checks.append(skip("omegaA_wedge_F", anchor, "curvature does not reduce to u(1)"))
    else:
        checks.append(exact_check("omegaA_wedge_F", anchor,
                                  wedge(curv.OmegaA, fundamental_form(sd.n)),
                                  Fraction(3, 2) * dT - sig))

    anchor = "xi contractions of dT and sigma^T"
    checks.append(exact_check("xi_dT", anchor, interior(XI, dT), Form.zero(sd.n)))
    checks.append(exact_check("xi_sigmaT", anchor, interior(XI, sig), Form.zero(sd.n)))

    anchor = "harmonic 1-forms orthogonal to eta hypothesis"
    try:
        target = T - twisted_differential(sd, fundamental_form(sd.n))
        delta = codifferential(sd, target)
    except AContamination:
        checks.append(skip("tachibana_hypothesis", anchor, "codifferential leaves the A-free gauge"))
    else:
        checks.append(exact_check("tachibana_hypothesis", anchor, interior(XI, delta), Form.zero(sd.n)))
    return checks
