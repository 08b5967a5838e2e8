"""Contact-geometric quantities of a structure definition.

phi is fixed in the adapted frame by ``F(X, Y) = g(X, phi Y)`` with
``F = e1^e2 + e3^e4``, i.e. ``phi e1 = -e2``, ``phi e2 = e1``,
``phi e3 = -e4``, ``phi e4 = e3``, ``phi e5 = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Optional

import numpy as np

from .clifford import PHI, fundamental_form
from .coframe import StructureDefinition, exterior_derivative
from .forms import A_INDEX, Form, hodge, hodge_inverse, interior, pullback, wedge

FRAME = range(1, 6)


class CriterionInapplicable(ValueError):
    """A test whose hypotheses fail, e.g. the Killing criterion for non-skew N."""


class AContamination(ValueError):
    """A quantity that should be intrinsic to M^5 picked up an A component."""


def require_a_free(w: Form, what: str) -> Form:
    if w.involves(A_INDEX):
        raise AContamination(f"{what} has an A component: {w}")
    return w


def phi_vector(vec):
    """Apply phi to a vector given by components over the frame."""
    out = [Fraction(0)] * len(vec)
    for m, (k, sign) in PHI.items():
        if m - 1 < len(vec) and vec[m - 1]:
            out[k - 1] += sign * vec[m - 1]
    return out


def eta(n: int) -> Form:
    return Form.generator(5, n)


# Nijenhuis tensor -----------------------------------------------------------------

def bracket_table(sd: StructureDefinition):
    """``[X_i, X_j] = -sum_mu d e^mu(X_i, X_j) X_mu`` as vectors."""
    n = sd.n
    table = {}
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            table[i, j] = [-sd.de(mu).coeff((i, j)) for mu in range(1, n + 1)]
    return table


def _bracket(table, u, v):
    n = len(u)
    out = [Fraction(0)] * n
    for i, ui in enumerate(u, start=1):
        if not ui:
            continue
        for j, vj in enumerate(v, start=1):
            if not vj:
                continue
            w = ui * vj
            for mu, b in enumerate(table[i, j]):
                if b:
                    out[mu] += w * b
    return out


def _unit(i, n):
    return [Fraction(int(k == i)) for k in range(1, n + 1)]


@lru_cache(maxsize=4096)
def nijenhuis(sd: StructureDefinition) -> np.ndarray:
    """``N(X, Y, Z) = g([phi, phi](X, Y) + d eta(X, Y) xi, Z)`` on the frame e1..e5.

    Returns a read-only 5x5x5 object array of Fractions indexed from 0.  Bracket
    components along the A direction never contribute: phi and g vanish there.
    """
    if not sd.contact:
        raise ValueError("definition does not carry an almost contact frame")
    n = sd.n
    table = bracket_table(sd)
    deta = sd.de(5)
    out = np.empty((5, 5, 5), dtype=object)
    for i in FRAME:
        X = _unit(i, n)
        pX = phi_vector(X)
        for j in FRAME:
            Y = _unit(j, n)
            pY = phi_vector(Y)
            v = phi_vector(phi_vector(_bracket(table, X, Y)))
            for term, sign in ((_bracket(table, pX, pY), 1),
                               (phi_vector(_bracket(table, pX, Y)), -1),
                               (phi_vector(_bracket(table, X, pY)), -1)):
                v = [a + sign * b for a, b in zip(v, term)]
            v[4] += deta.coeff((i, j))
            for k in FRAME:
                out[i - 1, j - 1, k - 1] = v[k - 1]
    out.setflags(write=False)
    return out


def is_totally_skew(N: np.ndarray) -> bool:
    # two adjacent transpositions generate S3
    for i, j, k in np.ndindex(5, 5, 5):
        v = N[i, j, k]
        if N[j, i, k] != -v or N[i, k, j] != -v:
            return False
    return True


def nijenhuis_form(N: np.ndarray, n: int = 5) -> Form:
    return Form(n, {(i, j, k): N[i - 1, j - 1, k - 1] for i, j, k in combinations(FRAME, 3)})


# derived quantities -------------------------------------------------------------

def dF(sd: StructureDefinition) -> Form:
    return exterior_derivative(sd, fundamental_form(sd.n))


def deta(sd: StructureDefinition) -> Form:
    return sd.de(5)


def killing_test(sd: StructureDefinition) -> bool:
    """xi is Killing iff ``xi _| dF = 0``, valid when N is totally skew."""
    if not is_totally_skew(nijenhuis(sd)):
        raise CriterionInapplicable("Nijenhuis tensor is not totally skew-symmetric")
    return not interior(5, require_a_free(dF(sd), "dF"))


@lru_cache(maxsize=4096)
def lee_form(sd: StructureDefinition) -> Form:
    """``theta(X) = -1/2 sum_i dF(X, e_i, phi e_i)``."""
    return lee_form_from_three_form(require_a_free(dF(sd), "dF"), twisted=False)


def lee_form_from_three_form(w: Form, twisted: bool) -> Form:
    """Lee form from dF, or from the torsion with ``twisted=True`` (first slot phi X)."""
    terms = {}
    for x in FRAME:
        total = Fraction(0)
        if twisted:
            if x not in PHI:
                continue
            px, psign = PHI[x]
        for i, (k, sign) in PHI.items():
            if twisted:
                total += psign * sign * w(px, i, k)
            else:
                total += sign * w(x, i, k)
        if total:
            terms[(x,)] = -total / 2
    return Form(w.n, terms)


def lee_form_from_torsion(T: Form) -> Form:
    return lee_form_from_three_form(T, twisted=True)


def phi_pullback_images(n: int) -> dict:
    """``e^k -> e^k o phi`` for every generator (A and eta map to 0)."""
    images = {k: Form.zero(n) for k in range(1, n + 1)}
    for m, (k, sign) in PHI.items():
        images[k] = images[k] + sign * Form.generator(m, n)
    return images


def phi_pullback(w: Form) -> Form:
    """``w(phi ., ..., phi .)``."""
    require_a_free(w, "phi pullback input")
    return pullback(w, phi_pullback_images(w.n))


def twisted_differential(sd: StructureDefinition, w: Form) -> Form:
    """``d^phi w (X_1, ...) = -dw(phi X_1, ..., phi X_{k+1})``."""
    return -phi_pullback(require_a_free(exterior_derivative(sd, w), "dw"))


@lru_cache(maxsize=4096)
def torsion_form(sd: StructureDefinition) -> Form:
    """Torsion of the unique structure-preserving connection with skew torsion.

    ``T = eta^d eta + d^phi F + N - eta ^ (xi _| N)``; requires xi Killing
    and N totally skew.
    """
    N = nijenhuis(sd)
    if not is_totally_skew(N):
        raise CriterionInapplicable("Nijenhuis tensor is not totally skew-symmetric")
    if not killing_test(sd):
        raise CriterionInapplicable("xi is not a Killing vector field")
    n = sd.n
    e5 = eta(n)
    de = require_a_free(deta(sd), "d eta")
    N3 = nijenhuis_form(N, n)
    return (wedge(e5, de) + twisted_differential(sd, fundamental_form(n))
            + N3 - wedge(e5, interior(5, N3)))


def codifferential(sd: StructureDefinition, w: Form) -> Form:
    """``delta = (-1)^k *^-1 d *`` on k-forms over the orthonormal frame e1..e5."""
    require_a_free(w, "codifferential input")
    out = Form.zero(sd.n)
    for k in sorted(w.degrees()):
        if k == 0:
            continue
        star = hodge(w.homogeneous(k), "full5")
        dstar = require_a_free(exterior_derivative(sd, star), "d * w")
        part = hodge_inverse(dstar, "full5")
        out = out + (part if k % 2 == 0 else -part)
    return out


# classification --------------------------------------------------------------------

@dataclass(frozen=True)
class ClassificationFlags:
    n_skew: bool
    normal: bool
    quasi_sasakian: bool
    alpha_sasakian: bool
    alpha: Optional[Fraction]
    sasakian: bool
    contact: bool
    killing_xi: Optional[bool]

    def to_json(self) -> dict:
        out = {k: getattr(self, k) for k in ("n_skew", "normal", "quasi_sasakian", "alpha_sasakian",
                                              "sasakian", "contact", "killing_xi")}
        out["alpha"] = None if self.alpha is None else str(self.alpha)
        return out

    def implications_hold(self) -> bool:
        chain = [
            not self.sasakian or (self.alpha_sasakian and self.alpha == 2),
            not self.alpha_sasakian or self.quasi_sasakian,
            not self.quasi_sasakian or self.normal,
            not self.quasi_sasakian or self.killing_xi is True,
        ]
        return all(chain)


def proportional_to_F(w: Form) -> Optional[Fraction]:
    """The constant ``alpha`` with ``w = alpha F``, or None."""
    F = fundamental_form(w.n)
    alpha = w.coeff((1, 2))
    return alpha if w == alpha * F else None


def classify(sd: StructureDefinition) -> ClassificationFlags:
    N = nijenhuis(sd)
    skew = is_totally_skew(N)
    normal = all(v == 0 for v in N.flat)
    closed_F = not require_a_free(dF(sd), "dF")
    de = require_a_free(deta(sd), "d eta")
    alpha = proportional_to_F(de) if normal else None
    alpha_sasakian = normal and alpha is not None and alpha != 0
    e5 = eta(sd.n)
    contact = bool(wedge(wedge(e5, de), de))
    if skew:
        killing = killing_test(sd)
    else:
        from .curvature import killing_by_levi_civita

        killing = killing_by_levi_civita(sd)
    return ClassificationFlags(
        n_skew=skew,
        normal=normal,
        quasi_sasakian=normal and closed_F,
        alpha_sasakian=alpha_sasakian,
        alpha=alpha if alpha_sasakian else None,
        sasakian=normal and alpha == 2,
        contact=contact,
        killing_xi=killing,
    )


@dataclass(frozen=True)
class ContactData:
    F: Form
    eta: Form
    N: np.ndarray
    theta: Form
    T: Optional[Form]


@lru_cache(maxsize=4096)
def contact_data(sd: StructureDefinition) -> ContactData:
    """Bundle of the contact quantities; cached per definition (pure, so the cache is transparent)."""
    N = nijenhuis(sd)
    try:
        T = torsion_form(sd)
    except CriterionInapplicable:
        T = None
    return ContactData(F=fundamental_form(sd.n), eta=eta(sd.n), N=N, theta=lee_form(sd), T=T)
