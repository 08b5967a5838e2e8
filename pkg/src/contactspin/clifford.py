"""The five-dimensional spin representation by explicit 4x4 complex matrices.

Vectors act by the generator matrices below; a k-form acts through the ordered
product over its increasing multi-index (coefficient 1, no 1/k! factor).  With
this normalization ``F = e1^e2 + e3^e4`` acts as ``diag(2i, -2i, 0, 0)``.

All generator entries are Gaussian integers, so products of generators are
exact in double precision.  Kernels and spectra convert rational coefficients
to floats and decide ranks with a singular-value threshold.
"""

from __future__ import annotations

import enum
from functools import lru_cache
from itertools import combinations

import numpy as np

from .forms import A_INDEX, Form, interior, wedge

DEFAULT_TOL = 1e-9

_I = 1j
GAMMA = (
    np.array([[0, 0, 0, _I], [0, 0, _I, 0], [0, _I, 0, 0], [_I, 0, 0, 0]], dtype=complex),
    np.array([[0, 0, 0, -1], [0, 0, 1, 0], [0, -1, 0, 0], [1, 0, 0, 0]], dtype=complex),
    np.array([[0, 0, -_I, 0], [0, 0, 0, _I], [-_I, 0, 0, 0], [0, _I, 0, 0]], dtype=complex),
    np.array([[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]], dtype=complex),
    np.diag([_I, _I, -_I, -_I]).astype(complex),
)
IDENTITY = np.eye(4, dtype=complex)


def check_anticommutation() -> None:
    """Raise unless ``e_i e_j + e_j e_i = -2 delta_ij`` for all 25 pairs."""
    for i, gi in enumerate(GAMMA):
        for j, gj in enumerate(GAMMA):
            expected = -2 * IDENTITY if i == j else 0 * IDENTITY
            if not np.array_equal(gi @ gj + gj @ gi, expected):
                raise AssertionError(f"Clifford relation fails for e{i + 1}, e{j + 1}")


check_anticommutation()


@lru_cache(maxsize=None)
def _monomial_matrix(idx: tuple) -> np.ndarray:
    out = IDENTITY.copy()
    for i in idx:
        out = out @ GAMMA[i - 1]
    out.setflags(write=False)
    return out


def clifford_matrix(w: Form) -> np.ndarray:
    """4x4 matrix of the Clifford action of ``w`` (scalar part acts as a multiple of 1)."""
    if w.involves(A_INDEX):
        raise ValueError("Clifford action needs a form over e1..e5 (no A component)")
    out = np.zeros((4, 4), dtype=complex)
    for idx, c in w.items():
        if any(i > 5 for i in idx):
            raise ValueError(f"index {idx} outside e1..e5")
        out = out + float(c) * _monomial_matrix(idx)
    return out


def clifford_action(w: Form, psi) -> np.ndarray:
    return clifford_matrix(w) @ np.asarray(psi, dtype=complex)


class Subbundle(str, enum.Enum):
    """Eigen-subbundles of the F-action: ``+2i``, ``-2i`` and the kernel."""

    PLUS = "sigma+"
    MINUS = "sigma-"
    TWO = "sigma2"

    @classmethod
    def parse(cls, value) -> "Subbundle":
        if isinstance(value, cls):
            return value
        aliases = {"+": cls.PLUS, "plus": cls.PLUS, "-": cls.MINUS, "minus": cls.MINUS,
                   "2": cls.TWO, "two": cls.TWO}
        key = str(value).lower()
        if key in aliases:
            return aliases[key]
        return cls(key)


EIGENVALUE = {Subbundle.PLUS: 2j, Subbundle.MINUS: -2j, Subbundle.TWO: 0j}


def fundamental_form(n: int = 5) -> Form:
    return Form(n, {(1, 2): 1, (3, 4): 1})


@lru_cache(maxsize=None)
def _projectors():
    fm = clifford_matrix(fundamental_form())
    out = {}
    # spectral projectors by Lagrange interpolation in the F-action
    for tag, lam in EIGENVALUE.items():
        p = IDENTITY.copy()
        for other, mu in EIGENVALUE.items():
            if other is not tag:
                p = p @ (fm - mu * IDENTITY) / (lam - mu)
        p.setflags(write=False)
        out[tag] = p
    return out


def subbundle_projectors() -> dict:
    """Orthogonal projectors onto Sigma+, Sigma-, Sigma2 keyed by :class:`Subbundle`."""
    return dict(_projectors())


def subbundle_basis(bundle) -> np.ndarray:
    """Orthonormal basis (columns) of one subbundle, or of several joined with a tuple."""
    if isinstance(bundle, (tuple, list, set, frozenset)):
        proj = sum(_projectors()[Subbundle.parse(b)] for b in bundle)
    else:
        proj = _projectors()[Subbundle.parse(bundle)]
    vals, vecs = np.linalg.eigh(proj)
    return vecs[:, vals > 0.5]


def kernel_basis(matrix: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the null space of ``matrix`` (columns)."""
    m = np.asarray(matrix, dtype=complex)
    _, s, vh = np.linalg.svd(m)
    rank = int(np.sum(s > tol))
    return vh[rank:].conj().T


def annihilator_kernel(w: Form, bundle, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of ``{psi in bundle : w . psi = 0}`` as columns of a 4xk array."""
    basis = subbundle_basis(bundle)
    coeffs = kernel_basis(clifford_matrix(w) @ basis, tol)
    if coeffs.shape[1] == 0:
        return np.zeros((4, 0), dtype=complex)
    out = basis @ coeffs
    # re-orthonormalize against rounding
    q, _ = np.linalg.qr(out)
    return q


def same_subspace(u: np.ndarray, v: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    if u.shape[1] != v.shape[1]:
        return False
    if u.shape[1] == 0:
        return True
    pu = u @ u.conj().T
    pv = v @ v.conj().T
    return bool(np.linalg.norm(pu - pv) < tol)


# Lie algebra membership ----------------------------------------------------

def _two_form_components(w: Form):
    if w and w.degrees() != {2}:
        raise ValueError("membership test needs a 2-form")
    if w.involves(A_INDEX):
        raise ValueError("membership test needs a form over e1..e5")
    return {pair: w.coeff(pair) for pair in combinations(range(1, 6), 2)}


def lie_algebra_membership(w: Form, algebra: str) -> bool:
    """Whether a 2-form lies in u(2), su(2) or the diagonal u(1) of the adapted frame."""
    x = _two_form_components(w)
    in_u2 = (x[(1, 4)] + x[(2, 3)] == 0 and x[(1, 3)] - x[(2, 4)] == 0
             and all(x[(i, 5)] == 0 for i in range(1, 5)))
    if algebra == "u2":
        return in_u2
    if algebra == "su2":
        return in_u2 and x[(1, 2)] + x[(3, 4)] == 0
    if algebra == "u1diag":
        others = [v for k, v in x.items() if k not in ((1, 2), (3, 4))]
        return x[(1, 2)] == x[(3, 4)] and all(v == 0 for v in others)
    raise ValueError(f"unknown algebra {algebra!r}")


# d(eta) annihilation ----------------------------------------------------------

def deta_shape(deta: Form):
    """Return ``(a, b, c, d)`` of a phi-invariant 2-form, raising otherwise.

    The shape is ``a e12 + b (e13 + e24) + c (e14 - e23) + d e34``.
    """
    x = _two_form_components(deta)
    if any(x[(i, 5)] for i in range(1, 5)):
        raise ValueError("d(eta) has an e5 component")
    if x[(1, 3)] != x[(2, 4)] or x[(1, 4)] != -x[(2, 3)]:
        raise ValueError("d(eta) is not invariant under phi")
    return x[(1, 2)], x[(1, 3)], x[(1, 4)], x[(3, 4)]


def deta_conditions(deta: Form, tol: float = DEFAULT_TOL) -> dict:
    """Which subbundles ``d(eta)`` annihilates, by coefficients and by kernels.

    The two routes must agree; a disagreement raises ``AssertionError``.
    """
    a, b, c, d = deta_shape(deta)
    by_coeff_2 = b == 0 and c == 0 and a == d
    by_coeff_pm = a == -d
    k2 = annihilator_kernel(deta, Subbundle.TWO, tol).shape[1] == 2
    kp = annihilator_kernel(deta, Subbundle.PLUS, tol).shape[1] == 1
    km = annihilator_kernel(deta, Subbundle.MINUS, tol).shape[1] == 1
    if by_coeff_2 != k2 or by_coeff_pm != (kp and km) or kp != km:
        raise AssertionError(f"coefficient and kernel routes disagree for d(eta) = {deta}")
    return {"annihilates_sigma2": by_coeff_2, "annihilates_sigma_pm": by_coeff_pm}


def lie_derivative_obstruction(deta: Form, psi) -> np.ndarray:
    """Lie derivative of a parallel spinor along xi: ``-1/2 d(eta) . psi``."""
    if deta and deta.degrees() != {2}:
        raise ValueError("d(eta) must be a 2-form")
    return -0.5 * clifford_action(deta, psi)


# dimension-5 endomorphism identities ------------------------------------------

PHI = {1: (2, -1), 2: (1, 1), 3: (4, -1), 4: (3, 1)}
"""phi(e_m) = sign * e_k stored as m -> (k, sign); phi(e5) = 0."""


def compose_phi(alpha: Form) -> Form:
    """The 1-form ``alpha o phi``."""
    if alpha and alpha.degrees() != {1}:
        raise ValueError("expected a 1-form")
    terms = {}
    for m, (k, sign) in PHI.items():
        val = sign * alpha.coeff((k,))
        if val:
            terms[(m,)] = val
    return Form(alpha.n, terms)


def dim5_endomorphisms(df: Form, x: int):
    """The two sides ``2 X _| ((df o phi) ^ F)`` and ``df.X - X.df`` as matrices."""
    F = fundamental_form(df.n)
    lhs = 2 * interior(x, wedge(compose_phi(df), F))
    lhs_m = clifford_matrix(lhs)
    dfm = clifford_matrix(df)
    rhs_m = dfm @ GAMMA[x - 1] - GAMMA[x - 1] @ dfm
    return lhs_m, rhs_m


def verify_dim5_identities(df: Form, tol: float = 1e-12) -> bool:
    """Check the sign-split identities on Sigma+-, Sigma2 for X in e1..e4."""
    if df and df.degrees() != {1}:
        raise ValueError("df must be a 1-form")
    if df.involves(5) or df.involves(A_INDEX):
        raise ValueError("df must not have an e5 component")
    proj = _projectors()
    for x in range(1, 5):
        lhs, rhs = dim5_endomorphisms(df, x)
        for tag, sign in ((Subbundle.PLUS, 1), (Subbundle.MINUS, 1), (Subbundle.TWO, -1)):
            p = proj[tag]
            if np.max(np.abs(lhs @ p - sign * rhs @ p), initial=0.0) > tol:
                return False
    return True


def torsion_spectrum(T: Form, bundle) -> list:
    """Sorted eigenvalues of the compressed Clifford action of ``T`` on a subbundle."""
    basis = subbundle_basis(bundle)
    block = basis.conj().T @ clifford_matrix(T) @ basis
    if not np.allclose(block, block.conj().T, atol=1e-12):
        raise ValueError("compressed action is not Hermitian")
    return sorted(float(v) for v in np.linalg.eigvalsh(block))


def spinor_to_json(psi) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(psi, dtype=complex)]


def spinor_from_json(data) -> np.ndarray:
    return np.array([complex(re, im) for re, im in data], dtype=complex)
