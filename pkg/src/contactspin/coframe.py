"""Invariant coframes given by structure constants, and the model families.

A :class:`StructureDefinition` stores ``d e^mu`` for each generator.  The
exterior derivative of any constant-coefficient form follows by the Leibniz
rule.  Structure constants and brackets are linked by
``d alpha(X, Y) = -alpha([X, Y])``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .forms import A_INDEX, Form, pullback, wedge

BUILTINS = ("heisenberg", "m5family", "s3s3_basis", "s3r2", "torus")
_ALIASES = {"m5": "m5family", "sasaki": "heisenberg", "flat": "torus", "s3s3": "s3s3_basis"}


@dataclass(frozen=True)
class ModelParams:
    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, Fraction(getattr(self, name)))

    @property
    def kappa(self) -> Fraction:
        """``ad - b^2 - c^2``, the coefficient of ``dA`` along F."""
        return self.a * self.d - self.b ** 2 - self.c ** 2

    @property
    def degenerate(self) -> bool:
        return self.kappa == 0

    def as_tuple(self) -> Tuple[Fraction, ...]:
        return (self.a, self.b, self.c, self.d)

    def to_json(self) -> dict:
        return {k: str(getattr(self, k)) for k in "abcd"}


@dataclass(frozen=True)
class StructureDefinition:
    """Structure constants of an invariant coframe.

    ``d[mu - 1]`` is ``d e^mu``.  Generators ``1..5`` are the orthonormal
    coframe with ``xi`` dual to ``e5`` whenever ``contact`` is true; generator
    6 is the auxiliary form ``A`` when ``has_A``.
    """

    n: int
    d: Tuple[Form, ...]
    has_A: bool = False
    name: str = "custom"
    params: Optional[ModelParams] = None
    contact: bool = True
    xi: int = 5

    def __post_init__(self):
        if len(self.d) != self.n:
            raise ValueError(f"need {self.n} structure equations, got {len(self.d)}")
        for mu, f in enumerate(self.d, start=1):
            if f.n != self.n:
                raise ValueError(f"d e{mu} lives in a coframe of size {f.n}, expected {self.n}")
            if f and f.degrees() != {2}:
                raise ValueError(f"d e{mu} must be a 2-form")
        if self.has_A and self.n != A_INDEX:
            raise ValueError("the auxiliary generator A requires n = 6")
        if self.contact and self.n < 5:
            raise ValueError("an almost contact metric frame needs at least 5 generators")
        if self.has_A and self.d[A_INDEX - 1].involves(A_INDEX):
            raise ValueError("dA must not contain A")

    def de(self, mu: int) -> Form:
        return self.d[mu - 1]

    def gen(self, i: int) -> Form:
        return Form.generator(i, self.n)

    def exterior_derivative(self, w: Form) -> Form:
        return exterior_derivative(self, w)

    def with_d(self, mu: int, value: Form, name: str | None = None) -> "StructureDefinition":
        """Copy with one structure equation replaced (used for perturbations)."""
        d = list(self.d)
        d[mu - 1] = value
        return StructureDefinition(self.n, tuple(d), self.has_A, name or f"{self.name}*",
                                   self.params, self.contact, self.xi)

    # serialization ------------------------------------------------------
    def to_json(self) -> dict:
        out = {
            "n": self.n,
            "d": {str(mu): f.to_json() for mu, f in enumerate(self.d, start=1)},
            "xi": self.xi,
            "has_A": self.has_A,
            "name": self.name,
        }
        if not self.contact:
            out["contact"] = False
        if self.params is not None:
            out["family"] = {"name": "m5", **self.params.to_json()}
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "StructureDefinition":
        n = int(data["n"])
        if int(data.get("xi", 5)) != 5:
            raise ValueError("xi must be generator 5")
        forms = []
        for mu in range(1, n + 1):
            raw = data["d"].get(str(mu), {"terms": []})
            forms.append(Form.from_json(raw, n))
        fam = data.get("family")
        params = None
        if fam:
            params = ModelParams(*(Fraction(str(fam[k])) for k in "abcd"))
        return cls(n, tuple(forms), bool(data.get("has_A", False)),
                   str(data.get("name", "custom")), params, bool(data.get("contact", True)))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


@lru_cache(maxsize=200_000)
def _d_monomial(sd: StructureDefinition, idx: tuple) -> Form:
    n = sd.n
    out = Form.zero(n)
    for p, mu in enumerate(idx):
        dmu = sd.d[mu - 1]
        if not dmu:
            continue
        left = Form.monomial(idx[:p], n)
        right = Form.monomial(idx[p + 1:], n)
        term = wedge(wedge(left, dmu), right)
        out = out + (term if p % 2 == 0 else -term)
    return out


def exterior_derivative(sd: StructureDefinition, w: Form) -> Form:
    """Exterior derivative of a constant-coefficient form."""
    if w.n != sd.n:
        raise ValueError(f"form over {w.n} generators, definition has {sd.n}")
    out = Form.zero(sd.n)
    for idx, c in w.items():
        if idx:
            out = out + c * _d_monomial(sd, idx)
    return out


# builtins -------------------------------------------------------------------

def _m5_equations(p: ModelParams) -> Tuple[Form, ...]:
    a, b, c, d = p.as_tuple()
    n = 6
    A = A_INDEX

    def f(terms):
        return Form(n, terms)

    return (
        f({(A, 2): 1, (2, 5): a, (3, 5): b, (4, 5): c}),
        f({(A, 1): -1, (1, 5): -a, (4, 5): b, (3, 5): -c}),
        f({(A, 4): 1, (1, 5): -b, (2, 5): c, (4, 5): d}),
        f({(A, 3): -1, (1, 5): -c, (2, 5): -b, (3, 5): -d}),
        f({(1, 2): a, (1, 3): b, (2, 4): b, (1, 4): c, (2, 3): -c, (3, 4): d}),
        f({(1, 2): p.kappa, (3, 4): p.kappa}),
    )


def make_builtin(name: str, params: Sequence | ModelParams | None = None) -> StructureDefinition:
    """Build one of the model structures by name."""
    key = _ALIASES.get(name, name)
    if key == "m5family":
        if params is None:
            raise ValueError("m5family needs parameters (a, b, c, d)")
        p = params if isinstance(params, ModelParams) else ModelParams(*params)
        label = "m5(" + ",".join(str(x) for x in p.as_tuple()) + ")"
        return StructureDefinition(6, _m5_equations(p), has_A=True, name=label, params=p)
    if key == "heisenberg":
        n = 5
        d = [Form.zero(n)] * 4 + [Form(n, {(1, 2): 2, (3, 4): 2})]
        return StructureDefinition(n, tuple(d), name="heisenberg")
    if key == "s3r2":
        n = 5
        d = (Form(n, {(2, 5): 1}), Form(n, {(5, 1): 1}), Form.zero(n), Form.zero(n),
             Form(n, {(1, 2): 1}))
        return StructureDefinition(n, d, name="s3r2")
    if key == "s3s3_basis":
        # generators e*1..e*4, C*1, C*2
        n = 6
        d = (Form(n, {(5, 2): 1}), Form(n, {(5, 1): -1}), Form(n, {(6, 4): 1}),
             Form(n, {(6, 3): -1}), Form(n, {(1, 2): -2}), Form(n, {(3, 4): -2}))
        return StructureDefinition(n, d, name="s3s3_basis", contact=False)
    if key == "torus":
        n = 5
        return StructureDefinition(n, (Form.zero(n),) * n, name="torus")
    raise ValueError(f"unknown builtin {name!r}; choose from {', '.join(BUILTINS)}")


# validation -------------------------------------------------------------------

@dataclass
class ValidationReport:
    ok: bool
    failures: List[Tuple[int, Form]] = field(default_factory=list)
    integrability_sharp: Optional[bool] = None

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "failures": [{"generator": mu, "residual": r.to_json()} for mu, r in self.failures],
            "integrability_sharp": self.integrability_sharp,
        }


def d_squared_residuals(sd: StructureDefinition) -> List[Tuple[int, Form]]:
    return [(mu, exterior_derivative(sd, sd.de(mu))) for mu in range(1, sd.n + 1)]


def validate_structure(sd: StructureDefinition, check_sharpness: bool = True) -> ValidationReport:
    """Check ``d(d e^mu) = 0`` for all generators.

    For the quasi-Sasakian family also check that ``dA = kappa F`` is the only
    choice of ``dA`` for which the system closes.
    """
    failures = [(mu, r) for mu, r in d_squared_residuals(sd) if r]
    report = ValidationReport(ok=not failures, failures=failures)
    if check_sharpness and sd.params is not None and sd.has_A:
        sols = integrability_solutions(sd)
        kappa = sd.params.kappa
        expected = Form(sd.n, {(1, 2): kappa, (3, 4): kappa})
        report.integrability_sharp = (sols is not None and sols[1] == []
                                      and sols[0] == expected)
    return report


def _solve_exact(rows: List[List[Fraction]], rhs: List[Fraction]):
    """Solve ``rows x = rhs`` exactly; return (particular, nullspace basis) or None."""
    m = [r[:] + [b] for r, b in zip(rows, rhs)]
    ncols = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][col]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col] != 0:
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
    for i in range(r, len(m)):
        if m[i][-1] != 0:
            return None
    particular = [Fraction(0)] * ncols
    for i, col in enumerate(pivots):
        particular[col] = m[i][-1]
    free = [c for c in range(ncols) if c not in pivots]
    null = []
    for fcol in free:
        v = [Fraction(0)] * ncols
        v[fcol] = Fraction(1)
        for i, col in enumerate(pivots):
            v[col] = -m[i][fcol]
        null.append(v)
    return particular, null


def _a_linear(a_terms: tuple, x: Form, n: int) -> tuple:
    # each A inside d e^mu contributes +-(left ^ X ^ right) to d^2 e^mu
    out = [Form.zero(n) for _ in range(1, n)]
    for mu, idx, c in a_terms:
        p = idx.index(A_INDEX)
        term = wedge(wedge(Form.monomial(idx[:p], n), x), Form.monomial(idx[p + 1:], n))
        out[mu - 1] = out[mu - 1] + (c * term if p % 2 == 0 else -c * term)
    return tuple(out)


@lru_cache(maxsize=64)
def _a_columns(a_terms: tuple, n: int) -> tuple:
    unknowns = [Form.monomial(c, n) for c in combinations(range(1, A_INDEX), 2)]
    return tuple(unknowns), tuple(_a_linear(a_terms, u, n) for u in unknowns)


def integrability_solutions(sd: StructureDefinition):
    """All 2-forms ``X`` such that setting ``dA = X`` makes ``d^2 = 0``.

    Returns ``(particular, nullspace)`` as Forms, or None when no choice works.
    """
    if not sd.has_A:
        raise ValueError("definition has no auxiliary generator")
    n = sd.n
    # d^2 e^mu is affine in X, and dA is A-free, so X ranges over 2-forms in e1..e5
    a_terms = tuple((mu, idx, c) for mu in range(1, n) for idx, c in sd.de(mu).items() if A_INDEX in idx)
    unknowns, cols = _a_columns(a_terms, n)
    actual = [exterior_derivative(sd, sd.de(mu)) for mu in range(1, n)]
    r0 = [r - l for r, l in zip(actual, _a_linear(a_terms, sd.de(A_INDEX), n))]
    keys = sorted({(mu, idx) for col in (*cols, r0) for mu, f in enumerate(col) for idx, _ in f.items()})
    rows = [[cols[j][mu].coeff(idx) for j in range(len(unknowns))] for mu, idx in keys]
    rhs = [-r0[mu].coeff(idx) for mu, idx in keys]
    sol = _solve_exact(rows, rhs) if rows else ([Fraction(0)] * len(unknowns),
                                                [[Fraction(int(i == j)) for i in range(len(unknowns))]
                                                 for j in range(len(unknowns))])
    if sol is None:
        return None
    part, null = sol

    def to_form(v):
        out = Form.zero(n)
        for c, u in zip(v, unknowns):
            if c:
                out = out + c * u
        return out

    return to_form(part), [to_form(v) for v in null]


# coframe changes ----------------------------------------------------------------

def _invert(mat: List[List[Fraction]]) -> List[List[Fraction]]:
    n = len(mat)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((i for i in range(col, n) if aug[i][col] != 0), None)
        if piv is None:
            raise ValueError("coframe substitution is not invertible")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for i in range(n):
            if i != col and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[col])]
    return [row[n:] for row in aug]


def substitute(sd: StructureDefinition, new_in_old: Sequence[Sequence], name: str | None = None,
               **overrides) -> StructureDefinition:
    """Change to the coframe ``f^a = sum_mu new_in_old[a][mu] e^mu``."""
    n = sd.n
    P = [[Fraction(x) for x in row] for row in new_in_old]
    if len(P) != n or any(len(r) != n for r in P):
        raise ValueError(f"substitution must be {n}x{n}")
    Q = _invert(P)
    images = {mu: sum((Q[mu - 1][a] * Form.generator(a + 1, n) for a in range(n) if Q[mu - 1][a]),
                      Form.zero(n)) for mu in range(1, n + 1)}
    new_d = []
    for a in range(n):
        old = sum((P[a][mu] * sd.d[mu] for mu in range(n) if P[a][mu]), Form.zero(n))
        new_d.append(pullback(old, images))
    kwargs = dict(has_A=sd.has_A, name=name or f"{sd.name}'", params=sd.params,
                  contact=sd.contact)
    kwargs.update(overrides)
    return StructureDefinition(n, tuple(new_d), **kwargs)


def gauge_shift(sd: StructureDefinition, shift: Sequence) -> StructureDefinition:
    """Rewrite with ``A = A' + sum_k shift[k-1] e_k``; the new generator 6 is ``A'``.

    The shift must have an A-free differential, otherwise the constructor rejects ``dA'``.
    """
    if not sd.has_A:
        raise ValueError("gauge shift needs the auxiliary generator")
    n = sd.n
    P = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for k, c in enumerate(shift):
        P[A_INDEX - 1][k] = -Fraction(c)
    return substitute(sd, P, name=f"{sd.name}[A-shift]")


def restrict_gauge(sd: StructureDefinition, a_value: Form, name: str | None = None) -> StructureDefinition:
    """Eliminate ``A`` by restricting to the leaf ``A = a_value`` (a 1-form in e1..e5).

    Valid only when ``d(A - a_value)`` vanishes on the leaf; otherwise raises.
    """
    if not sd.has_A:
        raise ValueError("definition has no auxiliary generator")
    if a_value.involves(A_INDEX):
        raise ValueError("the gauge value must be A-free")
    a6 = a_value.embed(6) if a_value.n != 6 else a_value
    d5 = tuple(Form(5, pullback(sd.de(mu), {A_INDEX: a6}).terms) for mu in range(1, 6))
    out = StructureDefinition(5, d5, has_A=False, name=name or f"{sd.name}|A={a_value}",
                              params=sd.params, contact=sd.contact)
    lhs = Form(5, pullback(sd.de(A_INDEX), {A_INDEX: a6}).terms)
    rhs = exterior_derivative(out, Form(5, a_value.terms))
    if lhs != rhs:
        raise ValueError(f"A = {a_value} is not a consistent gauge: dA - d(value) = {lhs - rhs}")
    return out


def rotate_frame(sd: StructureDefinition, cos, sin) -> StructureDefinition:
    """Rotate the pairs (e1, e2) and (e3, e4) by a constant angle with rational cos/sin.

    ``e*1 = cos e1 - sin e2``, ``e*2 = sin e1 + cos e2``, likewise for (e3, e4).
    """
    cos, sin = Fraction(cos), Fraction(sin)
    if cos * cos + sin * sin != 1:
        raise ValueError("cos^2 + sin^2 must equal 1")
    n = sd.n
    P = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for p, q in ((0, 1), (2, 3)):
        P[p][p], P[p][q] = cos, -sin
        P[q][p], P[q][q] = sin, cos
    return substitute(sd, P, name=f"{sd.name}[rot]")


def change_frame(sd: StructureDefinition, rotation=None, matrix=None) -> StructureDefinition:
    """Constant frame change: either a rotation ``(cos, sin)`` or a full substitution matrix."""
    if (rotation is None) == (matrix is None):
        raise ValueError("give exactly one of rotation or matrix")
    if rotation is not None:
        return rotate_frame(sd, *rotation)
    return substitute(sd, matrix)


def _sqrt_exact(q: Fraction) -> Optional[Fraction]:
    from math import isqrt

    if q < 0:
        return None
    num, den = q.numerator, q.denominator
    rn, rd = isqrt(num), isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


def scale_factor(squares: Mapping[int, Fraction], numer: Sequence[int], denom: Sequence[int]) -> Fraction:
    """Exact ``prod sqrt(q_i, i in numer) / prod sqrt(q_j, j in denom)``.

    Raises ``ValueError`` if the result is irrational.
    """
    sq = Fraction(1)
    for i in numer:
        sq *= Fraction(squares.get(i, 1))
    for j in denom:
        sq /= Fraction(squares.get(j, 1))
    root = _sqrt_exact(sq)
    if root is None:
        raise ValueError(f"scaling factor sqrt({sq}) is irrational")
    return root


def rescale_form(w: Form, squares: Mapping[int, Fraction]) -> Form:
    """Express ``w`` in the coframe ``f_i = sqrt(squares[i]) e_i``."""
    return Form(w.n, {idx: c * scale_factor(squares, (), idx) for idx, c in w.items()})


def unscale_form(w: Form, squares: Mapping[int, Fraction]) -> Form:
    """Inverse of :func:`rescale_form`: from the scaled coframe back to ``e``."""
    return Form(w.n, {idx: c * scale_factor(squares, idx, ()) for idx, c in w.items()})


def scale_coframe(sd: StructureDefinition, squares: Mapping[int, Fraction], name: str | None = None,
                  **overrides) -> StructureDefinition:
    """Structure constants in the coframe ``f_i = sqrt(squares[i]) e_i``.

    Exact as long as every coefficient picks up a rational factor.
    """
    for q in squares.values():
        if Fraction(q) <= 0:
            raise ValueError("scale squares must be positive")
    new_d = []
    for mu in range(1, sd.n + 1):
        # d f_mu = sqrt(q_mu) d e_mu, and e_I = f_I / sqrt(q_I)
        new_d.append(Form(sd.n, {idx: c * scale_factor(squares, (mu,), idx)
                                 for idx, c in sd.de(mu).items()}))
    kwargs = dict(has_A=sd.has_A, name=name or f"{sd.name}[scaled]", params=sd.params,
                  contact=sd.contact)
    kwargs.update(overrides)
    return StructureDefinition(sd.n, tuple(new_d), **kwargs)


def same_constants(x: StructureDefinition, y: StructureDefinition) -> bool:
    return x.n == y.n and x.d == y.d


S3S3_SUBSTITUTION = (
    # u1 = e1 + e4, u2 = e2 - e3, u3 = e1 - e4, u4 = e2 + e3, C1 = A + e5, C2 = A - e5
    (1, 0, 0, 1, 0, 0),
    (0, 1, -1, 0, 0, 0),
    (1, 0, 0, -1, 0, 0),
    (0, 1, 1, 0, 0, 0),
    (0, 0, 0, 0, 1, 1),
    (0, 0, 0, 0, -1, 1),
)
"""Rows give the new generators in terms of (e1, ..., e5, A); u_i = sqrt(2) e*_i."""


def to_s3s3_frame(sd: StructureDefinition) -> StructureDefinition:
    """Apply the S^3 x S^3 basis change, including the sqrt(2) normalization."""
    unnormalized = substitute(sd, S3S3_SUBSTITUTION, name=f"{sd.name}[u]", has_A=False, contact=False)
    return scale_coframe(unnormalized, {1: Fraction(1, 2), 2: Fraction(1, 2), 3: Fraction(1, 2),
                                        4: Fraction(1, 2)}, name=f"{sd.name}[s3s3]")


def sasaki_reduction(sd: StructureDefinition) -> StructureDefinition:
    """Eliminate A through the gauge ``A = lambda e5`` (needs b = c = 0, a = d = lambda)."""
    p = sd.params
    if p is None or p.b != 0 or p.c != 0 or p.a != p.d:
        raise ValueError("the 5-dimensional gauge A = lambda e5 needs b = c = 0 and a = d")
    return restrict_gauge(sd, p.a * Form.generator(5, 5), name=f"{sd.name}|A={p.a}e5")
