"""Exact exterior algebra over an ordered coframe of at most six generators.

Generators are numbered from 1.  In the five-dimensional models the
generators ``1..5`` form an oriented orthonormal coframe with ``e5 = eta``;
generator 6, when present, is the auxiliary connection 1-form ``A``.

Forms are evaluated with the determinant convention,
``(e1 ^ e2)(E1, E2) = 1``, so that ``d(eta) = 2 F`` on the Heisenberg model.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from numbers import Rational
from typing import Dict, Iterable, Iterator, Mapping, Sequence, Tuple

MAX_GENERATORS = 6
A_INDEX = 6

MultiIndex = Tuple[int, ...]


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"exact rational expected, got {type(x).__name__}")


def sort_sign(indices: Sequence[int]) -> Tuple[int, MultiIndex]:
    """Sign of the permutation sorting ``indices``; 0 if an index repeats."""
    idx = list(indices)
    if len(set(idx)) != len(idx):
        return 0, ()
    sign = 1
    # bubble sort, the tuples have length <= 6
    for i in range(len(idx)):
        for j in range(len(idx) - 1 - i):
            if idx[j] > idx[j + 1]:
                idx[j], idx[j + 1] = idx[j + 1], idx[j]
                sign = -sign
    return sign, tuple(idx)


class Form:
    """Graded element of the exterior algebra with exact rational coefficients.

    ``terms`` maps strictly increasing multi-indices to nonzero Fractions.
    The empty multi-index holds the scalar part.
    """

    __slots__ = ("n", "_terms", "_hash")

    def __init__(self, n: int, terms: Mapping[MultiIndex, object] | None = None):
        if not 1 <= n <= MAX_GENERATORS:
            raise ValueError(f"coframe size must be in 1..{MAX_GENERATORS}, got {n}")
        self.n = n
        clean: Dict[MultiIndex, Fraction] = {}
        for idx, c in (terms or {}).items():
            idx = tuple(idx)
            if any(not 1 <= i <= n for i in idx):
                raise ValueError(f"index {idx} outside coframe of size {n}")
            sign, key = sort_sign(idx)
            if sign == 0:
                continue
            val = clean.get(key, Fraction(0)) + sign * _frac(c)
            if val:
                clean[key] = val
            else:
                clean.pop(key, None)
        self._terms = clean
        self._hash = None

    # construction helpers -------------------------------------------------
    @classmethod
    def _raw(cls, n: int, terms: Dict[MultiIndex, Fraction]) -> "Form":
        obj = cls.__new__(cls)
        obj.n = n
        obj._terms = {k: v for k, v in terms.items() if v}
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, n: int) -> "Form":
        return cls._raw(n, {})

    @classmethod
    def scalar(cls, value, n: int) -> "Form":
        return cls._raw(n, {(): _frac(value)})

    @classmethod
    def generator(cls, i: int, n: int) -> "Form":
        if not 1 <= i <= n:
            raise ValueError(f"generator {i} outside coframe of size {n}")
        return cls._raw(n, {(i,): Fraction(1)})

    @classmethod
    def monomial(cls, idx: Sequence[int], n: int, coeff=1) -> "Form":
        return cls(n, {tuple(idx): coeff})

    # inspection -----------------------------------------------------------
    @property
    def terms(self) -> Dict[MultiIndex, Fraction]:
        return dict(self._terms)

    def items(self) -> Iterator[Tuple[MultiIndex, Fraction]]:
        return iter(sorted(self._terms.items()))

    def coeff(self, idx: Sequence[int]) -> Fraction:
        sign, key = sort_sign(idx)
        if sign == 0:
            return Fraction(0)
        return sign * self._terms.get(key, Fraction(0))

    def degrees(self) -> set:
        return {len(k) for k in self._terms}

    def degree(self) -> int:
        """Pure degree; the zero form reports -1.  Mixed degrees raise."""
        degs = self.degrees()
        if not degs:
            return -1
        if len(degs) > 1:
            raise ValueError(f"form of mixed degree {sorted(degs)}")
        return degs.pop()

    def homogeneous(self, k: int) -> "Form":
        return Form._raw(self.n, {i: c for i, c in self._terms.items() if len(i) == k})

    def support(self) -> set:
        return {i for idx in self._terms for i in idx}

    def involves(self, i: int) -> bool:
        return any(i in idx for idx in self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __call__(self, *vectors: int) -> Fraction:
        """Evaluate on frame vectors given by their indices."""
        return self.homogeneous(len(vectors)).coeff(vectors)

    # arithmetic -----------------------------------------------------------
    def _check(self, other: "Form") -> None:
        if not isinstance(other, Form):
            raise TypeError(f"expected Form, got {type(other).__name__}")
        if other.n != self.n:
            raise ValueError(f"coframe size mismatch: {self.n} vs {other.n}")

    def __add__(self, other):
        if not isinstance(other, Form):
            if other == 0:
                return self
            return NotImplemented
        self._check(other)
        out = dict(self._terms)
        for k, v in other._terms.items():
            out[k] = out.get(k, Fraction(0)) + v
        return Form._raw(self.n, out)

    __radd__ = __add__

    def __neg__(self):
        return Form._raw(self.n, {k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, c):
        if isinstance(c, Form):
            return NotImplemented
        c = _frac(c)
        return Form._raw(self.n, {k: v * c for k, v in self._terms.items()})

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self * (1 / _frac(c))

    def __xor__(self, other):
        return wedge(self, other)

    def __eq__(self, other):
        if isinstance(other, Form):
            return self.n == other.n and self._terms == other._terms
        if other == 0:
            return not self._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        return f"Form({self.n}, {format_form(self)!r})"

    def embed(self, n: int) -> "Form":
        """Same form viewed in a larger coframe."""
        if n < self.n and self.support() and max(self.support()) > n:
            raise ValueError(f"form uses generators beyond {n}")
        return Form._raw(n, self._terms)

    # serialization --------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "terms": [
                {"idx": list(idx), "num": c.numerator, "den": c.denominator}
                for idx, c in self.items()
            ]
        }

    @classmethod
    def from_json(cls, data: dict, n: int) -> "Form":
        terms: Dict[MultiIndex, Fraction] = {}
        for t in data.get("terms", []):
            idx = tuple(int(i) for i in t["idx"])
            if list(idx) != sorted(set(idx)):
                raise ValueError(f"multi-index {idx} is not strictly increasing")
            terms[idx] = terms.get(idx, Fraction(0)) + Fraction(int(t["num"]), int(t.get("den", 1)))
        return cls(n, terms)


def generators(n: int) -> Tuple[Form, ...]:
    """The coframe ``(e1, ..., en)``."""
    return tuple(Form.generator(i, n) for i in range(1, n + 1))


def wedge(a: Form, b: Form) -> Form:
    a._check(b)
    out: Dict[MultiIndex, Fraction] = {}
    for ia, ca in a._terms.items():
        for ib, cb in b._terms.items():
            sign, key = sort_sign(ia + ib)
            if sign:
                out[key] = out.get(key, Fraction(0)) + sign * ca * cb
    return Form._raw(a.n, out)


def wedge_all(forms: Iterable[Form], n: int) -> Form:
    out = Form.scalar(1, n)
    for f in forms:
        out = wedge(out, f)
    return out


def interior(v: int, w: Form) -> Form:
    """Contraction of ``w`` with the frame vector dual to generator ``v``."""
    if not 1 <= v <= w.n:
        raise ValueError(f"frame vector {v} outside coframe of size {w.n}")
    out: Dict[MultiIndex, Fraction] = {}
    for idx, c in w._terms.items():
        if v in idx:
            p = idx.index(v)
            key = idx[:p] + idx[p + 1:]
            out[key] = out.get(key, Fraction(0)) + (c if p % 2 == 0 else -c)
    return Form._raw(w.n, out)


def interior_vector(vec: Sequence, w: Form) -> Form:
    """Contraction with ``sum_i vec[i-1] E_i``."""
    out = Form.zero(w.n)
    for i, c in enumerate(vec, start=1):
        if c:
            out = out + _frac(c) * interior(i, w)
    return out


def pullback(w: Form, images: Mapping[int, Form]) -> Form:
    """Substitute each generator ``i`` by the 1-form ``images[i]``.

    Generators absent from ``images`` are kept.  The images may live in a
    coframe of a different size; the result lives in theirs.
    """
    sizes = {f.n for f in images.values()}
    if len(sizes) > 1:
        raise ValueError("images must share one coframe size")
    n_out = sizes.pop() if sizes else w.n
    out = Form.zero(n_out)
    for idx, c in w._terms.items():
        term = Form.scalar(c, n_out)
        for i in idx:
            img = images.get(i)
            if img is None:
                img = Form.generator(i, n_out)
            term = wedge(term, img)
            if not term:
                break
        out = out + term
    return out


def _complement_sign(idx: MultiIndex, dim: int) -> Tuple[int, MultiIndex]:
    comp = tuple(i for i in range(1, dim + 1) if i not in idx)
    sign, _ = sort_sign(idx + comp)
    return sign, comp


def hodge(w: Form, mode: str = "full5") -> Form:
    """Hodge star of the orthonormal frame ``e1..e5`` or of ``e1..e4``.

    ``full5`` uses the volume form ``e1^e2^e3^e4^e5``; ``restricted4`` acts on
    forms without an ``e5`` (or ``A``) component, oriented by ``e1^e2^e3^e4``.
    Both satisfy ``a ^ *b = (a, b) vol``.
    """
    if mode == "full5":
        dim = 5
        if w.involves(A_INDEX):
            raise ValueError("full5 Hodge star needs an A-free form")
        if w.n < 5:
            raise ValueError("full5 Hodge star needs a coframe of size >= 5")
    elif mode == "restricted4":
        dim = 4
        if w.involves(5) or w.involves(A_INDEX):
            raise ValueError("restricted4 Hodge star applied to a form with e5 component")
    else:
        raise ValueError(f"unknown Hodge mode {mode!r}")
    out: Dict[MultiIndex, Fraction] = {}
    for idx, c in w._terms.items():
        sign, comp = _complement_sign(idx, dim)
        out[comp] = out.get(comp, Fraction(0)) + sign * c
    return Form._raw(w.n, out)


def hodge_inverse(w: Form, mode: str = "full5") -> Form:
    dim = 5 if mode == "full5" else 4
    # ** = (-1)^{k(dim-k)}
    out = Form.zero(w.n)
    for k in w.degrees():
        part = hodge(w.homogeneous(k), mode)
        out = out + (part if (k * (dim - k)) % 2 == 0 else -part)
    return out


def form_inner(a: Form, b: Form) -> Fraction:
    """Inner product making increasing basis monomials orthonormal."""
    a._check(b)
    if a.involves(A_INDEX) or b.involves(A_INDEX):
        raise ValueError("inner product is defined on e1..e5 only")
    da, db = a.degrees(), b.degrees()
    if len(da) > 1 or len(db) > 1 or (da and db and da != db):
        raise ValueError("inner product needs forms of one common degree")
    return sum((c * b._terms.get(k, 0) for k, c in a._terms.items()), Fraction(0))


def basis_forms(k: int, n: int = 5, indices: Sequence[int] | None = None) -> Tuple[Form, ...]:
    """All increasing degree-``k`` monomials over ``indices`` (default ``1..n``)."""
    idxs = indices if indices is not None else range(1, n + 1)
    return tuple(Form.monomial(c, n) for c in combinations(idxs, k))


def format_form(w: Form, names: Mapping[int, str] | None = None) -> str:
    """Human-readable rendering, e.g. ``2 e1^e2 - 1/2 A^e5``."""
    if not w:
        return "0"
    names = names or {}
    parts = []
    for idx, c in w.items():
        mono = "^".join(names.get(i, "A" if i == A_INDEX else f"e{i}") for i in idx)
        mag = abs(c)
        if not idx:
            body = str(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{mag} {mono}"
        parts.append(("-" if c < 0 else "+", body))
    text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        text += f" {sign} {body}"
    return text
