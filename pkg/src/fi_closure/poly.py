"""Exact scalars, injections and indexed polynomials with the FI-action.

Two variable families are supported:

* ``matrix_x``: variables ``x[i, j]`` with row ``i`` in ``[k]`` and column ``j``;
  an injection acts on the column index only.
* ``tensor_y``: variables ``y[i1, ..., id]`` indexed by distinct-value tuples;
  an injection acts on every entry of the tuple.

All indices are 1-based.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Tuple, Union

from .errors import (
    ActionError,
    CompositionError,
    EvaluationError,
    FormatError,
    PolynomialKindError,
)

MATRIX_X = "matrix_x"
TENSOR_Y = "tensor_y"
KINDS = (MATRIX_X, TENSOR_Y)

Index = Tuple[int, ...]
Monomial = Tuple[Tuple[Index, int], ...]
ScalarLike = Union[int, Fraction, str]

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")


def parse_scalar(value) -> Fraction:
    """Parse ``"p/q"``, ``"p"`` or an int into a reduced :class:`Fraction`."""
    if isinstance(value, bool):
        raise FormatError(f"not a rational: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        m = _RATIONAL_RE.match(value)
        if m is None:
            raise FormatError(f"not a rational: {value!r}")
        den = int(m.group(2)) if m.group(2) is not None else 1
        if den == 0:
            raise FormatError(f"zero denominator: {value!r}")
        return Fraction(int(m.group(1)), den)
    raise FormatError(f"not a rational: {value!r}")


def format_scalar(value: Fraction) -> str:
    return str(Fraction(value))


# ---------------------------------------------------------------------------
# Injections
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Injection:
    """An injective map ``[n] -> [codomain_size]`` stored by its images."""

    images: Tuple[int, ...]
    codomain_size: int

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(int(v) for v in self.images))
        if self.codomain_size < 0:
            raise FormatError("codomain size must be non-negative")
        if len(set(self.images)) != len(self.images):
            raise FormatError(f"images are not pairwise distinct: {self.images}")
        for v in self.images:
            if not 1 <= v <= self.codomain_size:
                raise FormatError(f"image {v} outside [{self.codomain_size}]")

    @classmethod
    def identity(cls, n: int) -> "Injection":
        return cls(tuple(range(1, n + 1)), n)

    @property
    def domain_size(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        if not 1 <= i <= len(self.images):
            raise ActionError(f"index {i} outside domain [{len(self.images)}]")
        return self.images[i - 1]

    def is_permutation(self) -> bool:
        return self.domain_size == self.codomain_size

    def inverse(self) -> "Injection":
        if not self.is_permutation():
            raise CompositionError("only permutations are invertible")
        inv = [0] * self.domain_size
        for i, v in enumerate(self.images, start=1):
            inv[v - 1] = i
        return Injection(tuple(inv), self.domain_size)


def compose(f: Injection, g: Injection) -> Injection:
    """Return ``g o f`` (apply ``f`` first)."""
    if f.codomain_size != g.domain_size:
        raise CompositionError(
            f"cannot compose [{f.domain_size}]->[{f.codomain_size}] "
            f"with [{g.domain_size}]->[{g.codomain_size}]"
        )
    return Injection(tuple(g(v) for v in f.images), g.codomain_size)


# ---------------------------------------------------------------------------
# Polynomials
# ---------------------------------------------------------------------------


def _check_index(kind: str, idx) -> Index:
    try:
        idx = tuple(int(v) for v in idx)
    except (TypeError, ValueError):
        raise FormatError(f"bad variable index {idx!r}") from None
    if any(v < 1 for v in idx):
        raise FormatError(f"variable indices are 1-based: {idx}")
    if kind == MATRIX_X:
        if len(idx) != 2:
            raise FormatError(f"matrix_x variable needs (row, col), got {idx}")
    elif len(set(idx)) != len(idx):
        raise FormatError(f"tensor_y variable must be a distinct-value tuple: {idx}")
    return idx


def _monomial(kind: str, factors: Iterable[Tuple[Index, int]], check=True) -> Monomial:
    exps: dict = {}
    for idx, e in factors:
        if check:
            idx = _check_index(kind, idx)
            e = int(e)
            if e < 0:
                raise FormatError("negative exponent")
        if e:
            exps[idx] = exps.get(idx, 0) + e
    return tuple(sorted(exps.items()))


class Polynomial:
    """Sparse polynomial with exact rational coefficients.

    Terms are kept normalized: no zero coefficients, each monomial once, and
    ``terms`` is sorted lexicographically by monomial.
    """

    __slots__ = ("kind", "_terms", "_hash")

    def __init__(self, kind: str, terms: Mapping[Monomial, Fraction] = None):
        if kind not in KINDS:
            raise FormatError(f"unknown variable kind {kind!r}")
        self.kind = kind
        clean = {}
        for mono, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                clean[mono] = c
        self._terms = dict(sorted(clean.items()))
        self._hash = None

    # construction helpers

    @classmethod
    def from_terms(cls, kind: str, terms: Iterable[Tuple[ScalarLike, Iterable]]) -> "Polynomial":
        """Build from ``(coeff, [(index, exponent), ...])`` pairs, merging repeats."""
        acc: dict = {}
        for coeff, factors in terms:
            mono = _monomial(kind, factors)
            acc[mono] = acc.get(mono, 0) + parse_scalar(coeff)
        return cls(kind, acc)

    @classmethod
    def zero(cls, kind: str) -> "Polynomial":
        return cls(kind)

    @classmethod
    def constant(cls, kind: str, c: ScalarLike) -> "Polynomial":
        return cls(kind, {(): parse_scalar(c)})

    @classmethod
    def var(cls, kind: str, *idx: int) -> "Polynomial":
        if len(idx) == 1 and isinstance(idx[0], tuple):
            idx = idx[0]
        return cls(kind, {((_check_index(kind, idx), 1),): Fraction(1)})

    # inspection

    @property
    def terms(self) -> Tuple[Tuple[Monomial, Fraction], ...]:
        return tuple(self._terms.items())

    def coefficient(self, mono: Monomial) -> Fraction:
        return self._terms.get(mono, Fraction(0))

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        return max((sum(e for _, e in m) for m in self._terms), default=0)

    def variables(self) -> Tuple[Index, ...]:
        return tuple(sorted({idx for m in self._terms for idx, _ in m}))

    def labels(self) -> Tuple[int, ...]:
        """Column indices (``matrix_x``) or tuple entries (``tensor_y``) in use."""
        if self.kind == MATRIX_X:
            return tuple(sorted({idx[1] for idx in self.variables()}))
        return tuple(sorted({v for idx in self.variables() for v in idx}))

    def sort_key(self):
        return tuple(self._terms.items())

    # ring operations

    def _check_kind(self, other: "Polynomial"):
        if other.kind != self.kind:
            raise PolynomialKindError(f"cannot combine {self.kind} with {other.kind}")

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            self._check_kind(other)
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Polynomial.constant(self.kind, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc = dict(self._terms)
        for m, c in other._terms.items():
            acc[m] = acc.get(m, 0) + c
        return Polynomial(self.kind, acc)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.kind, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def scale(self, c: ScalarLike) -> "Polynomial":
        c = parse_scalar(c)
        return Polynomial(self.kind, {m: c * v for m, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check_kind(other)
        acc: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                mono = _monomial(self.kind, m1 + m2, check=False)
                acc[mono] = acc.get(mono, 0) + c1 * c2
        return Polynomial(self.kind, acc)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Polynomial":
        result = Polynomial.constant(self.kind, 1)
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.kind == other.kind and self._terms == other._terms
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self == Polynomial.constant(self.kind, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.kind, tuple(self._terms.items())))
        return self._hash

    def __repr__(self):
        if not self._terms:
            return "0"
        letter = "x" if self.kind == MATRIX_X else "y"
        parts = []
        for mono, c in self._terms.items():
            factors = []
            for idx, e in mono:
                name = f"{letter}_{{{','.join(map(str, idx))}}}"
                factors.append(name if e == 1 else f"{name}^{e}")
            body = "*".join(factors)
            if not body:
                parts.append(str(c))
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append("-" + body)
            else:
                parts.append(f"{c}*{body}")
        return " + ".join(parts).replace("+ -", "- ")

    # serialization

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "terms": [
                {
                    "coeff": format_scalar(c),
                    "vars": [{"idx": list(idx), "exp": e} for idx, e in mono],
                }
                for mono, c in self._terms.items()
            ],
        }

    @classmethod
    def from_json(cls, obj) -> "Polynomial":
        try:
            kind = obj["kind"]
            raw = obj["terms"]
            terms = [
                (t["coeff"], [(v["idx"], v.get("exp", 1)) for v in t["vars"]])
                for t in raw
            ]
        except (KeyError, TypeError) as exc:
            raise FormatError(f"malformed polynomial JSON: {exc}") from None
        if kind not in KINDS:
            raise FormatError(f"unknown variable kind {kind!r}")
        return cls.from_terms(kind, terms)


def act(sigma: Injection, p: Polynomial) -> Polynomial:
    """Apply the FI-action of ``sigma`` by substituting indices."""
    n = sigma.domain_size
    img = sigma.images

    def move(v):
        if not 1 <= v <= n:
            raise ActionError(f"index {v} outside the domain [{n}] of the injection")
        return img[v - 1]

    acc: dict = {}
    for mono, c in p.terms:
        if p.kind == MATRIX_X:
            factors = [((i, move(j)), e) for (i, j), e in mono]
        else:
            factors = [(tuple(move(v) for v in idx), e) for idx, e in mono]
        new = _monomial(p.kind, factors, check=False)
        acc[new] = acc.get(new, 0) + c
    return Polynomial(p.kind, acc)


def evaluate(p: Polynomial, assignment: Mapping[Index, ScalarLike]) -> Fraction:
    """Exact value of ``p`` at a point given as ``{index: value}``."""
    total = Fraction(0)
    for mono, c in p.terms:
        value = c
        for idx, e in mono:
            try:
                x = assignment[idx]
            except KeyError:
                raise EvaluationError(f"no value assigned to variable {idx}") from None
            value *= Fraction(x) ** e
        total += value
    return total
