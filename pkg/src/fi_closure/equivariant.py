"""Equivariant maps from k x w matrices to products of off-diagonal tensors.

A map is given by one polynomial per generator: the image of the width-``e``
generator ``y_{1..e}`` is a polynomial in ``x[i, j]`` with ``j <= e``. On points,
the entry of component ``e`` at a distinct tuple ``(j_1, ..., j_e)`` is that
polynomial with column ``c`` read from column ``j_c`` of the matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import prod
from typing import List, Sequence, Tuple

from .errors import FormatError, PushforwardError, RowError, WidthError
from .poly import MATRIX_X, Injection, Polynomial, parse_scalar, format_scalar
from .tensor import OffDiagTensor, RankDecomposition, distinct_tuples


@dataclass(frozen=True)
class Component:
    width: int
    image: Polynomial


@dataclass(frozen=True)
class EquivariantMap:
    k: int
    components: Tuple[Component, ...]

    def __post_init__(self):
        if self.k < 0:
            raise FormatError("k must be non-negative")
        comps = []
        for c in self.components:
            if c.width < 0:
                raise FormatError("component width must be non-negative")
            if c.image.kind != MATRIX_X:
                raise FormatError("generator images must be matrix_x polynomials")
            for i, j in c.image.variables():
                if i > self.k:
                    raise RowError(f"x_{{{i},{j}}} uses row {i} > k = {self.k}")
                if j > c.width:
                    raise WidthError(f"x_{{{i},{j}}} uses column {j} > width {c.width}")
            comps.append(c)
        # stable: ties keep their input order
        comps.sort(key=lambda c: c.width)
        object.__setattr__(self, "components", tuple(comps))

    @property
    def max_width(self) -> int:
        return max((c.width for c in self.components), default=0)

    def profile(self) -> Tuple[int, ...]:
        """Generator counts ``(k_0, ..., k_D)`` per width."""
        counts = [0] * (self.max_width + 1)
        for c in self.components:
            counts[c.width] += 1
        return tuple(counts)

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "components": [{"width": c.width, "image": c.image.to_json()} for c in self.components],
        }

    @classmethod
    def from_json(cls, obj) -> "EquivariantMap":
        return parse_map(obj)


def parse_map(obj) -> EquivariantMap:
    try:
        k = int(obj["k"])
        comps = tuple(
            Component(int(c["width"]), Polynomial.from_json(c["image"])) for c in obj["components"]
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed map JSON: {exc}") from None
    return EquivariantMap(k, comps)


@dataclass(frozen=True)
class MatrixPoint:
    k: int
    width: int
    rows: Tuple[Tuple[Fraction, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(parse_scalar(v) for v in r) for r in self.rows)
        if len(rows) != self.k:
            raise FormatError(f"expected {self.k} rows, got {len(rows)}")
        if any(len(r) != self.width for r in rows):
            raise FormatError(f"every row must have {self.width} entries")
        object.__setattr__(self, "rows", rows)

    def column(self, j: int) -> Tuple[Fraction, ...]:
        return tuple(r[j - 1] for r in self.rows)

    def permute_columns(self, sigma: Injection) -> "MatrixPoint":
        """Move column ``j`` to position ``sigma(j)``."""
        if not sigma.is_permutation() or sigma.domain_size != self.width:
            raise FormatError("need a permutation of the columns")
        inv = sigma.inverse().images
        return MatrixPoint(self.k, self.width, tuple(tuple(r[inv[j] - 1] for j in range(self.width)) for r in self.rows))

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "width": self.width,
            "rows": [[format_scalar(v) for v in r] for r in self.rows],
        }

    @classmethod
    def from_json(cls, obj) -> "MatrixPoint":
        try:
            return cls(int(obj["k"]), int(obj["width"]), tuple(tuple(r) for r in obj["rows"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"malformed point JSON: {exc}") from None


def rank_bound(m: EquivariantMap) -> int:
    """Largest number of monomials in any generator image."""
    return max((len(c.image) for c in m.components), default=0)


def _check_point(m: EquivariantMap, a: MatrixPoint):
    if a.k != m.k:
        raise PushforwardError(f"point has {a.k} rows, map expects {m.k}")
    if a.width < m.max_width:
        raise PushforwardError(f"width {a.width} is smaller than the widest generator ({m.max_width})")


def _monomial_value(mono, a: MatrixPoint, cols: Sequence[int]) -> Fraction:
    return prod((a.rows[i - 1][cols[j - 1] - 1] ** e for (i, j), e in mono), start=Fraction(1))


def pushforward(m: EquivariantMap, a: MatrixPoint) -> List[OffDiagTensor]:
    """Image of a matrix point: one off-diagonal tensor per component."""
    _check_point(m, a)
    out = []
    for comp in m.components:
        terms = comp.image.terms
        entries = {}
        for idx in distinct_tuples(range(1, a.width + 1), comp.width):
            value = sum((c * _monomial_value(mono, a, idx) for mono, c in terms), Fraction(0))
            if value:
                entries[idx] = value
        out.append(OffDiagTensor(comp.width, a.width, entries))
    return out


def monomial_decompositions(m: EquivariantMap, a: MatrixPoint) -> List[RankDecomposition]:
    """Per component, one rank-1 term per monomial whose projection is the
    pushforward: the factor at position ``c`` is the column-``c`` part of the
    monomial evaluated on every column of ``a``."""
    _check_point(m, a)
    out = []
    for comp in m.components:
        terms = []
        for mono, coeff in comp.image.terms:
            vectors = []
            for c in range(1, comp.width + 1):
                factor = [(i, e) for (i, j), e in mono if j == c]
                vectors.append(
                    tuple(prod((a.rows[i - 1][s] ** e for i, e in factor), start=Fraction(1)) for s in range(a.width))
                )
            terms.append((coeff, vectors))
        out.append(RankDecomposition(comp.width, a.width, terms))
    return out


def factor_model_preset(k: int) -> EquivariantMap:
    """Gaussian ``k``-factor model ``Sigma = A A^T + D``.

    Rows ``1..k`` of the matrix hold the loadings, row ``k+1`` the diagonal of
    ``D``. The width-2 generator is an off-diagonal entry of Sigma, the
    width-1 generator a diagonal entry.
    """
    if k < 1:
        raise FormatError("the factor model needs k >= 1")
    off = Polynomial.from_terms(MATRIX_X, [(1, [((l, 1), 1), ((l, 2), 1)]) for l in range(1, k + 1)])
    diag = Polynomial.from_terms(
        MATRIX_X, [(1, [((l, 1), 2)]) for l in range(1, k + 1)] + [(1, [((k + 1, 1), 1)])]
    )
    return EquivariantMap(k + 1, (Component(2, off), Component(1, diag)))
