"""Off-diagonal tensors, rank decompositions, flattenings and minors."""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import comb, prod
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import (
    AxisError,
    DenseSizeError,
    DiagonalEntryError,
    EmbeddingError,
    FormatError,
    IndexRangeError,
    OffDiagonalityError,
)
from .linalg import determinant
from .poly import Injection, format_scalar, parse_scalar

Index = Tuple[int, ...]

DEFAULT_DENSE_CAP = 10**6
DENSE_CAP_ENV = "FI_CLOSURE_DENSE_CAP"


def dense_cap() -> int:
    raw = os.environ.get(DENSE_CAP_ENV)
    if raw is None:
        return DEFAULT_DENSE_CAP
    try:
        return int(raw)
    except ValueError:
        raise FormatError(f"{DENSE_CAP_ENV} must be an integer, got {raw!r}") from None


def distinct_tuples(values: Iterable[int], length: int) -> Iterator[Index]:
    """Distinct-value tuples over ``values``, in lexicographic order."""
    return itertools.permutations(sorted(values), length)


def count_distinct_tuples(n: int, length: int) -> int:
    if length > n:
        return 0
    return prod(range(n - length + 1, n + 1))


def insert_at(alpha: Sequence[int], c: int, axis: int) -> Index:
    """Insert ``c`` at 1-based position ``axis`` of ``alpha``."""
    return tuple(alpha[: axis - 1]) + (c,) + tuple(alpha[axis - 1:])


def _is_distinct(idx: Sequence[int]) -> bool:
    return len(set(idx)) == len(idx)


# ---------------------------------------------------------------------------
# Off-diagonal tensors
# ---------------------------------------------------------------------------


class OffDiagTensor:
    """Order-``d`` tensor over ``[width]`` known only on distinct-value tuples.

    Absent entries are zero; zeros are never stored.
    """

    __slots__ = ("d", "width", "_entries")

    def __init__(self, d: int, width: int, entries: Mapping[Index, Fraction] = None):
        if d < 0 or width < 0:
            raise FormatError("order and width must be non-negative")
        self.d = d
        self.width = width
        clean: Dict[Index, Fraction] = {}
        for idx, value in (entries or {}).items():
            idx = self._check_index(idx)
            value = parse_scalar(value)
            if value:
                clean[idx] = value
        self._entries = dict(sorted(clean.items()))

    def _check_index(self, idx) -> Index:
        idx = tuple(int(v) for v in idx)
        if len(idx) != self.d:
            raise FormatError(f"index {idx} does not have length {self.d}")
        if not _is_distinct(idx):
            raise DiagonalEntryError(f"index {idx} lies on the big diagonal")
        for v in idx:
            if not 1 <= v <= self.width:
                raise IndexRangeError(f"index {idx} outside [{self.width}]")
        return idx

    @classmethod
    def zero(cls, d: int, width: int) -> "OffDiagTensor":
        return cls(d, width)

    def __getitem__(self, idx) -> Fraction:
        return self._entries.get(self._check_index(idx), Fraction(0))

    def get(self, idx: Index) -> Fraction:
        """Unchecked lookup; callers guarantee ``idx`` is a valid key."""
        return self._entries.get(idx, Fraction(0))

    def items(self):
        return self._entries.items()

    @property
    def entries(self) -> Dict[Index, Fraction]:
        return dict(self._entries)

    def nnz(self) -> int:
        return len(self._entries)

    def is_zero(self) -> bool:
        return not self._entries

    def tuples(self) -> Iterator[Index]:
        return distinct_tuples(range(1, self.width + 1), self.d)

    def restrict(self, rho: Injection) -> "OffDiagTensor":
        """Pull back along ``rho: [w'] -> [width]``: ``q[j] = p[rho(j)]``."""
        if rho.codomain_size != self.width:
            raise FormatError("restriction map must land in the tensor's width")
        img = rho.images
        out = {}
        for j in distinct_tuples(range(1, rho.domain_size + 1), self.d):
            v = self._entries.get(tuple(img[a - 1] for a in j))
            if v:
                out[j] = v
        return OffDiagTensor(self.d, rho.domain_size, out)

    def relabel(self, sigma: Injection) -> "OffDiagTensor":
        """Push forward along ``sigma: [width] -> [w']``: ``q[sigma(j)] = p[j]``."""
        if sigma.domain_size != self.width:
            raise FormatError("relabeling map must start at the tensor's width")
        img = sigma.images
        return OffDiagTensor(
            self.d,
            sigma.codomain_size,
            {tuple(img[a - 1] for a in idx): v for idx, v in self._entries.items()},
        )

    def __eq__(self, other):
        if not isinstance(other, OffDiagTensor):
            return NotImplemented
        return (self.d, self.width, self._entries) == (other.d, other.width, other._entries)

    def __hash__(self):
        return hash((self.d, self.width, tuple(self._entries.items())))

    def __repr__(self):
        return f"OffDiagTensor(d={self.d}, width={self.width}, nnz={len(self._entries)})"

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "width": self.width,
            "entries": [
                {"idx": list(idx), "value": format_scalar(v)} for idx, v in self._entries.items()
            ],
        }

    @classmethod
    def from_json(cls, obj, strict: bool = False) -> "OffDiagTensor":
        try:
            d, width = int(obj["d"]), int(obj["width"])
            pairs = [(tuple(e["idx"]), e["value"]) for e in obj["entries"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"malformed tensor JSON: {exc}") from None
        return off_diag_from_entries(d, width, pairs, strict=strict)


def off_diag_from_entries(
    d: int,
    w: int,
    entries: Union[Mapping[Index, object], Iterable[Tuple[Index, object]]],
    strict: bool = False,
) -> OffDiagTensor:
    """Validate raw entries into an :class:`OffDiagTensor`.

    ``entries`` may be a mapping or a sequence of ``(index, value)`` pairs; a
    repeated index in the sequence is a :class:`FormatError`. In ``strict``
    mode every distinct-value tuple over ``[w]`` must be present.
    """
    pairs = entries.items() if isinstance(entries, Mapping) else entries
    t = OffDiagTensor(d, w)
    seen: Dict[Index, Fraction] = {}
    for idx, value in pairs:
        idx = t._check_index(idx)
        if idx in seen:
            raise FormatError(f"duplicate entry for index {idx}")
        seen[idx] = parse_scalar(value)
    if strict:
        missing = count_distinct_tuples(w, d) - len(seen)
        if missing:
            raise FormatError(f"strict mode: {missing} distinct-value tuples have no entry")
    return OffDiagTensor(d, w, seen)


# ---------------------------------------------------------------------------
# Rank decompositions
# ---------------------------------------------------------------------------

Term = Tuple[Fraction, Tuple[Tuple[Fraction, ...], ...]]


class RankDecomposition:
    """A full tensor written as ``sum coeff * v_1 (x) ... (x) v_d``."""

    __slots__ = ("d", "width", "terms")

    def __init__(self, d: int, width: int, terms: Iterable[Tuple[object, Sequence[Sequence[object]]]] = ()):
        self.d = d
        self.width = width
        clean: List[Term] = []
        for coeff, vectors in terms:
            vectors = tuple(tuple(parse_scalar(x) for x in v) for v in vectors)
            if len(vectors) != d:
                raise FormatError(f"term has {len(vectors)} vectors, expected {d}")
            if any(len(v) != width for v in vectors):
                raise FormatError(f"every vector must have length {width}")
            clean.append((parse_scalar(coeff), vectors))
        self.terms: Tuple[Term, ...] = tuple(clean)

    def __len__(self) -> int:
        return len(self.terms)

    def __add__(self, other: "RankDecomposition") -> "RankDecomposition":
        if (self.d, self.width) != (other.d, other.width):
            raise FormatError("cannot add decompositions of different shapes")
        return RankDecomposition(self.d, self.width, self.terms + other.terms)

    def value_at(self, idx: Index) -> Fraction:
        total = Fraction(0)
        for coeff, vectors in self.terms:
            total += coeff * prod((v[j - 1] for v, j in zip(vectors, idx)), start=Fraction(1))
        return total

    def __eq__(self, other):
        if not isinstance(other, RankDecomposition):
            return NotImplemented
        return (self.d, self.width, self.terms) == (other.d, other.width, other.terms)

    def __repr__(self):
        return f"RankDecomposition(d={self.d}, width={self.width}, terms={len(self.terms)})"

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "width": self.width,
            "terms": [
                {
                    "coeff": format_scalar(c),
                    "vectors": [[format_scalar(x) for x in v] for v in vectors],
                }
                for c, vectors in self.terms
            ],
        }

    @classmethod
    def from_json(cls, obj) -> "RankDecomposition":
        try:
            d, width = int(obj["d"]), int(obj["width"])
            terms = [(t["coeff"], t["vectors"]) for t in obj["terms"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"malformed decomposition JSON: {exc}") from None
        return cls(d, width, terms)


def project(t: RankDecomposition) -> OffDiagTensor:
    """Forget the big diagonal of the represented full tensor."""
    acc: Dict[Index, Fraction] = {}
    for coeff, vectors in t.terms:
        if not coeff:
            continue
        supports = [[(j, x) for j, x in enumerate(v, start=1) if x] for v in vectors]
        for combo in itertools.product(*supports):
            idx = tuple(j for j, _ in combo)
            if not _is_distinct(idx):
                continue
            acc[idx] = acc.get(idx, 0) + coeff * prod((x for _, x in combo), start=Fraction(1))
    return OffDiagTensor(t.d, t.width, acc)


def densify(t: RankDecomposition, cap: Optional[int] = None) -> np.ndarray:
    """Materialize as an ``object`` array of Fractions with shape ``(w,) * d``."""
    cap = dense_cap() if cap is None else cap
    size = t.width ** t.d
    if size > cap:
        raise DenseSizeError(f"dense tensor would have {size} entries (cap {cap})")
    out = np.full((t.width,) * t.d, Fraction(0), dtype=object)
    for coeff, vectors in t.terms:
        if t.d == 0:
            out = out + coeff
            continue
        arrays = [np.array(v, dtype=object) for v in vectors]
        out = out + coeff * reduce(np.multiply.outer, arrays)
    return np.asarray(out, dtype=object)


# ---------------------------------------------------------------------------
# Flattenings and minors
# ---------------------------------------------------------------------------


class _Diagonal:
    def __repr__(self):
        return "DIAGONAL"


DIAGONAL = _Diagonal()
"""Marker returned for flattening positions that fall on the big diagonal."""


@dataclass(frozen=True)
class FlatteningView:
    """Lazy matrix view of a tensor: axis ``axis`` gives columns.

    Row labels are read as the values at the remaining positions, in
    increasing position order.
    """

    source: Union[OffDiagTensor, np.ndarray]
    axis: int

    @property
    def d(self) -> int:
        return self.source.d if isinstance(self.source, OffDiagTensor) else self.source.ndim

    @property
    def width(self) -> int:
        if isinstance(self.source, OffDiagTensor):
            return self.source.width
        return self.source.shape[0] if self.source.ndim else 0

    @property
    def off_diagonal(self) -> bool:
        return isinstance(self.source, OffDiagTensor)

    @property
    def row_labels(self) -> Tuple[Index, ...]:
        values = range(1, self.width + 1)
        if self.off_diagonal:
            return tuple(distinct_tuples(values, self.d - 1))
        return tuple(itertools.product(values, repeat=self.d - 1))

    @property
    def col_labels(self) -> Tuple[int, ...]:
        return tuple(range(1, self.width + 1))

    def entry(self, alpha: Sequence[int], c: int):
        idx = insert_at(alpha, c, self.axis)
        if self.off_diagonal:
            if not _is_distinct(idx):
                return DIAGONAL
            return self.source[idx]
        return self.source[tuple(v - 1 for v in idx)]

    def matrix(self, rows: Sequence[Index] = None, cols: Sequence[int] = None):
        rows = self.row_labels if rows is None else rows
        cols = self.col_labels if cols is None else cols
        out = []
        for a in rows:
            line = [self.entry(a, c) for c in cols]
            if any(x is DIAGONAL for x in line):
                raise OffDiagonalityError(f"row {a} meets the diagonal for columns {tuple(cols)}")
            out.append(line)
        return out


def flatten(p: Union[OffDiagTensor, np.ndarray], i: int) -> FlatteningView:
    view = FlatteningView(p, i)
    if not 1 <= i <= view.d:
        raise AxisError(f"axis {i} outside [1, {view.d}]")
    return view


def minor_matrix(p: OffDiagTensor, i: int, rows: Iterable[Index], cols: Iterable[int]):
    """Validated square submatrix of the flattening, rows and cols sorted."""
    view = flatten(p, i)
    rows = sorted(tuple(int(v) for v in r) for r in rows)
    cols = sorted(int(c) for c in cols)
    if len(rows) != len(cols):
        raise OffDiagonalityError(f"{len(rows)} rows but {len(cols)} columns")
    if len(set(rows)) != len(rows) or len(set(cols)) != len(cols):
        raise OffDiagonalityError("rows and columns must be pairwise distinct")
    for r in rows:
        if len(r) != p.d - 1:
            raise FormatError(f"row label {r} does not have length {p.d - 1}")
        if any(not 1 <= v <= p.width for v in r):
            raise IndexRangeError(f"row label {r} outside [{p.width}]")
    for c in cols:
        if not 1 <= c <= p.width:
            raise IndexRangeError(f"column {c} outside [{p.width}]")
    return view.matrix(rows, cols)


def off_diag_minor(
    p: OffDiagTensor, i: int, rows: Iterable[Index], cols: Iterable[int], modulus: Optional[int] = None
):
    """Determinant of an off-diagonal square submatrix of the ``i``-th flattening."""
    return determinant(minor_matrix(p, i, rows, cols), modulus=modulus)


# ---------------------------------------------------------------------------
# Zero padding
# ---------------------------------------------------------------------------


def pad_embed(
    t: RankDecomposition,
    fixed: Mapping[int, int],
    width: int,
    support: Optional[Sequence[int]] = None,
) -> RankDecomposition:
    """Embed a slice decomposition into order ``t.d + len(fixed)`` over ``[width]``.

    ``fixed`` maps 1-based positions to the values they are pinned to; those
    positions get indicator vectors. The remaining positions, in increasing
    order, carry the vectors of ``t``. If ``support`` is given, ``t`` lives on
    ``[len(support)]`` and coordinate ``k`` is placed at ``support[k-1]``;
    otherwise ``t`` must already have width ``width``.
    """
    d = t.d + len(fixed)
    for pos, val in fixed.items():
        if not 1 <= pos <= d:
            raise EmbeddingError(f"fixed position {pos} outside [1, {d}]")
        if not 1 <= val <= width:
            raise EmbeddingError(f"fixed value {val} outside [{width}]")
    if support is None:
        if t.width != width:
            raise EmbeddingError(f"slice width {t.width} differs from target width {width}")
        place = list(range(width))
    else:
        support = list(support)
        if len(support) != t.width:
            raise EmbeddingError(f"support has {len(support)} elements, slice width is {t.width}")
        if len(set(support)) != len(support) or any(not 1 <= s <= width for s in support):
            raise EmbeddingError(f"support {support} is not a subset of [{width}]")
        place = [s - 1 for s in support]

    zero = Fraction(0)
    indicators = {}
    for pos, val in fixed.items():
        e = [zero] * width
        e[val - 1] = Fraction(1)
        indicators[pos] = tuple(e)

    terms = []
    for coeff, vectors in t.terms:
        it = iter(vectors)
        new = []
        for pos in range(1, d + 1):
            if pos in indicators:
                new.append(indicators[pos])
            else:
                v = [zero] * width
                for k, x in enumerate(next(it)):
                    v[place[k]] = x
                new.append(tuple(v))
        terms.append((coeff, new))
    return RankDecomposition(d, width, terms)


# ---------------------------------------------------------------------------
# Shifting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ShiftProfile:
    """Multiplicities ``(k'_0, ..., k'_{d-1}, 1)`` of a shifted free algebra."""

    d: int
    m: int
    counts: Tuple[int, ...]

    def to_json(self) -> dict:
        return {"d": self.d, "m": self.m, "counts": list(self.counts)}

    @classmethod
    def from_json(cls, obj) -> "ShiftProfile":
        try:
            return cls(int(obj["d"]), int(obj["m"]), tuple(int(c) for c in obj["counts"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"malformed shift profile JSON: {exc}") from None


def shift_profile(d: int, m: int) -> ShiftProfile:
    """Shifting ``B_d`` by an ``m``-element set: the number of order-``e``
    factors is the number of ways to fill ``d - e`` of the ``d`` positions
    with distinct elements of the shift set."""
    if d < 0 or m < 0:
        raise FormatError("d and m must be non-negative")
    counts = tuple(comb(d, e) * count_distinct_tuples(m, d - e) for e in range(d)) + (1,)
    return ShiftProfile(d, m, counts)
