"""Defining equations of the bounded flattening-rank locus and membership tests.

A tensor lies in the locus for bound ``l`` when every off-diagonal
``(l+1) x (l+1)`` minor of every flattening vanishes. Each such minor only
involves at most ``d * (l+1)`` indices, so up to relabeling there are finitely
many of them; :func:`canonical_generators` lists one representative per
relabeling class, and :func:`orbit_instances` spreads a representative back
out to a given width.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, List, Optional, Tuple

from .errors import FormatError
from .linalg import determinant
from .poly import TENSOR_Y, Injection, Polynomial, act, evaluate, format_scalar, parse_scalar
from .tensor import Index, OffDiagTensor, distinct_tuples, insert_at

Rows = Tuple[Index, ...]
Cols = Tuple[int, ...]


@dataclass(frozen=True)
class CanonicalEquation:
    d: int
    l: int
    n: int
    axis: int
    rows: Rows
    cols: Cols
    poly: Polynomial

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "l": self.l,
            "n": self.n,
            "axis": self.axis,
            "rows": [list(r) for r in self.rows],
            "cols": list(self.cols),
            "poly": self.poly.to_json(),
        }

    @classmethod
    def from_json(cls, obj) -> "CanonicalEquation":
        try:
            return cls(
                int(obj["d"]),
                int(obj["l"]),
                int(obj["n"]),
                int(obj["axis"]),
                tuple(tuple(int(v) for v in r) for r in obj["rows"]),
                tuple(int(c) for c in obj["cols"]),
                Polynomial.from_json(obj["poly"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"malformed equation JSON: {exc}") from None


@dataclass(frozen=True)
class MembershipWitness:
    """A nonzero off-diagonal minor."""

    axis: int
    rows: Rows
    cols: Cols
    value: object  # Fraction, or int residue in prime-field mode

    def to_json(self) -> dict:
        return {
            "axis": self.axis,
            "rows": [list(r) for r in self.rows],
            "cols": list(self.cols),
            "value": format_scalar(self.value),
        }

    @classmethod
    def from_json(cls, obj) -> "MembershipWitness":
        try:
            return cls(
                int(obj["axis"]),
                tuple(tuple(int(v) for v in r) for r in obj["rows"]),
                tuple(int(c) for c in obj["cols"]),
                parse_scalar(obj["value"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"malformed witness JSON: {exc}") from None


@dataclass(frozen=True)
class Membership:
    member: bool
    witness: Optional[MembershipWitness] = None

    def __bool__(self):
        return self.member


# ---------------------------------------------------------------------------
# Symbolic minors and canonical representatives
# ---------------------------------------------------------------------------


def _parity(perm) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def minor_polynomial(axis: int, rows: Rows, cols: Cols) -> Polynomial:
    """Leibniz expansion of the symbolic minor in ``y`` variables."""
    s = len(rows)
    terms = {}
    for perm in itertools.permutations(range(s)):
        mono = tuple(sorted((insert_at(rows[r], cols[perm[r]], axis), 1) for r in range(s)))
        terms[mono] = terms.get(mono, 0) + _parity(perm)
    return Polynomial(TENSOR_Y, terms)


# Fast internal form for orbit computations: sorted tuple of (variables, coeff)
# with the first coefficient made positive.
_Key = Tuple[Tuple[Tuple[Index, ...], Fraction], ...]


def _sign_normal(terms) -> _Key:
    terms = tuple(sorted(terms))
    if terms and terms[0][1] < 0:
        terms = tuple((m, -c) for m, c in terms)
    return terms


def _key_of(p: Polynomial) -> _Key:
    return _sign_normal((tuple(idx for idx, _ in mono), c) for mono, c in p.terms)


def _relabel_key(key: _Key, perm: Tuple[int, ...]) -> _Key:
    # perm[v] is the new label of v (perm[0] unused); all exponents are 1.
    return _sign_normal(
        (tuple(sorted(tuple(perm[v] for v in idx) for idx in mono)), c) for mono, c in key
    )


def _orbit(key: _Key, n: int) -> set:
    """All sign-normalized relabelings of ``key`` under Sym([n]).

    Breadth-first search over the generators (1 2) and (1 2 ... n), so the
    cost is proportional to the orbit size rather than ``n!``.
    """
    if n <= 1:
        return {key}
    swap = (0, 2, 1) + tuple(range(3, n + 1))
    cycle = (0,) + tuple(range(2, n + 1)) + (1,)
    seen = {key}
    queue = deque([key])
    while queue:
        k = queue.popleft()
        for g in (swap, cycle):
            nk = _relabel_key(k, g)
            if nk not in seen:
                seen.add(nk)
                queue.append(nk)
    return seen


def _raw_minors(d: int, size: int, n: int) -> Iterator[Tuple[int, Rows, Cols]]:
    """Off-diagonal ``size x size`` minors over ``[n]`` that use every label.

    Ordered by (last axis first, rows, cols) lexicographically; the first
    minor of each relabeling class in this order is its representative.
    """
    labels = list(distinct_tuples(range(1, n + 1), d - 1))
    everything = set(range(1, n + 1))
    for axis in range(d, 0, -1):
        for rows in itertools.combinations(labels, size):
            used = {v for r in rows for v in r}
            free = sorted(everything - used)
            # covering [n] with disjoint cols forces cols == free
            if len(free) == size:
                yield axis, rows, tuple(free)


@lru_cache(maxsize=None)
def _generators_for_n(d: int, l: int, n: int) -> Tuple[CanonicalEquation, ...]:
    size = l + 1
    seen: set = set()
    found = []
    for axis, rows, cols in _raw_minors(d, size, n):
        poly = minor_polynomial(axis, rows, cols)
        key = _key_of(poly)
        if key in seen:
            continue
        seen |= _orbit(key, n)
        found.append(CanonicalEquation(d, l, n, axis, rows, cols, poly))
    return tuple(found)


def canonical_generators(d: int, l: int, max_n: Optional[int] = None) -> List[CanonicalEquation]:
    """One representative per relabeling class (up to sign) of off-diagonal
    ``(l+1)``-minors, over minimal index sets ``[n]`` with ``n <= d*(l+1)``.

    ``max_n`` truncates the base widths, which is all that matters when the
    equations are only instantiated at width ``max_n``.
    """
    if d < 0 or l < 0:
        raise FormatError("d and l must be non-negative")
    top = d * (l + 1)
    if max_n is not None:
        top = min(top, max_n)
    out: List[CanonicalEquation] = []
    if d == 0:
        return out
    for n in range(1, top + 1):
        out.extend(_generators_for_n(d, l, n))
    return out


def canonicalize(d: int, axis: int, rows, cols) -> CanonicalEquation:
    """Representative of the class of the given minor."""
    rows = tuple(sorted(tuple(int(v) for v in r) for r in rows))
    cols = tuple(sorted(int(c) for c in cols))
    if len(rows) != len(cols) or not rows:
        raise FormatError("a minor needs equally many (>0) rows and columns")
    labels = sorted({v for r in rows for v in r} | set(cols))
    compress = {v: i for i, v in enumerate(labels, start=1)}
    rows = tuple(tuple(compress[v] for v in r) for r in rows)
    cols = tuple(compress[c] for c in cols)
    n = len(labels)
    orbit = _orbit(_key_of(minor_polynomial(axis, rows, cols)), n)
    l = len(rows) - 1
    for eq in _generators_for_n(d, l, n):
        if _key_of(eq.poly) in orbit:
            return eq
    raise FormatError(f"not an off-diagonal minor: axis {axis}, rows {rows}, cols {cols}")


def orbit_instances(eq: CanonicalEquation, w: int) -> Iterator[Polynomial]:
    """``act(rho, eq.poly)`` for every injection ``rho: [n] -> [w]``, in
    lexicographic order of the image tuple."""
    for images in itertools.permutations(range(1, w + 1), eq.n):
        yield act(Injection(images, w), eq.poly)


# ---------------------------------------------------------------------------
# Membership
# ---------------------------------------------------------------------------


def _scan(p: OffDiagTensor, size: int, modulus: Optional[int] = None) -> Iterator[MembershipWitness]:
    """Nonzero off-diagonal ``size``-minors in (axis, rows, cols) order."""
    d, w = p.d, p.width
    labels = list(distinct_tuples(range(1, w + 1), d - 1)) if d >= 1 else []
    for axis in range(1, d + 1):
        for rows in itertools.combinations(labels, size):
            used = {v for r in rows for v in r}
            free = [c for c in range(1, w + 1) if c not in used]
            if len(free) < size:
                continue
            for cols in itertools.combinations(free, size):
                M = [[p.get(insert_at(r, c, axis)) for c in cols] for r in rows]
                if any(not any(line) for line in M):
                    continue
                value = determinant(M, modulus=modulus)
                if value:
                    yield MembershipWitness(axis, rows, cols, value)


def _full_assignment(p: OffDiagTensor) -> dict:
    return {idx: p.get(idx) for idx in p.tuples()}


def is_member(
    p: OffDiagTensor, l: int, method: str = "scan", modulus: Optional[int] = None
) -> Membership:
    """Whether every off-diagonal ``(l+1)``-minor of every flattening vanishes.

    ``method="scan"`` walks the minors directly and reports the
    lexicographically first nonzero one. ``method="orbits"`` evaluates every
    instance of every canonical equation at ``p``'s width instead. With a
    prime ``modulus`` the scan runs over GF(modulus), which can only miss
    violations, never invent them.
    """
    if l < 0:
        raise FormatError("l must be non-negative")
    if method == "scan":
        witness = next(_scan(p, l + 1, modulus), None)
        return Membership(witness is None, witness)
    if method != "orbits":
        raise FormatError(f"unknown membership method {method!r}")
    if modulus is not None:
        raise FormatError("prime-field mode is only available for the scan method")
    point = _full_assignment(p)
    for eq in canonical_generators(p.d, l, max_n=p.width):
        for images in itertools.permutations(range(1, p.width + 1), eq.n):
            inst = act(Injection(images, p.width), eq.poly)
            value = evaluate(inst, point)
            if value:
                rows = tuple(sorted(tuple(images[v - 1] for v in r) for r in eq.rows))
                cols = tuple(sorted(images[c - 1] for c in eq.cols))
                M = [[p.get(insert_at(r, c, eq.axis)) for c in cols] for r in rows]
                return Membership(False, MembershipWitness(eq.axis, rows, cols, determinant(M)))
    return Membership(True)


def strict_witness(p: OffDiagTensor, l: int) -> Optional[MembershipWitness]:
    """First nonzero off-diagonal ``l x l`` minor, or ``None`` if the tensor
    already satisfies the bound ``l - 1``."""
    if l < 1:
        raise FormatError("strict_witness needs l >= 1")
    return next(_scan(p, l), None)
