"""Bounded-rank completion of off-diagonal tensors.

Given an off-diagonal tensor ``p`` whose off-diagonal ``(l+1)``-minors all
vanish, build a full tensor of rank at most ``rank_cap(d, l)`` that agrees
with ``p`` off the big diagonal. The recursion is a double induction:

* order ``d <= 1`` tensors are already full tensors of rank <= 1;
* if no off-diagonal ``l``-minor is nonzero, retry with ``l - 1``;
* otherwise a nonzero ``l``-minor on axis ``i0`` fixes a small index set ``S``
  (every index it touches) and ``T`` is the rest. Each slice obtained by
  pinning some positions to a distinct tuple over ``S`` and letting the others
  range over ``T`` has lower order and is completed recursively. The one
  remaining block, all positions in ``T``, is rebuilt from the invertible
  minor ``M`` as ``sum_j q_j (x) (sum_a Minv[j][a] * row_a)``, where ``q_j`` is
  the completed slice with axis ``i0`` pinned to ``j`` and ``row_a`` is row
  ``a`` of the flattening restricted to ``T``.

Every slice is zero-padded back to width ``w`` and the terms are summed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Dict, List, Sequence, Tuple

from .equations import is_member, strict_witness
from .errors import AlgorithmInvariantError, FIClosureError, FormatError, NotInZError
from .linalg import inverse
from .tensor import (
    OffDiagTensor,
    RankDecomposition,
    count_distinct_tuples,
    distinct_tuples,
    insert_at,
    pad_embed,
    project,
)


@lru_cache(maxsize=None)
def rank_cap(d: int, l: int) -> int:
    """Input-independent bound on the number of terms :func:`complete` emits.

    The split step uses the worst case ``|S| = l * d``.
    """
    if d < 0 or l < 0:
        raise FormatError("d and l must be non-negative")
    if d <= 1:
        return 1
    if l == 0:
        return 0
    s = l * d
    slices = sum(
        comb(d, m) * count_distinct_tuples(s, d - m) * rank_cap(m, l) for m in range(d)
    )
    return max(rank_cap(d, l - 1), slices + l * rank_cap(d - 1, l))


@dataclass
class CompletionResult:
    decomposition: RankDecomposition
    certified_cap: int
    trace: List[dict] = field(default_factory=list)

    @property
    def terms(self) -> int:
        return len(self.decomposition)

    def to_json(self, with_trace: bool = False) -> dict:
        out = {
            "cap": self.certified_cap,
            "terms": self.terms,
            "decomposition": self.decomposition.to_json(),
        }
        if with_trace:
            out["trace"] = self.trace
        return out


def _nonzero_term(coeff, vectors) -> bool:
    return bool(coeff) and all(any(v) for v in vectors)


def _slice(p: OffDiagTensor, fixed: Dict[int, int], free: Sequence[int], T: Sequence[int]) -> OffDiagTensor:
    """Order-``len(free)`` tensor over ``[len(T)]`` read from ``p`` with the
    ``fixed`` positions pinned and the ``free`` positions ranging over ``T``."""
    d = p.d
    entries = {}
    for beta in distinct_tuples(range(1, len(T) + 1), len(free)):
        x = [0] * d
        for pos, val in fixed.items():
            x[pos - 1] = val
        for pos, b in zip(free, beta):
            x[pos - 1] = T[b - 1]
        v = p.get(tuple(x))
        if v:
            entries[beta] = v
    return OffDiagTensor(len(free), len(T), entries)


def _complete(p: OffDiagTensor, l: int, trace: List[dict], depth: int) -> RankDecomposition:
    d, w = p.d, p.width
    record = {"depth": depth, "d": d, "l": l, "width": w}
    if p.is_zero():
        trace.append({**record, "case": "zero"})
        return RankDecomposition(d, w)
    if d == 0:
        trace.append({**record, "case": "base"})
        return RankDecomposition(0, w, [(p.get(()), ())])
    if d == 1:
        trace.append({**record, "case": "base"})
        return RankDecomposition(1, w, [(1, [[p.get((j,)) for j in range(1, w + 1)]])])
    if l == 0:
        raise AlgorithmInvariantError("nonzero tensor reached the bound l = 0")

    witness = strict_witness(p, l)
    if witness is None:
        trace.append({**record, "case": "descent"})
        return _complete(p, l - 1, trace, depth + 1)

    i0, u1, u2 = witness.axis, witness.rows, witness.cols
    S = sorted({v for r in u1 for v in r} | set(u2))
    T = [v for v in range(1, w + 1) if v not in S]
    trace.append({
        **record,
        "case": "split",
        "axis": i0,
        "rows": [list(r) for r in u1],
        "cols": list(u2),
        "S": S,
        "T": T,
    })

    terms = []
    memo: Dict[Tuple[Tuple[int, ...], Tuple[int, ...]], RankDecomposition] = {}
    positions = range(1, d + 1)
    for m in range(d):
        for free in itertools.combinations(positions, m):
            pinned = [pos for pos in positions if pos not in free]
            for alpha in distinct_tuples(S, d - m):
                fixed = dict(zip(pinned, alpha))
                q = _complete(_slice(p, fixed, free, T), l, trace, depth + 1)
                memo[(free, alpha)] = q
                terms.extend(pad_embed(q, fixed, w, support=T).terms)

    # the all-T block
    M = [[p.get(insert_at(a, j, i0)) for j in u2] for a in u1]
    Minv = inverse(M)
    rows_T = [[p.get(insert_at(a, t, i0)) for t in T] for a in u1]
    others = tuple(pos for pos in positions if pos != i0)
    block = []
    for jj, j in enumerate(u2):
        combo = tuple(
            sum((Minv[jj][aa] * rows_T[aa][k] for aa in range(len(u1))), Fraction(0))
            for k in range(len(T))
        )
        for coeff, vectors in memo[(others, (j,))].terms:
            vectors = list(vectors)
            vectors.insert(i0 - 1, combo)
            block.append((coeff, vectors))
    terms.extend(pad_embed(RankDecomposition(d, len(T), block), {}, w, support=T).terms)

    return RankDecomposition(d, w, [t for t in terms if _nonzero_term(*t)])


def complete(p: OffDiagTensor, l: int) -> CompletionResult:
    """Complete ``p`` to a full tensor of rank at most ``rank_cap(p.d, l)``.

    Raises :class:`NotInZError` if some off-diagonal ``(l+1)``-minor of ``p``
    is nonzero.
    """
    if l < 0:
        raise FormatError("l must be non-negative")
    check = is_member(p, l)
    if not check:
        w = check.witness
        raise NotInZError(
            f"nonzero off-diagonal {l + 1}x{l + 1} minor on axis {w.axis}: "
            f"rows {[list(r) for r in w.rows]}, cols {list(w.cols)}, value {w.value}",
            witness=w,
        )
    trace: List[dict] = []
    decomposition = _complete(p, l, trace, 0)
    cap = rank_cap(p.d, l)
    if project(decomposition) != p:
        raise AlgorithmInvariantError("completion does not reproduce the off-diagonal entries")
    if len(decomposition) > cap:
        raise AlgorithmInvariantError(f"{len(decomposition)} terms exceed the cap {cap}")
    return CompletionResult(decomposition, cap, trace)


def complete_product(ps: Sequence[Tuple[OffDiagTensor, int]]) -> List[CompletionResult]:
    """Complete each factor of a product independently.

    Errors carry the 1-based index of the failing component.
    """
    results = []
    for index, (p, l) in enumerate(ps, start=1):
        try:
            results.append(complete(p, l))
        except FIClosureError as exc:
            exc.component = index
            exc.args = (f"component {index}: {exc}",)
            raise
    return results
