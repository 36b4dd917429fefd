"""Randomized end-to-end check of a map: containment, completion, equivariance."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .completion import complete, rank_cap
from .equations import is_member
from .equivariant import EquivariantMap, MatrixPoint, pushforward, rank_bound
from .errors import FIClosureError, PushforwardError
from .poly import Injection
from .rng import SplitMix64
from .tensor import OffDiagTensor, project

SAMPLE_RANGE = (-9, 9)


@dataclass
class VerifyReport:
    trials: int
    seed: int
    width: int
    failures: List[Tuple[int, str, str]] = field(default_factory=list)
    timings: Dict[str, float] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self, with_timings: bool = False) -> dict:
        out = {
            "trials": self.trials,
            "seed": self.seed,
            "width": self.width,
            "ok": self.ok,
            "failures": [{"trial": t, "stage": s, "detail": d} for t, s, d in self.failures],
        }
        if with_timings:
            out["timings"] = {k: round(v, 6) for k, v in sorted(self.timings.items())}
        return out


def sample_point(rng: SplitMix64, k: int, width: int) -> MatrixPoint:
    lo, hi = SAMPLE_RANGE
    return MatrixPoint(k, width, tuple(tuple(rng.randint(lo, hi) for _ in range(width)) for _ in range(k)))


def _corrupt(tensors: List[OffDiagTensor]) -> List[OffDiagTensor]:
    """Add 1 to entry (1, 2, ..., e) of the highest-order component."""
    pos = max(range(len(tensors)), key=lambda i: (tensors[i].d, -i))
    t = tensors[pos]
    idx = tuple(range(1, t.d + 1))
    entries = t.entries
    entries[idx] = entries.get(idx, 0) + 1
    out = list(tensors)
    out[pos] = OffDiagTensor(t.d, t.width, entries)
    return out


def run_verify(
    m: EquivariantMap,
    width: int,
    trials: int,
    seed: int,
    corrupt: bool = False,
    modulus: Optional[int] = None,
) -> VerifyReport:
    """Run ``trials`` independent checks on random integer points.

    Per trial: sample a point, push it forward, check membership at the map's
    rank bound, complete every component at its own monomial count and check
    the round trip and the cap, and check equivariance under a random column
    permutation. ``corrupt`` perturbs the pushforward as a negative control.
    """
    if width < m.max_width:
        raise PushforwardError(f"width {width} is smaller than the widest generator ({m.max_width})")
    rng = SplitMix64(seed)
    report = VerifyReport(trials, seed, width)
    bound = rank_bound(m)
    timings = {s: 0.0 for s in ("sample", "pushforward", "membership", "completion", "equivariance")}

    for trial in range(trials):
        stage = "sample"
        try:
            t0 = time.perf_counter()
            a = sample_point(rng, m.k, width)
            sigma = Injection(tuple(rng.permutation(width)), width)
            timings["sample"] += time.perf_counter() - t0

            stage = "pushforward"
            t0 = time.perf_counter()
            tensors = pushforward(m, a)
            if corrupt and tensors:
                tensors = _corrupt(tensors)
            timings["pushforward"] += time.perf_counter() - t0

            stage = "membership"
            t0 = time.perf_counter()
            for ci, t in enumerate(tensors, start=1):
                res = is_member(t, bound, modulus=modulus)
                if not res:
                    wit = res.witness
                    report.failures.append((trial, stage, (
                        f"component {ci}: nonzero minor axis {wit.axis} rows {[list(r) for r in wit.rows]} "
                        f"cols {list(wit.cols)} value {wit.value}"
                    )))
            timings["membership"] += time.perf_counter() - t0

            stage = "completion"
            t0 = time.perf_counter()
            for ci, (t, comp) in enumerate(zip(tensors, m.components), start=1):
                l = len(comp.image)
                try:
                    result = complete(t, l)
                except FIClosureError as exc:
                    report.failures.append((trial, stage, f"component {ci}: {exc}"))
                    continue
                if project(result.decomposition) != t:
                    report.failures.append((trial, stage, f"component {ci}: round trip mismatch"))
                if result.terms > rank_cap(t.d, l):
                    report.failures.append((trial, stage, f"component {ci}: {result.terms} terms exceed cap"))
            timings["completion"] += time.perf_counter() - t0

            stage = "equivariance"
            t0 = time.perf_counter()
            moved = pushforward(m, a.permute_columns(sigma))
            for ci, (t, u) in enumerate(zip(tensors, moved), start=1):
                if t.relabel(sigma) != u:
                    report.failures.append((trial, stage, f"component {ci}: permutation {list(sigma.images)}"))
            timings["equivariance"] += time.perf_counter() - t0
        except FIClosureError as exc:
            report.failures.append((trial, stage, str(exc)))

    report.timings = timings
    return report
