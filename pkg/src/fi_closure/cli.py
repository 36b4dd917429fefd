"""Command line front end.

Exit codes: 0 success, 2 bad input, 3 tensor outside the locus,
4 internal invariant failure (including failed verification trials).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .completion import complete
from .equations import canonical_generators, is_member
from .equivariant import MatrixPoint, factor_model_preset, parse_map, pushforward, rank_bound
from .errors import AlgorithmInvariantError, InputError, NotInZError
from .tensor import OffDiagTensor, shift_profile
from .verify import run_verify

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NOT_IN_Z = 3
EXIT_INTERNAL = 4

PRESETS = {"factor-model": factor_model_preset}


def _load(path: str):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _emit(args, obj):
    text = _dump(obj)
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text, encoding="utf-8")


def cmd_gen_eqs(args) -> int:
    eqs = canonical_generators(args.d, args.l, max_n=args.max_n)
    _emit(args, [e.to_json() for e in eqs])
    return EXIT_OK


def cmd_push(args) -> int:
    m = parse_map(_load(args.map))
    a = MatrixPoint.from_json(_load(args.point))
    tensors = pushforward(m, a)
    _emit(args, {"rank_bound": rank_bound(m), "tensors": [t.to_json() for t in tensors]})
    return EXIT_OK


def cmd_member(args) -> int:
    p = OffDiagTensor.from_json(_load(args.tensor), strict=args.strict)
    res = is_member(p, args.l, method=args.method, modulus=args.modulus)
    out = {"member": res.member, "l": args.l}
    if res.witness is not None:
        out["witness"] = res.witness.to_json()
    _emit(args, out)
    return EXIT_OK if res.member else EXIT_NOT_IN_Z


def cmd_complete(args) -> int:
    p = OffDiagTensor.from_json(_load(args.tensor), strict=args.strict)
    try:
        result = complete(p, args.l)
    except NotInZError as exc:
        print(f"error: {exc}", file=sys.stderr)
        _emit(args, {"member": False, "l": args.l, "witness": exc.witness.to_json()})
        return EXIT_NOT_IN_Z
    if args.trace:
        Path(args.trace).write_text(_dump(result.trace), encoding="utf-8")
    _emit(args, result.to_json())
    return EXIT_OK


def _preset(name: str, k: int):
    try:
        return PRESETS[name](k)
    except KeyError:
        raise InputError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


def cmd_preset(args) -> int:
    _emit(args, _preset(args.name, args.k).to_json())
    return EXIT_OK


def cmd_shift_profile(args) -> int:
    _emit(args, shift_profile(args.d, args.m).to_json())
    return EXIT_OK


def cmd_verify(args) -> int:
    if (args.map is None) == (args.preset is None):
        raise InputError("give exactly one of --map or --preset")
    m = parse_map(_load(args.map)) if args.map else _preset(args.preset, args.k)
    report = run_verify(
        m, args.width, args.trials, args.seed, corrupt=args.corrupt, modulus=args.modulus
    )
    _emit(args, report.to_json(with_timings=args.timings))
    return EXIT_OK if report.ok else EXIT_INTERNAL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fi-closure",
        description="Exact equations, pushforwards and bounded-rank completion for off-diagonal tensors.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--output", "-o", default=None, help="output file (default: stdout)")
        p.set_defaults(func=func)
        return p

    p = add("gen-eqs", cmd_gen_eqs, "list canonical defining equations")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--max-n", type=int, default=None, help="only base widths up to this value")

    p = add("push", cmd_push, "push a matrix point forward along a map")
    p.add_argument("--map", required=True)
    p.add_argument("--point", required=True)

    p = add("member", cmd_member, "test membership of a tensor")
    p.add_argument("--tensor", required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--method", choices=("scan", "orbits"), default="scan")
    p.add_argument("--modulus", type=int, default=None, help="scan over GF(modulus)")
    p.add_argument("--strict", action="store_true", help="require every off-diagonal entry")

    p = add("complete", cmd_complete, "complete a tensor to bounded rank")
    p.add_argument("--tensor", required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--trace", default=None, help="write the recursion trace here")
    p.add_argument("--strict", action="store_true", help="require every off-diagonal entry")

    p = add("preset", cmd_preset, "emit a built-in map")
    p.add_argument("name", choices=sorted(PRESETS))
    p.add_argument("--k", type=int, default=1)

    p = add("shift-profile", cmd_shift_profile, "multiplicities of a shifted free algebra")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--m", type=int, required=True)

    p = add("verify", cmd_verify, "randomized end-to-end verification")
    p.add_argument("--map", default=None)
    p.add_argument("--preset", choices=sorted(PRESETS), default=None)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--trials", type=int, default=25)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--corrupt", action="store_true", help="negative control: perturb pushforwards")
    p.add_argument("--modulus", type=int, default=None, help="membership checks over GF(modulus)")
    p.add_argument("--timings", action="store_true", help="include per-stage timings (not deterministic)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NotInZError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_IN_Z
    except AlgorithmInvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
