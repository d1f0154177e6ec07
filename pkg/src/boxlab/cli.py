"""Command-line front end.

    boxlab box --d 2 --kind pr [--v 0.9]
    boxlab bounds --d 2 --sweep 0:1:101 --format csv
    boxlab protocol --d 3 --v 1.0 [--no-copy] [--local]
    boxlab lhv --d 3
    boxlab seesaw --d 2 --dim 2 --restarts 20 --seed 42

Exit codes: 0 success, 2 argument error, 3 numerical invariant failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import boxes, dilation, lhv, protocol, seesaw, tsirelson
from .serialization import csv_text, dumps

EXIT_ARGS = 2
EXIT_NUMERIC = 3
ROUND_TRIP_TOL = 1e-10


class NumericalInvariantError(RuntimeError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    d: int
    v: float | None = None
    sweep: tuple[float, float, int] | None = None
    seed: int = 0
    restarts: int | None = None
    out: str | None = None
    fmt: str = "json"


def _parse_sweep(text: str) -> tuple[float, float, int]:
    try:
        start, stop, steps = text.split(":")
        start, stop, steps = float(start), float(stop), int(steps)
    except ValueError:
        raise argparse.ArgumentTypeError("sweep must be start:stop:steps") from None
    if steps < 1 or not 0.0 <= start <= 1.0 or not 0.0 <= stop <= 1.0:
        raise argparse.ArgumentTypeError("sweep needs 0 <= start, stop <= 1 and steps >= 1")
    return start, stop, steps


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="boxlab", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--d", type=int, required=True)
        sp.add_argument("--out", help="write output to this file instead of stdout")
        return sp

    sp = common(sub.add_parser("box", help="emit a PR^d, uniform or noisy PR^d box"))
    sp.add_argument("--kind", choices=("pr", "uniform"), default="pr")
    sp.add_argument("--v", type=float, help="visibility: v*PR + (1-v)*uniform")

    sp = common(sub.add_parser("bounds", help="evaluate the causal bounds"))
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--v", type=float)
    g.add_argument("--sweep", type=_parse_sweep, help="start:stop:steps over the visibility")
    g.add_argument("--box", dest="box_file", help="box JSON file to evaluate")
    sp.add_argument("--critical", action="store_true", help="also report the critical visibility")
    sp.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")

    sp = common(sub.add_parser("protocol", help="run the reveal protocol on a dilation"))
    sp.add_argument("--v", type=float, default=1.0)
    sp.add_argument("--no-copy", action="store_true", help="skip the input copy registers")
    sp.add_argument("--dilation", choices=("generic", "pr"), default=None,
                    help="dilation for the box (default: pr at v=1, generic otherwise)")
    sp.add_argument("--local", action="store_true",
                    help="use a product dilation of a see-saw optimized quantum strategy")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--restarts", type=int, default=5)
    sp.add_argument("--dump-dilation", help="also write the dilation (large) as JSON to this path")

    common(sub.add_parser("lhv", help="exact classical maximum of B^d"))

    sp = common(sub.add_parser("seesaw", help="see-saw lower bound on the quantum value of B^d"))
    sp.add_argument("--dim", type=int, default=None, help="local Hilbert space dimension (default d)")
    sp.add_argument("--restarts", type=int, default=None)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--max-iters", type=int, default=2000)
    return p


def _validate(p: argparse.ArgumentParser, args) -> RunConfig:
    if args.d < 2:
        p.error("--d must be >= 2")
    v = getattr(args, "v", None)
    if v is not None and not 0.0 <= v <= 1.0:
        p.error("--v must lie in [0, 1]")
    if args.command == "bounds":
        if args.critical and args.d not in (2, 3):
            p.error("--critical is only available for d in {2, 3}")
        if args.d > 6:
            p.error("bounds supports d <= 6")
    if args.command == "protocol":
        if args.d > 4:
            p.error("protocol supports d <= 4")
        if args.dilation == "pr" and args.v != 1.0:
            p.error("--dilation pr realizes only the v = 1 box")
        if args.restarts < 1:
            p.error("--restarts must be >= 1")
    if args.command == "lhv" and lhv.strategy_count(args.d, args.d, args.d, args.d) > lhv.MAX_STRATEGIES:
        p.error("too many deterministic strategies for this d")
    if args.command == "seesaw":
        if args.dim is not None and args.dim < 2:
            p.error("--dim must be >= 2")
        if args.restarts is not None and args.restarts < 1:
            p.error("--restarts must be >= 1")
        if args.max_iters < 1:
            p.error("--max-iters must be >= 1")
    return RunConfig(
        command=args.command,
        d=args.d,
        v=v,
        sweep=getattr(args, "sweep", None),
        seed=getattr(args, "seed", 0),
        restarts=getattr(args, "restarts", None),
        out=args.out,
        fmt=getattr(args, "fmt", "json"),
    )


def _box_for(d: int, v: float | None) -> boxes.Box:
    return boxes.pr_box(d) if v is None else boxes.noisy_pr_box(d, v)


def cmd_box(args, cfg: RunConfig) -> str:
    box = boxes.uniform_box(cfg.d) if args.kind == "uniform" else _box_for(cfg.d, cfg.v)
    value = boxes.evaluate(boxes.bell_bd(cfg.d), box)
    print(f"B^{cfg.d} = {value:.17g}", file=sys.stderr)
    return dumps(box.to_json())


def _report_json(r: tsirelson.BoundReport, v: float | None) -> dict:
    out = {"v": v} if v is not None else {}
    out.update(r.to_json())
    return out


def cmd_bounds(args, cfg: RunConfig) -> str:
    if cfg.sweep is not None:
        start, stop, steps = cfg.sweep
        vs = np.linspace(start, stop, steps)
        reports = tsirelson.sweep(cfg.d, vs)
        if cfg.fmt == "csv":
            rows = [[float(v), r.bell_value, r.c1_lhs, r.violated] for v, r in zip(vs, reports)]
            return csv_text(["v", "bell_value", "c1_lhs", "violated"], rows)
        return dumps([_report_json(r, float(v)) for v, r in zip(vs, reports)])

    if args.box_file:
        with open(args.box_file, encoding="utf-8") as fh:
            box = boxes.Box.from_json(json.load(fh))
        if box.square_dim() != cfg.d:
            raise ValueError("box dimension does not match --d")
        v = None
    else:
        v = 1.0 if cfg.v is None else cfg.v
        box = boxes.noisy_pr_box(cfg.d, v)
    r = tsirelson.bound_report(box)
    if cfg.fmt == "csv":
        return csv_text(["v", "bell_value", "c1_lhs", "violated"], [[v if v is not None else "", r.bell_value, r.c1_lhs, r.violated]])
    out = _report_json(r, v)
    if args.critical:
        out["critical_visibility"] = tsirelson.critical_visibility(cfg.d)
    return dumps(out)


def _check_round_trip(dr: dilation.DilationResult, box: boxes.Box):
    err = float(np.abs(dilation.extract_box(dr).probs - box.probs).max())
    if err > ROUND_TRIP_TOL:
        raise NumericalInvariantError(f"dilation round trip error {err:.3e} exceeds {ROUND_TRIP_TOL}")


def cmd_protocol(args, cfg: RunConfig) -> str:
    d = cfg.d
    if args.local:
        opt = seesaw.seesaw_optimize(boxes.bell_bd(d), d, d, cfg.restarts, seed=cfg.seed)
        dr = seesaw.strategy_to_dilation(opt.strategy)
        box = seesaw.strategy_box(opt.strategy)
        source = "local"
    else:
        v = cfg.v
        box = boxes.noisy_pr_box(d, v)
        kind = args.dilation or ("pr" if v == 1.0 else "generic")
        dr = dilation.dilate_pr(d) if kind == "pr" else dilation.dilate_generic(box)
        source = kind
    _check_round_trip(dr, box)
    tr = protocol.reveal_protocol(dr, with_copy=not args.no_copy)
    if args.dump_dilation:
        _write(args.dump_dilation, dumps(dr.to_json()))
    out = {"dilation": source, "v": None if args.local else cfg.v}
    out.update(tr.to_json())
    out["ent_gain"] = tr.entanglement_gain_ebits
    out["bell_value"] = boxes.evaluate(boxes.bell_bd(d), box)
    out["product"] = protocol.product_test(dr.u).is_product
    return dumps(out)


def cmd_lhv(args, cfg: RunConfig) -> str:
    d = cfg.d
    f = boxes.bell_bd(d)
    res = lhv.classical_max(f)
    frac = Fraction(res.value).limit_denominator(int(f.denominator))
    return dumps({
        "d": d,
        "value": res.value,
        "value_fraction": f"{frac.numerator}/{frac.denominator}",
        "strategies": lhv.strategy_count(d, d, d, d),
        "witness": {"f_a": list(res.witness.f_a), "g_b": list(res.witness.g_b)},
    })


def cmd_seesaw(args, cfg: RunConfig) -> str:
    d = cfg.d
    dim = args.dim or d
    res = seesaw.seesaw_optimize(boxes.bell_bd(d), d, dim, cfg.restarts, args.max_iters, cfg.seed)
    upper = tsirelson.quantum_upper(d)
    out = {
        "d": d,
        "local_dim": dim,
        "seed": cfg.seed,
        "lower_bound": res.best_value,
        "upper_bound": upper,
        "gap": None if upper is None else upper - res.best_value,
        "lhv_max": lhv.classical_max(boxes.bell_bd(d)).value if d <= 4 else None,
    }
    if d == 2:
        out["chsh_value"] = boxes.chsh_value(seesaw.strategy_box(res.strategy))
    out.update(res.to_json())
    return dumps(out)


COMMANDS = {
    "box": cmd_box,
    "bounds": cmd_bounds,
    "protocol": cmd_protocol,
    "lhv": cmd_lhv,
    "seesaw": cmd_seesaw,
}


def _write(path: str | None, text: str):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = _validate(parser, args)
    try:
        text = COMMANDS[cfg.command](args, cfg)
    except (NumericalInvariantError, ArithmeticError) as exc:
        print(f"boxlab: numerical invariant failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError) as exc:
        print(f"boxlab: {exc}", file=sys.stderr)
        return EXIT_ARGS
    _write(cfg.out, text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
