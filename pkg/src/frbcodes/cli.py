"""Command line: construct | validate | params | oracle | simulate.

Every command emits a JSON report (or a flat text rendering of it) that
embeds the tool version, the resolved configuration and the seed. Exit
codes: 0 pass, 1 claim or case failure, 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import asdict, dataclass, field
from itertools import combinations
from math import comb

from . import __version__, analysis, designs, dss
from .errors import FrbError, InsufficientSymbols, Inconsistent, NoDistinctHelpers
from .incidence import BinaryIncidenceMatrix, load, weights, write_text
from .mds import default_field_order

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    seed: int = 0
    budget: int = 0
    format: str = "json"
    out: str | None = None
    params: dict = field(default_factory=dict)


def parse_range(text: str) -> list[int]:
    """``"a..b"`` (inclusive) or a single integer."""
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            lo, hi = int(a), int(b)
            if hi < lo:
                raise ValueError
            return list(range(lo, hi + 1))
        return [int(text)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}; use a..b or an integer") from None


def render_text(obj, prefix: str = "") -> list[str]:
    if isinstance(obj, dict):
        lines = []
        for k in sorted(obj):
            lines += render_text(obj[k], f"{prefix}.{k}" if prefix else str(k))
        return lines
    if isinstance(obj, list) and any(isinstance(x, (dict, list)) for x in obj):
        lines = []
        for i, x in enumerate(obj):
            lines += render_text(x, f"{prefix}[{i}]")
        return lines
    return [f"{prefix}: {json.dumps(obj)}"]


def emit(cfg: RunConfig, body: dict, passed: bool | None) -> str:
    report = {"tool": "frbcodes", "version": __version__, "config": asdict(cfg), "seed": cfg.seed}
    if passed is not None:
        report["passed"] = passed
    report.update(body)
    if cfg.format == "text":
        text = "\n".join(render_text(report)) + "\n"
    else:
        text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if cfg.out and cfg.command != "construct":
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return text


def _load_matrix(path: str | None) -> BinaryIncidenceMatrix:
    if not path:
        raise UsageError("--in is required")
    try:
        return load(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _design_from_args(args):
    if args.family == "td":
        if args.ell is None or args.h is None:
            raise UsageError("td needs --ell and --h")
        return designs.build_td(args.ell, args.h)
    if args.q is None:
        raise UsageError("affine needs --q")
    return designs.build_affine(args.q)


# commands -------------------------------------------------------------------


def cmd_construct(args, cfg: RunConfig) -> int:
    design = _design_from_args(args)
    m = designs.incidence(design)
    prof = weights(m)
    files = []
    if args.out:
        with open(args.out + ".im", "w") as fh:
            fh.write(write_text(m))
        with open(args.out + ".json", "w") as fh:
            json.dump(designs.to_json_obj(design), fh, sort_keys=True)
        files = [args.out + ".im", args.out + ".json"]
    body = {
        "design": {"family": designs.to_json_obj(design)["family"], **designs.to_json_obj(design)["params"]},
        "summary": {"n": m.n, "theta": m.theta, "alpha": prof.alpha, "rho": prof.rho},
        "files": files,
    }
    emit(cfg, body, None)
    return EXIT_OK


def cmd_validate(args, cfg: RunConfig) -> int:
    if args.inp:
        try:
            with open(args.inp) as fh:
                design = designs.from_json_obj(json.load(fh))
        except OSError as exc:
            raise UsageError(f"cannot read {args.inp}: {exc.strerror}") from None
        except (ValueError, KeyError, TypeError) as exc:
            raise UsageError(f"bad design file: {exc}") from None
    else:
        design = _design_from_args(args)
    if isinstance(design, designs.TransversalDesign):
        rep = designs.validate_td(design)
    else:
        rep = designs.validate_affine(design)
    emit(cfg, {"validation": rep.to_json_obj()}, rep.passed)
    return EXIT_OK if rep.passed else EXIT_FAIL


def _family_param(args) -> tuple[str | None, int | None]:
    if args.family is None:
        return None, None
    param = args.alpha if args.alpha is not None else args.q
    if param is None:
        raise UsageError("--family needs --alpha (td2/td3/tdres) or --q (affine)")
    return args.family, param


def cmd_params(args, cfg: RunConfig) -> int:
    m = _load_matrix(args.inp)
    family, param = _family_param(args)
    k_range = args.k if args.k is not None else list(range(1, m.n + 1))
    if any(not 1 <= k <= m.n for k in k_range):
        raise UsageError(f"k must lie in 1..{m.n}")
    rep = analysis.verify_code(m, family, param, k_range, args.delta)
    emit(cfg, {"report": rep.to_json_obj()}, rep.passed)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_oracle(args, cfg: RunConfig) -> int:
    m = _load_matrix(args.inp)
    deltas = args.delta if args.delta is not None else [0]
    max_size = m.theta if args.max is None else args.max
    rows, agree_all = [], True
    for d in deltas:
        fast = analysis.ecbc_t(m, d)
        o_t, o_w = analysis.batch_t_oracle(m, d, max_size)
        if o_w is not None:
            agree = fast.t == o_t
        else:
            agree = fast.t >= o_t
        agree_all &= agree
        rows.append({
            "delta": d,
            "t": fast.t,
            "oracle_t": o_t,
            "oracle_complete": o_w is not None or max_size >= m.theta,
            "agree": agree,
            "witness": fast.witness and fast.witness.to_json_obj(),
            "oracle_witness": o_w and o_w.to_json_obj(),
        })
    body = {"max": max_size, "comparisons": rows}
    if max_size == 0:
        body["warning"] = "max subset size 0: agreement is vacuous"
        print("warning: --max 0 makes the comparison vacuous", file=sys.stderr)
    emit(cfg, body, agree_all)
    return EXIT_OK if agree_all else EXIT_FAIL


def _subsets(n: int, k: int, budget: int, rng: random.Random):
    total = comb(n, k)
    if budget == 0 or total <= budget:
        yield from combinations(range(n), k)
    else:
        for _ in range(budget):
            yield tuple(sorted(rng.sample(range(n), k)))


def cmd_simulate(args, cfg: RunConfig) -> int:
    m = _load_matrix(args.inp)
    if args.k is None or args.t is None:
        raise UsageError("simulate needs --k and --t")
    k, t, delta = args.k[0], args.t, args.delta[0] if args.delta else 0
    if not 1 <= k <= m.n or not 0 <= t <= m.theta or not 0 <= delta <= m.n:
        raise UsageError("k, t or delta outside the matrix dimensions")
    M = args.M if args.M is not None else analysis.file_size(m, k)
    q = args.field if args.field is not None else default_field_order(m.theta)
    rng = random.Random(cfg.seed)
    data = [rng.randrange(q) for _ in range(M)]
    system = dss.store(data, m, q, k)

    recon = {"k": k, "M": M, "cases_total": comb(m.n, k), "cases_run": 0, "failure_count": 0, "failures": []}
    for nodes in _subsets(m.n, k, cfg.budget, rng):
        recon["cases_run"] += 1
        try:
            ok = system.reconstruct(nodes) == data
            err = None if ok else "wrong file"
        except (InsufficientSymbols, Inconsistent) as exc:
            err = f"{type(exc).__name__}: {exc}"
        if err:
            recon["failure_count"] += 1
            if len(recon["failures"]) < dss.MAX_RECORDED_FAILURES:
                recon["failures"].append({"nodes": list(nodes), "error": err})

    prof = weights(m)
    repairs = {"nodes": m.n, "failure_count": 0, "failures": [], "plans": []}
    for node in range(m.n):
        before = system.original_content(node)
        try:
            plan = system.repair(node)
        except NoDistinctHelpers as exc:
            repairs["failure_count"] += 1
            repairs["failures"].append({"node": node, "error": str(exc)})
            system.node_contents[node] = before
            system.failed.discard(node)
            continue
        helpers = plan.helpers
        ok = (
            len(set(helpers)) == len(helpers) == len(before)
            and system.node_contents[node] == before
        )
        repairs["plans"].append(plan.to_json_obj())
        if not ok:
            repairs["failure_count"] += 1
            repairs["failures"].append({"node": node, "error": "restored content differs"})
    repairs["alpha"] = prof.alpha

    sweep = dss.failure_sweep(system, t, delta, cfg.budget, cfg.seed)
    passed = recon["failure_count"] == 0 and repairs["failure_count"] == 0 and sweep.passed
    body = {
        "system": system.snapshot(),
        "reconstruct": recon,
        "repair": repairs,
        "sweep": sweep.to_json_obj(),
    }
    emit(cfg, body, passed)
    return EXIT_OK if passed else EXIT_FAIL


COMMANDS = {
    "construct": cmd_construct,
    "validate": cmd_validate,
    "params": cmd_params,
    "oracle": cmd_oracle,
    "simulate": cmd_simulate,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--out")
    common.add_argument("--budget", type=int, default=0, help="case cap for sweeps; 0 = exhaustive")

    parser = argparse.ArgumentParser(prog="frbcodes", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", parents=[common], help="build a design and its incidence matrix")
    p.add_argument("--family", choices=("td", "affine"), required=True)
    p.add_argument("--ell", type=int)
    p.add_argument("--h", type=int)
    p.add_argument("--q", type=int)

    p = sub.add_parser("validate", parents=[common], help="check design axioms")
    p.add_argument("--in", dest="inp")
    p.add_argument("--family", choices=("td", "affine"))
    p.add_argument("--ell", type=int)
    p.add_argument("--h", type=int)
    p.add_argument("--q", type=int)

    p = sub.add_parser("params", parents=[common], help="compute M(k), t and erasure t")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--family", type=str.upper, choices=analysis.FAMILIES)
    p.add_argument("--alpha", type=int)
    p.add_argument("--q", type=int)
    p.add_argument("--k", type=parse_range)
    p.add_argument("--delta", type=parse_range)

    p = sub.add_parser("oracle", parents=[common], help="cross-check t against brute force")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--delta", type=parse_range)
    p.add_argument("--max", type=int)

    p = sub.add_parser("simulate", parents=[common], help="store, reconstruct, repair, serve batches")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--k", type=parse_range, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--delta", type=parse_range)
    p.add_argument("--M", type=int, help="file size; default is the file size for --k")
    p.add_argument("--field", type=int, help="field order q (default: smallest 2^m >= theta)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "budget", 0) < 0:
        parser.error("--budget must be >= 0")
    resolved = {k: v for k, v in sorted(vars(args).items()) if k not in ("command", "seed", "budget", "format", "out")}
    cfg = RunConfig(args.command, args.seed, args.budget, args.format, args.out, resolved)
    try:
        return COMMANDS[args.command](args, cfg)
    except (UsageError, FrbError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
